/******************************************************************************
 * Copyright 2026 The ghxctl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#ifndef GHXCTL_CONTROL_HPP
#define GHXCTL_CONTROL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ghxctl/mat.hpp"
#include "ghxctl/plant.hpp"

namespace ghxctl {

/// Solves P A_h + A_h^T P = -Q_lyap by Kronecker vectorization
/// (I (x) A_h^T + A_h^T (x) I) vec(P) = -vec(Q_lyap), then symmetrizes.
/// Requires a Hurwitz A_h and symmetric positive definite Q_lyap; the result
/// is checked to residual 1e-10 and positive definiteness.
Mat solve_lyapunov(const Mat& a_h, const Mat& q_lyap);

struct CareOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
  std::optional<Mat> stabilizing_k0;  // required when A is not Hurwitz
};

/// Stabilizing CARE solution by Newton-Kleinman iteration: each step solves
/// one Lyapunov equation for the current closed loop, starting from K0 = 0
/// when A is already Hurwitz.
Mat solve_care(const Mat& a, const Mat& b, const Mat& q, const Mat& r,
               const CareOptions& opts = {});

/// LQR design: K = R^-1 B^T P and the closed-loop matrix A_h = A - B K.
struct LqrDesign {
  Mat q;
  Mat r;
  Mat p_care;
  Mat k;
  Mat a_h;
};

LqrDesign design_lqr(const PlantModel& model, const Mat& q, const Mat& r);

/// theta* with A_true + B_true theta* = A_h (the matching identity is the
/// authoritative sign convention). Least squares when B is tall; the residual
/// is verified and a span violation throws.
Mat build_theta_star(const Mat& a_true, const Mat& b_true, const Mat& a_h);

using TargetFn = std::function<Mat(double t)>;

struct ReferenceTrajectory {
  enum class Source { synthetic, csv };
  std::vector<double> times;
  std::vector<Mat> x_r;
  std::vector<Mat> u_r;
  Source source = Source::synthetic;

  std::size_t size() const { return times.size(); }
};

/// Simulates the nominal plant under u = -K (x - x_target) + u_ff with
/// feedforward u_ff = B^-1 (dx_target - A x_target - D); dx_target is a
/// forward difference on the grid. The achieved (x, u) become (x_r, u_r).
ReferenceTrajectory generate_reference(const LqrDesign& design, const PlantModel& model,
                                       const TargetFn& target, double horizon, double dt);

/// Regressor Phi = [u_r - theta*_r x_r + f1r(x_r); phi(x); x], a column of
/// length m + k + n. f1r defaults to zero (linear reference runs).
Mat build_regressor(const Mat& u_r, const Mat& x_r, const Mat& x, const NonlinearBasis& basis,
                    const Mat& theta_star_r,
                    const std::function<Mat(const Mat&)>* f1r = nullptr);

/// Online estimator state: theta_hat = [Lambda^-1-hat | -(Lambda^-1 theta_lr)-hat | theta*-hat]
/// with column-block widths (m, k, n), plus the fixed design quantities the
/// update law needs.
struct AdaptiveController {
  Mat theta_hat;    // m x (m + k + n)
  Mat gamma;        // m x m adaptation gain
  double sigma;     // leakage coefficient, >= 0
  Mat p_lyap;       // n x n Lyapunov solution for A_h
  Mat q_lyap;       // n x n
  NonlinearBasis basis;
  Mat b_r;          // nominal input matrix
  Mat theta_star_r; // nominal matching gain, fixed part of the regressor
};

/// Table-style physical initialization mapped into the concatenated estimate:
/// [lambda0^-1 | -lambda0^-1 theta_lr0 | theta_star0]. Pass no middle block
/// for the empty basis.
Mat theta_from_blocks(const Mat& lambda0, const std::optional<Mat>& theta_lr0,
                      const Mat& theta_star0);

/// Builds the controller, solving the Lyapunov equation for A_h and checking
/// the block widths of theta0 against (m, k, n). theta_star_r is the nominal
/// matching gain used in the regressor's feedforward block.
AdaptiveController make_adaptive_controller(const Mat& a_h, const Mat& b_r,
                                            const NonlinearBasis& basis, const Mat& theta0,
                                            const Mat& theta_star_r, const Mat& gamma,
                                            double sigma, const Mat& q_lyap);

/// u = theta_hat Phi.
Mat adaptive_control_input(const AdaptiveController& ctrl, const Mat& phi);

/// Explicit Euler step of the parameter law
///   dtheta/dt = -Gamma B_r^T P e Phi^T - sigma theta.
AdaptiveController adaptive_update(const AdaptiveController& ctrl, const Mat& e, const Mat& phi,
                                   double dt);

struct AdaptiveRunOptions {
  std::optional<Mat> x0;          // defaults to x_r(0)
  std::optional<Mat> true_theta;  // enables the full Lyapunov diagnostic V(t)
  std::optional<Mat> lambda;      // true Lambda, for the V weight Lambda^T Gamma^-1
  bool freeze_updates = false;    // diagnostics-only runs with theta_hat pinned
};

/// Closed-loop adaptive tracking of the recorded reference on the true plant.
/// Per sample: e = x - x_r, Phi, u = theta_hat Phi, record, RK4 state advance,
/// Euler parameter update. explicit_d requires the sine_plus_constant basis
/// (the constant channel absorbs B^-1 D-tilde). The recorded V(t) is
/// diagnostic only; the controller never reads the true parameters.
TrajectoryRecord run_adaptive_tracking(const PlantModel& model_true, const PerturbationSpec& spec,
                                       const ReferenceTrajectory& ref,
                                       const AdaptiveController& ctrl0, bool explicit_d,
                                       const AdaptiveRunOptions& opts = {});

}  // namespace ghxctl

#endif  // GHXCTL_CONTROL_HPP
