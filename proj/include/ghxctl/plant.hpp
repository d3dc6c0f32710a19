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

#ifndef GHXCTL_PLANT_HPP
#define GHXCTL_PLANT_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "ghxctl/mat.hpp"

namespace ghxctl {

enum class BasisKind { none, sine, sine_plus_constant };

/// Known nonlinear regressor phi(x): empty, elementwise sin(x), or sin(x)
/// followed by the constant 1 (the constant channel absorbs matched offset
/// uncertainty when it is handled explicitly).
struct NonlinearBasis {
  BasisKind kind = BasisKind::none;

  std::size_t dim(std::size_t n) const {
    switch (kind) {
      case BasisKind::none: return 0;
      case BasisKind::sine: return n;
      case BasisKind::sine_plus_constant: return n + 1;
    }
    return 0;
  }
  /// Appends phi(x) to `out`.
  void append(const Mat& x, std::vector<double>& out) const;
};

struct DisturbanceSignal {
  enum class Kind { none, sinusoid, chirp };
  Kind kind = Kind::none;
  double amplitude = 0.0;
  double f0 = 0.0;      // Hz
  double f1 = 0.0;      // Hz, chirp end frequency
  double horizon = 0.0; // s, chirp sweep length

  /// m x 1 matched-disturbance sample; every component obeys |d_i| <= amplitude.
  Mat value(double t, std::size_t m) const;
};

/// Affine state-space plant dx/dt = A x + B u + D plus a declared nonlinear
/// basis. B must be invertible (smallest singular value > 1e-12).
struct PlantModel {
  Mat a;
  Mat b;
  Mat d;
  NonlinearBasis basis;

  PlantModel(Mat a_in, Mat b_in, Mat d_in, NonlinearBasis basis_in = {});

  std::size_t n() const { return a.rows(); }
  std::size_t m() const { return b.cols(); }
};

/// Everything that turns the nominal model into the "true" plant: the 4.2-style
/// uncertainty multiplier, control effectiveness Lambda, the matched
/// nonlinearity gain, the offset error, and an additive matched disturbance.
struct PerturbationSpec {
  double multiplier = 1.0;
  Mat lambda;        // m x m
  Mat theta_lr;      // m x n, gain on sin(x) in B-span coordinates
  Mat d_tilde;       // n x 1, offset error (filled by apply_uncertainty)
  DisturbanceSignal disturbance;
  /// When set, lambda was declared directly and must be symmetric positive
  /// definite with spectral norm <= 1; the multiplier recipe is bypassed.
  bool lambda_declared = false;

  static PerturbationSpec none(std::size_t n, std::size_t m);
};

struct PerturbedPlant {
  PlantModel model;       // the "true" plant
  PerturbationSpec spec;  // echo with d_tilde and implied lambda filled
};

/// The identified GHX model (two states, two actuators).
PlantModel nominal_ghx_model();

/// Applies the uncertainty recipe: a[1][0], b[1][0], b[1][1] are divided by
/// the multiplier and d[1] is multiplied by it; other entries are unchanged.
/// The returned spec echoes d_tilde = d_pert - d_nominal and the implied
/// Lambda = B_r^-1 B_pert. With lambda_declared, B_pert = B_r Lambda instead
/// (multiplier must be 1).
PerturbedPlant apply_uncertainty(const PlantModel& nominal, const PerturbationSpec& spec);

/// dx/dt of the true plant:
///   A x + B_r Lambda (u + Lambda^-1 theta_lr sin(x) + Lambda^-1 d(t)) + D.
/// With basis none, theta_lr = 0 and no disturbance this is the affine plant.
Mat true_plant_derivative(const PlantModel& model, const PerturbationSpec& spec,
                          const Mat& x, const Mat& u, double t);

using DerivativeFn = std::function<Mat(double t, const Mat& x)>;

/// Classical fourth-order Runge-Kutta step.
Mat rk4_step(const DerivativeFn& f, const Mat& x, double t, double dt);

/// Per-sample controller output. `e` and `v` are diagnostics recorded next to
/// the trajectory; controllers that have no notion of them return zeros.
struct ControllerStep {
  Mat u;
  Mat e;
  double v = 0.0;
};

using ControlLaw = std::function<ControllerStep(double t, std::size_t index, const Mat& x)>;

/// Time-indexed samples of one closed-loop run.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Mat> x;
  std::vector<Mat> u;
  std::vector<Mat> e;
  std::vector<double> v;
  std::vector<Mat> theta;  // parameter-estimate snapshots; empty for non-adaptive runs

  std::size_t size() const { return times.size(); }
};

/// Fixed-step closed loop: the control law is queried once per sample and the
/// input is held across the RK4 stages. Aborts when the state norm passes 1e9.
TrajectoryRecord simulate(const PlantModel& model, const PerturbationSpec& spec,
                          const ControlLaw& law, double horizon, double dt,
                          const Mat* x0 = nullptr);

}  // namespace ghxctl

#endif  // GHXCTL_PLANT_HPP
