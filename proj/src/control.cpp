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

#include "ghxctl/control.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ghxctl/analysis.hpp"

namespace ghxctl {
namespace {

Mat vec_colmajor(const Mat& a) {
  Mat v(a.rows() * a.cols(), 1);
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) v(j * a.rows() + i, 0) = a(i, j);
  return v;
}

Mat unvec_colmajor(const Mat& v, std::size_t n) {
  Mat a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = v(j * n + i, 0);
  return a;
}

double care_residual(const Mat& a, const Mat& b, const Mat& q, const Mat& r, const Mat& p) {
  const Mat bt_p = mat_mul(transpose(b), p);
  const Mat res = mat_mul(transpose(a), p) + mat_mul(p, a) -
                  mat_mul(transpose(bt_p), solve_linear(r, bt_p)) + q;
  return frobenius_norm(res);
}

}  // namespace

Mat solve_lyapunov(const Mat& a_h, const Mat& q_lyap) {
  if (a_h.rows() != a_h.cols()) throw NumericError("solve_lyapunov: A_h must be square");
  if (!is_symmetric(q_lyap, 1e-12) || !is_positive_definite(q_lyap)) {
    throw NumericError("solve_lyapunov: Q_lyap must be symmetric positive definite");
  }
  const std::size_t n = a_h.rows();
  const Mat at = transpose(a_h);
  const Mat eye = Mat::identity(n);
  const Mat op = kron(eye, at) + kron(at, eye);
  const Mat p_vec = solve_linear(op, -1.0 * vec_colmajor(q_lyap));
  Mat p = unvec_colmajor(p_vec, n);
  p = 0.5 * (p + transpose(p));

  const double residual = frobenius_norm(mat_mul(p, a_h) + mat_mul(at, p) + q_lyap);
  const double tol = 1e-10 * std::max(1.0, frobenius_norm(q_lyap));
  if (residual > tol) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "solve_lyapunov: residual %.3e exceeds %.3e (A_h likely not Hurwitz)",
                  residual, tol);
    throw NumericError(msg);
  }
  if (!is_positive_definite(p)) {
    throw NumericError("solve_lyapunov: indefinite solution, A_h is not Hurwitz");
  }
  return p;
}

Mat solve_care(const Mat& a, const Mat& b, const Mat& q, const Mat& r,
               const CareOptions& opts) {
  if (!is_symmetric(q, 1e-10)) throw NumericError("solve_care: Q must be symmetric");
  if (!is_symmetric(r, 1e-10) || !is_positive_definite(r)) {
    throw NumericError("solve_care: R must be symmetric positive definite");
  }
  const auto report = controllability_report(a, b);
  if (report.rank < a.rows()) {
    throw NumericError("solve_care: (A, B) not controllable (rank " +
                       std::to_string(report.rank) + " of " + std::to_string(a.rows()) + ")");
  }

  Mat k = Mat::zero(b.cols(), a.rows());
  if (opts.stabilizing_k0) {
    k = *opts.stabilizing_k0;
  } else if (!is_hurwitz(a)) {
    throw NumericError("solve_care: A is not Hurwitz and no stabilizing K0 was supplied");
  }

  Mat p = Mat::zero(a.rows(), a.rows());
  Mat best = p;
  double best_residual = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Mat a_cl = a - mat_mul(b, k);
    if (!is_hurwitz(a_cl)) {
      throw NumericError("solve_care: Newton iterate lost stability at iteration " +
                         std::to_string(it));
    }
    Mat q_step = q + mat_mul(transpose(k), mat_mul(r, k));
    q_step = 0.5 * (q_step + transpose(q_step));
    p = solve_lyapunov(a_cl, q_step);
    k = solve_linear(r, mat_mul(transpose(b), p));
    const double residual = care_residual(a, b, q, r, p);
    if (residual < best_residual) {
      best_residual = residual;
      best = p;
      stalled = 0;
    } else if (++stalled >= 2) {
      break;  // at the floor; quadratic convergence is long over
    }
  }
  if (best_residual <= opts.tolerance) return best;
  char msg[128];
  std::snprintf(msg, sizeof msg, "solve_care: stalled with residual %.3e above tolerance %.3e",
                best_residual, opts.tolerance);
  throw NumericError(msg);
}

LqrDesign design_lqr(const PlantModel& model, const Mat& q, const Mat& r) {
  const Mat p = solve_care(model.a, model.b, q, r);
  const Mat k = solve_linear(r, mat_mul(transpose(model.b), p));
  const Mat a_h = model.a - mat_mul(model.b, k);
  if (!is_hurwitz(a_h)) throw NumericError("design_lqr: closed loop is not Hurwitz");
  const double res = care_residual(model.a, model.b, q, r, p);
  if (res > 1e-8) {
    throw NumericError("design_lqr: CARE residual " + std::to_string(res) + " exceeds 1e-8");
  }
  return LqrDesign{q, r, p, k, a_h};
}

Mat build_theta_star(const Mat& a_true, const Mat& b_true, const Mat& a_h) {
  const Mat gap = a_h - a_true;
  Mat theta_star(b_true.cols(), a_true.cols());
  if (b_true.rows() == b_true.cols()) {
    theta_star = solve_linear(b_true, gap);
  } else {
    // tall B: least squares via the normal equations
    const Mat bt = transpose(b_true);
    theta_star = solve_linear(mat_mul(bt, b_true), mat_mul(bt, gap));
  }
  const double residual = frobenius_norm(a_true + mat_mul(b_true, theta_star) - a_h);
  if (residual > 1e-8) {
    throw NumericError("build_theta_star: matching residual " + std::to_string(residual) +
                       " exceeds 1e-8 (A_h - A outside span of B)");
  }
  return theta_star;
}

ReferenceTrajectory generate_reference(const LqrDesign& design, const PlantModel& model,
                                       const TargetFn& target, double horizon, double dt) {
  PerturbationSpec none = PerturbationSpec::none(model.n(), model.m());
  ReferenceTrajectory ref;
  auto law = [&](double t, std::size_t, const Mat& x) -> ControllerStep {
    const Mat xt = target(t);
    const Mat xt_next = target(std::min(t + dt, horizon));
    const Mat dxt = (1.0 / dt) * (xt_next - xt);
    const Mat u_ff = solve_linear(model.b, dxt - mat_mul(model.a, xt) - model.d);
    const Mat u = u_ff - mat_mul(design.k, x - xt);
    return ControllerStep{u, x - xt, 0.0};
  };
  const Mat x0 = target(0.0);
  TrajectoryRecord rec = simulate(model, none, law, horizon, dt, &x0);
  ref.times = std::move(rec.times);
  ref.x_r = std::move(rec.x);
  ref.u_r = std::move(rec.u);
  ref.source = ReferenceTrajectory::Source::synthetic;
  return ref;
}

Mat build_regressor(const Mat& u_r, const Mat& x_r, const Mat& x, const NonlinearBasis& basis,
                    const Mat& theta_star_r, const std::function<Mat(const Mat&)>* f1r) {
  const std::size_t m = u_r.rows(), n = x.rows();
  std::vector<double> entries;
  entries.reserve(m + basis.dim(n) + n);
  Mat ff = u_r - mat_mul(theta_star_r, x_r);
  if (f1r && *f1r) ff = ff + (*f1r)(x_r);
  for (std::size_t i = 0; i < m; ++i) entries.push_back(ff(i, 0));
  basis.append(x, entries);
  for (std::size_t i = 0; i < n; ++i) entries.push_back(x(i, 0));
  const std::size_t len = entries.size();
  return Mat(len, 1, std::move(entries));
}

Mat theta_from_blocks(const Mat& lambda0, const std::optional<Mat>& theta_lr0,
                      const Mat& theta_star0) {
  const std::size_t m = lambda0.rows();
  const std::size_t k = theta_lr0 ? theta_lr0->cols() : 0;
  const std::size_t n = theta_star0.cols();
  const Mat lambda_inv = solve_linear(lambda0, Mat::identity(m));
  Mat theta(m, m + k + n);
  if (theta_lr0) {
    const Mat mid = -1.0 * mat_mul(lambda_inv, *theta_lr0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) theta(i, m + j) = mid(i, j);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) theta(i, j) = lambda_inv(i, j);
    for (std::size_t j = 0; j < n; ++j) theta(i, m + k + j) = theta_star0(i, j);
  }
  return theta;
}

AdaptiveController make_adaptive_controller(const Mat& a_h, const Mat& b_r,
                                            const NonlinearBasis& basis, const Mat& theta0,
                                            const Mat& theta_star_r, const Mat& gamma,
                                            double sigma, const Mat& q_lyap) {
  const std::size_t n = a_h.rows();
  const std::size_t m = b_r.cols();
  const std::size_t k = basis.dim(n);
  if (theta0.rows() != m || theta0.cols() != m + k + n) {
    throw NumericError("make_adaptive_controller: theta0 must be " + std::to_string(m) + "x" +
                       std::to_string(m + k + n) + " for block widths (m, k, n)");
  }
  if (theta_star_r.rows() != m || theta_star_r.cols() != n) {
    throw NumericError("make_adaptive_controller: theta_star_r must be m x n");
  }
  if (sigma < 0.0) throw NumericError("make_adaptive_controller: sigma must be >= 0");
  AdaptiveController ctrl{theta0,  gamma, sigma, solve_lyapunov(a_h, q_lyap),
                          q_lyap, basis, b_r,   theta_star_r};
  return ctrl;
}

Mat adaptive_control_input(const AdaptiveController& ctrl, const Mat& phi) {
  if (phi.rows() != ctrl.theta_hat.cols()) {
    throw NumericError("adaptive_control_input: Phi length " + std::to_string(phi.rows()) +
                       " != " + std::to_string(ctrl.theta_hat.cols()));
  }
  return mat_mul(ctrl.theta_hat, phi);
}

AdaptiveController adaptive_update(const AdaptiveController& ctrl, const Mat& e, const Mat& phi,
                                   double dt) {
  if (!(dt > 0.0)) throw NumericError("adaptive_update: dt must be positive");
  AdaptiveController out = ctrl;
  // -Gamma B_r^T P e Phi^T - sigma theta, integrated with explicit Euler
  const Mat drive = mat_mul(ctrl.gamma, mat_mul(transpose(ctrl.b_r), mat_mul(ctrl.p_lyap, e)));
  for (std::size_t i = 0; i < out.theta_hat.rows(); ++i) {
    for (std::size_t j = 0; j < out.theta_hat.cols(); ++j) {
      const double dot = -drive(i, 0) * phi(j, 0) - ctrl.sigma * ctrl.theta_hat(i, j);
      out.theta_hat(i, j) += dt * dot;
      if (!std::isfinite(out.theta_hat(i, j))) {
        throw NumericError("adaptive_update: non-finite estimate (||e|| = " +
                           std::to_string(frobenius_norm(e)) + ", ||Phi|| = " +
                           std::to_string(frobenius_norm(phi)) + ")");
      }
    }
  }
  return out;
}

TrajectoryRecord run_adaptive_tracking(const PlantModel& model_true, const PerturbationSpec& spec,
                                       const ReferenceTrajectory& ref,
                                       const AdaptiveController& ctrl0, bool explicit_d,
                                       const AdaptiveRunOptions& opts) {
  if (ref.size() < 2) throw NumericError("run_adaptive_tracking: reference too short");
  if (explicit_d && ctrl0.basis.kind != BasisKind::sine_plus_constant) {
    throw NumericError(
        "run_adaptive_tracking: explicit_d requires the sine_plus_constant basis");
  }
  const std::size_t samples = ref.size();
  const double dt = ref.times[1] - ref.times[0];

  // V(t) weight Lambda^T Gamma^-1, available only when the truth is known
  std::optional<Mat> v_weight;
  if (opts.true_theta) {
    const Mat lambda = opts.lambda ? *opts.lambda : spec.lambda;
    v_weight = mat_mul(transpose(lambda),
                       solve_linear(ctrl0.gamma, Mat::identity(ctrl0.gamma.rows())));
  }

  AdaptiveController ctrl = ctrl0;
  Mat x = opts.x0 ? *opts.x0 : ref.x_r.front();
  TrajectoryRecord rec;
  rec.times.reserve(samples);
  rec.x.reserve(samples);
  rec.u.reserve(samples);
  rec.e.reserve(samples);
  rec.v.reserve(samples);
  rec.theta.reserve(samples);

  for (std::size_t i = 0; i < samples; ++i) {
    const double t = ref.times[i];
    const Mat e = x - ref.x_r[i];
    const Mat phi = build_regressor(ref.u_r[i], ref.x_r[i], x, ctrl.basis, ctrl.theta_star_r);
    const Mat u = adaptive_control_input(ctrl, phi);

    double v = mat_mul(transpose(e), mat_mul(ctrl.p_lyap, e))(0, 0);
    if (opts.true_theta) {
      const Mat tilde = ctrl.theta_hat - *opts.true_theta;
      const Mat prod = mat_mul(transpose(tilde), mat_mul(*v_weight, tilde));
      for (std::size_t r = 0; r < prod.rows(); ++r) v += prod(r, r);
    }

    rec.times.push_back(t);
    rec.x.push_back(x);
    rec.u.push_back(u);
    rec.e.push_back(e);
    rec.v.push_back(v);
    rec.theta.push_back(ctrl.theta_hat);

    if (i + 1 == samples) break;
    x = rk4_step([&](double tt, const Mat& xx) {
      return true_plant_derivative(model_true, spec, xx, u, tt);
    }, x, t, dt);
    if (frobenius_norm(x) > 1e9) {
      throw NumericError("run_adaptive_tracking: state diverged (||x|| > 1e9) at t = " +
                         std::to_string(t + dt));
    }
    if (!opts.freeze_updates) ctrl = adaptive_update(ctrl, e, phi, dt);
  }
  return rec;
}

}  // namespace ghxctl
