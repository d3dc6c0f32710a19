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

#include "ghxctl/plant.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ghxctl {

void NonlinearBasis::append(const Mat& x, std::vector<double>& out) const {
  if (kind == BasisKind::none) return;
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(std::sin(x(i, 0)));
  if (kind == BasisKind::sine_plus_constant) out.push_back(1.0);
}

Mat DisturbanceSignal::value(double t, std::size_t m) const {
  Mat d(m, 1);
  if (kind == Kind::none || amplitude == 0.0) return d;
  double s = 0.0;
  if (kind == Kind::sinusoid) {
    s = amplitude * std::sin(2.0 * std::numbers::pi * f0 * t);
  } else {
    // linear chirp from f0 to f1 over the configured horizon
    const double span = horizon > 0.0 ? horizon : 1.0;
    const double phase = f0 * t + (f1 - f0) * t * t / (2.0 * span);
    s = amplitude * std::sin(2.0 * std::numbers::pi * phase);
  }
  for (std::size_t i = 0; i < m; ++i) d(i, 0) = s;
  return d;
}

PlantModel::PlantModel(Mat a_in, Mat b_in, Mat d_in, NonlinearBasis basis_in)
    : a(std::move(a_in)), b(std::move(b_in)), d(std::move(d_in)), basis(basis_in) {
  if (a.rows() != a.cols()) throw NumericError("PlantModel: A must be square");
  if (b.rows() != a.rows()) throw NumericError("PlantModel: B row count must match A");
  if (d.rows() != a.rows() || d.cols() != 1) throw NumericError("PlantModel: D must be n x 1");
  if (b.rows() != b.cols()) throw NumericError("PlantModel: B must be square for this plant family");
  const auto sv = svd_values(b);
  if (sv.back() <= 1e-12) {
    throw NumericError("PlantModel: B is singular to tolerance (smallest singular value " +
                       std::to_string(sv.back()) + ")");
  }
}

PerturbationSpec PerturbationSpec::none(std::size_t n, std::size_t m) {
  PerturbationSpec s{1.0, Mat::identity(m), Mat::zero(m, n), Mat::zero(n, 1), {}, false};
  return s;
}

PlantModel nominal_ghx_model() {
  Mat a{{-1.27006037e-03, 0.0},
        {-1.67511974e+00, -4.89615042e-03}};
  Mat b{{-0.00083076, 0.00462962},
        {0.51405729, 0.57604899}};
  Mat d = Mat::col({-0.0022987, 0.68611759});
  PlantModel model(std::move(a), std::move(b), std::move(d));
  if (!is_hurwitz(model.a)) throw NumericError("nominal_ghx_model: A is not Hurwitz");
  return model;
}

PerturbedPlant apply_uncertainty(const PlantModel& nominal, const PerturbationSpec& spec) {
  if (spec.multiplier < 1.0) {
    throw NumericError("apply_uncertainty: multiplier must be >= 1, got " +
                       std::to_string(spec.multiplier));
  }
  Mat a = nominal.a;
  Mat b = nominal.b;
  Mat d = nominal.d;
  PerturbationSpec echo = spec;

  if (spec.lambda_declared) {
    if (spec.multiplier != 1.0) {
      throw NumericError("apply_uncertainty: declared lambda requires multiplier = 1");
    }
    if (!is_symmetric(spec.lambda, 1e-12)) {
      throw NumericError("apply_uncertainty: declared lambda must be symmetric");
    }
    if (spectral_norm(spec.lambda) > 1.0 + 1e-12) {
      throw NumericError("apply_uncertainty: declared lambda must have spectral norm <= 1");
    }
    if (!is_positive_definite(spec.lambda)) {
      throw NumericError("apply_uncertainty: declared lambda must be positive definite");
    }
    b = mat_mul(nominal.b, spec.lambda);
  } else {
    // uncertain entries: A[1][0], B[1][0], B[1][1], D[1]
    a(1, 0) /= spec.multiplier;
    b(1, 0) /= spec.multiplier;
    b(1, 1) /= spec.multiplier;
    d(1, 0) *= spec.multiplier;
    echo.lambda = solve_linear(nominal.b, b);  // implied Lambda = B_r^-1 B_pert
  }
  echo.d_tilde = d - nominal.d;

  NonlinearBasis basis = nominal.basis;
  if (max_abs(echo.theta_lr) > 0.0 && basis.kind == BasisKind::none) {
    basis.kind = BasisKind::sine;
  }
  PlantModel truth(std::move(a), std::move(b), std::move(d), basis);
  return PerturbedPlant{std::move(truth), std::move(echo)};
}

Mat true_plant_derivative(const PlantModel& model, const PerturbationSpec& spec,
                          const Mat& x, const Mat& u, double t) {
  Mat dx = mat_mul(model.a, x) + mat_mul(model.b, u) + model.d;
  const bool has_nl = model.basis.kind != BasisKind::none && max_abs(spec.theta_lr) > 0.0;
  const bool has_dist = spec.disturbance.kind != DisturbanceSignal::Kind::none;
  if (has_nl || has_dist) {
    // B_r Lambda (Lambda^-1 (...)) = B_r (...), with B_r = B_true Lambda^-1
    const Mat b_r = transpose(solve_linear(transpose(spec.lambda), transpose(model.b)));
    if (has_nl) {
      Mat sx(x.rows(), 1);
      for (std::size_t i = 0; i < x.rows(); ++i) sx(i, 0) = std::sin(x(i, 0));
      dx = dx + mat_mul(b_r, mat_mul(spec.theta_lr, sx));
    }
    if (has_dist) {
      dx = dx + mat_mul(b_r, spec.disturbance.value(t, model.m()));
    }
  }
  for (std::size_t i = 0; i < dx.rows(); ++i) {
    if (!std::isfinite(dx(i, 0))) {
      throw NumericError("true_plant_derivative: non-finite derivative at t = " +
                         std::to_string(t) + ", x[0] = " + std::to_string(x(0, 0)));
    }
  }
  return dx;
}

Mat rk4_step(const DerivativeFn& f, const Mat& x, double t, double dt) {
  if (!(dt > 0.0)) throw NumericError("rk4_step: dt must be positive");
  const Mat k1 = f(t, x);
  const Mat k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
  const Mat k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
  const Mat k4 = f(t + dt, x + dt * k3);
  Mat out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out.check_finite("rk4_step");
  return out;
}

TrajectoryRecord simulate(const PlantModel& model, const PerturbationSpec& spec,
                          const ControlLaw& law, double horizon, double dt,
                          const Mat* x0) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw NumericError("simulate: horizon and dt must be positive");
  }
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / dt));
  if (steps < 1) throw NumericError("simulate: horizon/dt must yield at least 2 samples");

  Mat x = x0 ? *x0 : solve_linear(model.a, -1.0 * model.d);  // default: open-loop equilibrium
  TrajectoryRecord rec;
  rec.times.reserve(steps + 1);
  rec.x.reserve(steps + 1);
  rec.u.reserve(steps + 1);
  rec.e.reserve(steps + 1);
  rec.v.reserve(steps + 1);

  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    ControllerStep step = law(t, i, x);
    rec.times.push_back(t);
    rec.x.push_back(x);
    rec.u.push_back(step.u);
    rec.e.push_back(step.e.rows() == model.n() ? step.e : Mat::zero(model.n(), 1));
    rec.v.push_back(step.v);
    if (i == steps) break;
    const Mat u = step.u;
    x = rk4_step([&](double tt, const Mat& xx) {
      return true_plant_derivative(model, spec, xx, u, tt);
    }, x, t, dt);
    if (frobenius_norm(x) > 1e9) {
      throw NumericError("simulate: state diverged (||x|| > 1e9) at t = " + std::to_string(t + dt));
    }
  }
  return rec;
}

}  // namespace ghxctl
