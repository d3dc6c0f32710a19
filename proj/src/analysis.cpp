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

#include "ghxctl/analysis.hpp"

#include <cmath>
#include <string>

namespace ghxctl {

ControllabilityReport controllability_report(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols()) throw NumericError("controllability_report: A must be square");
  if (b.rows() != a.rows()) throw NumericError("controllability_report: B rows must match A");
  const std::size_t n = a.rows(), m = b.cols();

  Mat c(n, n * m);
  Mat block = b;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) c(i, p * m + j) = block(i, j);
    if (p + 1 < n) block = mat_mul(a, block);
  }

  ControllabilityReport rep{c, svd_values(c), 0, 1.0};
  const double thresh = 1e-10 * rep.singular_values.front();
  double smallest_nonzero = 0.0;
  for (double s : rep.singular_values) {
    if (s > thresh) {
      ++rep.rank;
      smallest_nonzero = s;
    }
  }
  rep.condition_number =
      rep.rank > 0 ? rep.singular_values.front() / smallest_nonzero : 1.0;
  return rep;
}

std::vector<double> mae(const std::vector<Mat>& e_series) {
  if (e_series.empty()) throw NumericError("mae: empty series");
  const std::size_t n = e_series.front().rows();
  std::vector<double> out(n, 0.0);
  for (const Mat& e : e_series)
    for (std::size_t i = 0; i < n; ++i) out[i] += std::abs(e(i, 0));
  for (double& v : out) v /= static_cast<double>(e_series.size());
  return out;
}

std::vector<double> itae(const std::vector<Mat>& e_series, const std::vector<double>& times) {
  if (e_series.empty()) throw NumericError("itae: empty series");
  if (e_series.size() != times.size()) throw NumericError("itae: series/times length mismatch");
  const std::size_t n = e_series.front().rows();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double dt = times[k + 1] - times[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double f0 = times[k] * std::abs(e_series[k](i, 0));
      const double f1 = times[k + 1] * std::abs(e_series[k + 1](i, 0));
      out[i] += 0.5 * dt * (f0 + f1);
    }
  }
  return out;
}

double control_effort(const std::vector<Mat>& u_series, const std::vector<double>& times, int l) {
  if (u_series.empty()) throw NumericError("control_effort: empty series");
  if (u_series.size() != times.size())
    throw NumericError("control_effort: series/times length mismatch");
  if (l != 1 && l != 2) throw NumericError("control_effort: norm order must be 1 or 2");
  auto norm = [l](const Mat& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
      s += (l == 1) ? std::abs(u(i, 0)) : u(i, 0) * u(i, 0);
    }
    return (l == 1) ? s : std::sqrt(s);
  };
  double out = 0.0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    out += 0.5 * (times[k + 1] - times[k]) * (norm(u_series[k]) + norm(u_series[k + 1]));
  }
  return out;
}

namespace {

// Least-squares value at `eval` (offset within [lo, hi]) of a degree-p
// polynomial fit through series[lo..hi]. Offsets are scaled to [-1, 1] to
// keep the normal equations well conditioned.
double local_poly_value(const std::vector<double>& series, std::size_t lo, std::size_t hi,
                        std::size_t eval, std::size_t p) {
  const std::size_t len = hi - lo + 1;
  p = std::min(p, len - 1);  // truncated edge windows cannot support the full order
  const double scale = std::max<double>(1.0, static_cast<double>(len - 1));
  Mat gram(p + 1, p + 1);
  Mat rhs(p + 1, 1);
  for (std::size_t idx = lo; idx <= hi; ++idx) {
    const double t = (static_cast<double>(idx) - static_cast<double>(eval)) / scale;
    double powa = 1.0;
    std::vector<double> powers(p + 1);
    for (std::size_t r = 0; r <= p; ++r) {
      powers[r] = powa;
      powa *= t;
    }
    for (std::size_t r = 0; r <= p; ++r) {
      rhs(r, 0) += powers[r] * series[idx];
      for (std::size_t c = 0; c <= p; ++c) gram(r, c) += powers[r] * powers[c];
    }
  }
  return solve_linear(gram, rhs)(0, 0);  // value at offset 0
}

}  // namespace

std::vector<double> savgol_filter(const std::vector<double>& series, std::size_t window,
                                  std::size_t poly_order) {
  if (window % 2 == 0) throw NumericError("savgol_filter: window must be odd");
  if (window <= poly_order) throw NumericError("savgol_filter: window must exceed poly_order");
  if (series.size() < window) {
    throw NumericError("savgol_filter: series length " + std::to_string(series.size()) +
                       " shorter than window " + std::to_string(window));
  }
  const std::size_t nn = series.size();
  const std::size_t h = window / 2;
  std::vector<double> out(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    const std::size_t lo = (i >= h) ? i - h : 0;
    const std::size_t hi = std::min(nn - 1, i + h);
    out[i] = local_poly_value(series, lo, hi, i, poly_order);
  }
  return out;
}

std::vector<double> lyapunov_trace(const TrajectoryRecord& record, const Mat& p,
                                   const Mat* true_theta, const Mat* weight) {
  std::vector<double> out;
  out.reserve(record.size());
  for (std::size_t k = 0; k < record.size(); ++k) {
    const Mat& e = record.e[k];
    double v = mat_mul(transpose(e), mat_mul(p, e))(0, 0);
    if (true_theta && k < record.theta.size()) {
      Mat tilde = record.theta[k] - *true_theta;
      Mat wt = weight ? mat_mul(*weight, tilde) : tilde;
      const Mat prod = mat_mul(transpose(tilde), wt);
      for (std::size_t i = 0; i < prod.rows(); ++i) v += prod(i, i);
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace ghxctl
