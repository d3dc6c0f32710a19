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

#ifndef GHXCTL_ANALYSIS_HPP
#define GHXCTL_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "ghxctl/mat.hpp"
#include "ghxctl/plant.hpp"

namespace ghxctl {

struct ControllabilityReport {
  Mat c_matrix;                        // [B  AB  ...  A^{n-1}B]
  std::vector<double> singular_values; // descending
  std::size_t rank;                    // values above 1e-10 * largest
  double condition_number;             // largest / smallest nonzero
};

ControllabilityReport controllability_report(const Mat& a, const Mat& b);

/// Per-state mean absolute error over the sample series.
std::vector<double> mae(const std::vector<Mat>& e_series);

/// Per-state integral of t * |e(t)|, trapezoidal rule on a uniform grid.
std::vector<double> itae(const std::vector<Mat>& e_series, const std::vector<double>& times);

/// Integral of the l-norm (l in {1,2}) of the input, trapezoidal rule.
double control_effort(const std::vector<Mat>& u_series, const std::vector<double>& times, int l);

/// Savitzky-Golay smoothing: local least-squares polynomial of the given
/// order over an odd window. Edges use an asymmetric fit on the truncated
/// window rather than padding.
std::vector<double> savgol_filter(const std::vector<double>& series, std::size_t window,
                                  std::size_t poly_order);

/// V(t) = e^T P e, plus trace(theta_tilde^T W theta_tilde) when the true
/// parameter block is supplied (W defaults to the identity).
std::vector<double> lyapunov_trace(const TrajectoryRecord& record, const Mat& p,
                                   const Mat* true_theta = nullptr,
                                   const Mat* weight = nullptr);

/// Raw per-run tracking metrics as reported in the summaries.
struct MetricsSummary {
  std::vector<double> mae;   // per state
  std::vector<double> itae;  // per state
  double ce_l1 = 0.0;
  double ce_l2 = 0.0;
  // ratios to a baseline run; empty until normalized
  std::vector<double> mae_norm;
  std::vector<double> itae_norm;
  double ce_l1_norm = 0.0;
  double ce_l2_norm = 0.0;
};

}  // namespace ghxctl

#endif  // GHXCTL_ANALYSIS_HPP
