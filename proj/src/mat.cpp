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

#include "ghxctl/mat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ghxctl {
namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw NumericError(msg);
}

std::string dim_str(const Mat& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), e_(rows * cols, 0.0) {
  require(rows >= 1 && cols >= 1, "Mat: rows and cols must be >= 1");
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
  require(rows >= 1 && cols >= 1, "Mat: rows and cols must be >= 1");
  require(e_.size() == rows * cols, "Mat: entry count " + std::to_string(e_.size()) +
                                        " does not match " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
  check_finite("Mat constructor");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  require(rows_ >= 1 && cols_ >= 1, "Mat: rows and cols must be >= 1");
  e_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Mat: ragged initializer");
    e_.insert(e_.end(), r.begin(), r.end());
  }
  check_finite("Mat constructor");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::zero(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }

Mat Mat::col(std::initializer_list<double> entries) {
  return Mat(entries.size(), 1, std::vector<double>(entries));
}

void Mat::check_finite(const char* context) const {
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (!std::isfinite(e_[i])) {
      throw NumericError(std::string(context) + ": non-finite entry at flat index " +
                         std::to_string(i));
    }
  }
}

Mat operator+(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "add: dimension mismatch " + dim_str(a) + " vs " + dim_str(b));
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Mat operator-(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "sub: dimension mismatch " + dim_str(a) + " vs " + dim_str(b));
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

Mat operator*(double s, const Mat& a) {
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  out.check_finite("scale");
  return out;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(),
          "mat_mul: dimension mismatch " + dim_str(a) + " * " + dim_str(b));
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  out.check_finite("mat_mul");
  return out;
}

Mat operator*(const Mat& a, const Mat& b) { return mat_mul(a, b); }

Mat transpose(const Mat& a) {
  Mat out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

namespace {

// LU with partial pivoting on a copy of `a`. Returns the permuted factor and
// fills `perm`; singular-to-working-precision pivots throw, naming the index.
Mat lu_factor(const Mat& a, std::vector<std::size_t>& perm, int& sign) {
  const std::size_t n = a.rows();
  Mat lu = a;
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  sign = 1;
  const double threshold = 1e-13 * std::max(max_abs(a), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > best) {
        best = std::abs(lu(i, k));
        piv = i;
      }
    }
    if (best <= threshold) {
      throw NumericError("solve_linear: singular to working precision at pivot index " +
                         std::to_string(k) + " (|pivot| = " + std::to_string(best) + ")");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(perm[k], perm[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      lu(i, k) /= lu(k, k);
      const double lik = lu(i, k);
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= lik * lu(k, j);
    }
  }
  return lu;
}

}  // namespace

Mat solve_linear(const Mat& a, const Mat& b) {
  require(a.rows() == a.cols(), "solve_linear: a must be square, got " + dim_str(a));
  require(b.rows() == a.rows(),
          "solve_linear: rhs rows " + std::to_string(b.rows()) + " != " + std::to_string(a.rows()));
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm;
  int sign = 0;
  const Mat lu = lu_factor(a, perm, sign);
  Mat x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    // forward substitution on the permuted rhs
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b(perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x(j, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  x.check_finite("solve_linear");
  return x;
}

double determinant(const Mat& a) {
  require(a.rows() == a.cols(), "determinant: a must be square, got " + dim_str(a));
  std::vector<std::size_t> perm;
  int sign = 0;
  try {
    const Mat lu = lu_factor(a, perm, sign);
    double det = sign;
    for (std::size_t i = 0; i < a.rows(); ++i) det *= lu(i, i);
    return det;
  } catch (const NumericError&) {
    return 0.0;  // singular to working precision
  }
}

std::vector<double> svd_values(const Mat& a) {
  // One-sided Jacobi orthogonalizes columns, so work on the tall side.
  Mat w = (a.rows() >= a.cols()) ? a : transpose(a);
  const std::size_t m = w.rows(), n = w.cols();
  constexpr double rel_tol = 1e-12;
  constexpr int max_sweeps = 60;

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (std::abs(gamma) <= rel_tol * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = ((zeta >= 0.0) ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
      }
    }
  }
  if (!converged) {
    throw NumericError("svd_values: Jacobi iteration did not converge within " +
                       std::to_string(max_sweeps) + " sweeps");
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  out.check_finite("kron");
  return out;
}

double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return std::sqrt(s);
}

double spectral_norm(const Mat& a) { return svd_values(a).front(); }

double max_abs(const Mat& a) {
  double s = 0.0;
  for (double v : a.entries()) s = std::max(s, std::abs(v));
  return s;
}

bool is_symmetric(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

bool is_positive_definite(const Mat& a) {
  if (a.rows() != a.cols()) return false;
  const std::size_t n = a.rows();
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

bool is_hurwitz(const Mat& a) {
  require(a.rows() == a.cols(), "is_hurwitz: a must be square");
  if (a.rows() == 1) return a(0, 0) < 0.0;
  if (a.rows() == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return tr < 0.0 && det > 0.0;
  }
  throw NumericError("is_hurwitz: only n <= 2 is supported");
}

}  // namespace ghxctl
