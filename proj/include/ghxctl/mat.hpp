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

#ifndef GHXCTL_MAT_HPP
#define GHXCTL_MAT_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ghxctl/error.hpp"

namespace ghxctl {

/// Small dense real matrix, row-major. Sized for control problems with
/// n <= 8 states; everything here is O(n^3) or better and makes no attempt
/// at being a BLAS. Constructors reject non-finite entries.
class Mat {
 public:
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat zero(std::size_t rows, std::size_t cols);
  /// n x 1 column from a list of entries.
  static Mat col(std::initializer_list<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  const std::vector<double>& entries() const { return e_; }

  /// Re-validates that every entry is finite (used after in-place writes).
  void check_finite(const char* context) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> e_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat operator*(const Mat& a, const Mat& b);  // alias of mat_mul

Mat mat_mul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

/// Solves a x = b by LU with partial pivoting. b may have several columns.
/// A pivot smaller than 1e-13 * max|a| is treated as singular and the error
/// names the offending pivot index.
Mat solve_linear(const Mat& a, const Mat& b);

/// Singular values in descending order, by one-sided Jacobi iteration on the
/// tall side of the matrix, to relative tolerance 1e-12.
std::vector<double> svd_values(const Mat& a);

Mat kron(const Mat& a, const Mat& b);

double frobenius_norm(const Mat& a);
/// Largest singular value (valid wherever svd_values is).
double spectral_norm(const Mat& a);

double determinant(const Mat& a);
double max_abs(const Mat& a);

bool is_symmetric(const Mat& a, double tol);
/// Cholesky-based positive definiteness test for symmetric input.
bool is_positive_definite(const Mat& a);
/// All eigenvalues in the open left half plane. Exact for n <= 2, which is
/// all this project needs; larger sizes throw.
bool is_hurwitz(const Mat& a);

}  // namespace ghxctl

#endif  // GHXCTL_MAT_HPP
