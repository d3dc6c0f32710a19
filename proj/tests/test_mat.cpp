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

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <doctest.h>

#include "ghxctl/plant.hpp"

using namespace ghxctl;

namespace {

// deterministic uniforms in [-1, 1]
struct Rng {
  std::uint64_t state;
  double next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
  }
};

Mat random_mat(Rng& rng, std::size_t r, std::size_t c) {
  Mat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.next();
  return m;
}

Mat ghx_controllability() {
  const PlantModel ghx = nominal_ghx_model();
  Mat c(2, 4);
  const Mat ab = mat_mul(ghx.a, ghx.b);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      c(i, j) = ghx.b(i, j);
      c(i, 2 + j) = ab(i, j);
    }
  return c;
}

}  // namespace

TEST_CASE("mat_mul identity and hand-checked products") {
  Mat m{{1.5, -2.0}, {0.25, 4.0}};
  Mat prod = mat_mul(Mat::identity(2), m);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(prod(i, j) == m(i, j));

  Mat a{{1, 2}, {3, 4}};
  Mat b{{0}, {1}};
  Mat ab = mat_mul(a, b);
  CHECK(ab(0, 0) == 2.0);
  CHECK(ab(1, 0) == 4.0);

  const PlantModel ghx = nominal_ghx_model();
  const Mat ai = mat_mul(ghx.a, Mat::identity(2));
  CHECK(ai(1, 0) == -1.67511974e+00);
  CHECK(ai(1, 1) == -4.89615042e-03);
}

TEST_CASE("mat_mul rejects dimension mismatch") {
  Mat a{{1, 2}, {3, 4}};
  Mat b{{1, 2, 3}};
  CHECK_THROWS_AS(mat_mul(a, b), NumericError);
}

TEST_CASE("solve_linear identity, diagonal and GHX offset") {
  Mat b = Mat::col({3.0, -7.0});
  Mat x = solve_linear(Mat::identity(2), b);
  CHECK(x(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(x(1, 0) == doctest::Approx(-7.0).epsilon(1e-15));

  Mat diag{{2, 0}, {0, 4}};
  Mat x2 = solve_linear(diag, Mat::col({2.0, 8.0}));
  CHECK(x2(0, 0) == doctest::Approx(1.0));
  CHECK(x2(1, 0) == doctest::Approx(2.0));

  const PlantModel ghx = nominal_ghx_model();
  const Mat d_tilde = Mat::col({0.0, 0.5 * ghx.d(1, 0)});
  const Mat sol = solve_linear(ghx.b, d_tilde);
  const double residual = frobenius_norm(mat_mul(ghx.b, sol) - d_tilde);
  CHECK(residual <= 1e-10);
}

TEST_CASE("solve_linear names the singular pivot") {
  Mat singular{{1, 2}, {2, 4}};
  try {
    solve_linear(singular, Mat::col({1.0, 1.0}));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("pivot index 1") != std::string::npos);
  }
}

TEST_CASE("svd_values identity, diagonal, GHX controllability matrix") {
  const auto sv_i = svd_values(Mat::identity(2));
  CHECK(sv_i[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sv_i[1] == doctest::Approx(1.0).epsilon(1e-14));

  Mat d{{3, 0}, {0, 0}};
  const auto sv_d = svd_values(d);
  CHECK(sv_d[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sv_d[1] == doctest::Approx(0.0).epsilon(1e-14));

  const auto sv = svd_values(ghx_controllability());
  CHECK(std::abs(sv[0] - 0.77214562) <= 1e-6);
  CHECK(std::abs(sv[1] - 0.00370246) <= 1e-6);
}

TEST_CASE("kron identity and scalar blocks") {
  Mat m{{1.0, 2.5}, {-3.0, 0.5}};
  Mat k1 = kron(Mat::identity(1), m);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(k1(i, j) == m(i, j));

  Mat k2 = kron(Mat{{1, 0}, {0, 2}}, Mat{{3}});
  CHECK(k2(0, 0) == 3.0);
  CHECK(k2(0, 1) == 0.0);
  CHECK(k2(1, 0) == 0.0);
  CHECK(k2(1, 1) == 6.0);
}

TEST_CASE("norms") {
  CHECK(frobenius_norm(Mat::identity(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(spectral_norm(0.8 * Mat::identity(2)) == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(std::abs(spectral_norm(ghx_controllability()) - 0.77214562) <= 1e-6);
}

TEST_CASE("property: solve residual on random well-conditioned systems") {
  Rng rng{0x9d1e5ecULL};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);  // 2..4
    Mat a = random_mat(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 3.0;  // keep it well conditioned
    const Mat b = random_mat(rng, n, 2);
    const Mat x = solve_linear(a, b);
    CHECK(frobenius_norm(mat_mul(a, x) - b) <= 1e-9);
  }
}

TEST_CASE("property: singular values match for A and A^T") {
  Rng rng{77};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 2 + static_cast<std::size_t>(trial % 3);
    const std::size_t c = 2 + static_cast<std::size_t>((trial / 3) % 3);
    const Mat a = random_mat(rng, r, c);
    const auto s1 = svd_values(a);
    const auto s2 = svd_values(transpose(a));
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(std::abs(s1[i] - s2[i]) <= 1e-10);
  }
}

TEST_CASE("property: product of singular values equals |det|") {
  Rng rng{123};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const Mat a = random_mat(rng, n, n);
    double prod = 1.0;
    for (double s : svd_values(a)) prod *= s;
    CHECK(std::abs(prod - std::abs(determinant(a))) <= 1e-9);
  }
}

TEST_CASE("constructors reject non-finite entries and bad shapes") {
  CHECK_THROWS_AS(Mat(2, 2, {1.0, 2.0, 3.0}), NumericError);
  std::vector<double> bad = {1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0};
  CHECK_THROWS_AS(Mat(2, 2, bad), NumericError);
}
