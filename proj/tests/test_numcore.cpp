#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "distresslab/errors.hpp"
#include "distresslab/numcore.hpp"
#include "doctest.h"

using namespace distress;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

// Independent oracle: chi-square upper tail by adaptive Simpson quadrature
// over the density, for x > 0 and small df.
double chi2_density(double t, int df) {
  double a = 0.5 * df;
  return std::exp((a - 1.0) * std::log(t) - 0.5 * t - a * std::log(2.0) - std::lgamma(a));
}

double simpson(double lo, double hi, int df, int steps) {
  double h = (hi - lo) / steps;
  double s = chi2_density(lo, df) + chi2_density(hi, df);
  for (int i = 1; i < steps; ++i)
    s += chi2_density(lo + i * h, df) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double chi2_sf_quadrature(double x, int df) {
  // integrate [x, x+80] with fine steps; the tail beyond is negligible
  return simpson(x, x + 80.0, df, 200000);
}

// Roots of det(A - lambda I) for symmetric 3x3, via the trigonometric
// closed form (all roots real).
std::array<double, 3> cubic_eigenvalues(const Matrix& a) {
  double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
              (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  Matrix b(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  double r = std::clamp(detb / 2.0, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  double e1 = q + 2.0 * p * std::cos(phi);
  double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> out{e1, e2, e3};
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

TEST_CASE("standardize: symmetric three-point column") {
  auto m = from_rows({{1.0}, {2.0}, {3.0}});
  auto s = standardize(m);
  CHECK(s(0, 0) == doctest::Approx(-1.0));
  CHECK(s(1, 0) == doctest::Approx(0.0));
  CHECK(s(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("standardize: idempotent on standardized input") {
  std::mt19937 rng(11);
  Matrix m(20, 3);
  std::normal_distribution<double> dist;
  for (auto& v : m.data()) v = dist(rng);
  auto once = standardize(m);
  auto twice = standardize(once);
  for (std::size_t i = 0; i < once.data().size(); ++i)
    CHECK(twice.data()[i] == doctest::Approx(once.data()[i]).epsilon(1e-12));
}

TEST_CASE("standardize: constant column rejected") {
  auto m = from_rows({{5.0}, {5.0}, {5.0}});
  CHECK_THROWS_WITH_AS(standardize(m), doctest::Contains("ConstantColumn"), Error);
}

TEST_CASE("correlation: identical and negated columns") {
  auto m = from_rows({{1.0, 1.0, -1.0}, {2.0, 2.0, -2.0}, {3.0, 3.0, -3.0}, {5.0, 5.0, -5.0}});
  auto c = correlation_matrix(m);
  CHECK(c(0, 1) == doctest::Approx(1.0));
  CHECK(c(0, 2) == doctest::Approx(-1.0));
  CHECK(c(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("correlation: hand-evaluated r = 0.8") {
  auto m = from_rows({{1.0, 1.0}, {2.0, 2.0}, {3.0, 4.0}, {4.0, 3.0}});
  auto c = correlation_matrix(m);
  CHECK(c(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("correlation: scale invariance vs standardized input") {
  std::mt19937 rng(23);
  Matrix m(40, 5);
  std::normal_distribution<double> dist;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = dist(rng) * (c + 1.0) * 10.0 + 5.0 * c;
  auto c1 = correlation_matrix(m);
  auto c2 = correlation_matrix(standardize(m));
  for (std::size_t i = 0; i < c1.data().size(); ++i)
    CHECK(std::fabs(c1.data()[i] - c2.data()[i]) < 1e-10);
}

TEST_CASE("sym_eigen: identity spectrum") {
  auto e = sym_eigen(Matrix::identity(3));
  for (double lam : e.eigenvalues) CHECK(lam == doctest::Approx(1.0));
}

TEST_CASE("sym_eigen: 2x2 correlation closed form") {
  auto m = from_rows({{1.0, 0.8}, {0.8, 1.0}});
  auto e = sym_eigen(m);
  CHECK(e.eigenvalues[0] == doctest::Approx(1.8));
  CHECK(e.eigenvalues[1] == doctest::Approx(0.2));
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(e.eigenvectors(0, 0) == doctest::Approx(inv_sqrt2));
  CHECK(e.eigenvectors(1, 0) == doctest::Approx(inv_sqrt2));
  CHECK(e.eigenvectors(0, 1) == doctest::Approx(inv_sqrt2));
  CHECK(e.eigenvectors(1, 1) == doctest::Approx(-inv_sqrt2));
}

TEST_CASE("sym_eigen: residuals and orthogonality on random symmetric input") {
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + trial % 7;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double v = dist(rng);
        a(i, j) = v;
        a(j, i) = v;
      }
    auto e = sym_eigen(a);
    // A v = lambda v
    for (std::size_t j = 0; j < n; ++j) {
      auto v = e.eigenvectors.col(j);
      auto av = matvec(a, v);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::fabs(av[i] - e.eigenvalues[j] * v[i]) < 1e-8);
    }
    // V^T V = I
    auto vtv = matmul(e.eigenvectors.transposed(), e.eigenvectors);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        CHECK(std::fabs(vtv(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
  }
}

TEST_CASE("sym_eigen: 3x3 spectrum matches characteristic-polynomial roots") {
  auto a = from_rows({{2.0, -1.0, 0.5}, {-1.0, 3.0, 1.5}, {0.5, 1.5, -1.0}});
  auto expect = cubic_eigenvalues(a);
  auto e = sym_eigen(a);
  for (int i = 0; i < 3; ++i) CHECK(e.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-10));
}

TEST_CASE("sym_eigen: trace preservation on random correlation matrices") {
  std::mt19937 rng(31);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix data(30, 6);
    for (auto& v : data.data()) v = dist(rng);
    auto corr = correlation_matrix(data);
    auto e = sym_eigen(corr);
    double sum = 0.0;
    for (double lam : e.eigenvalues) sum += lam;
    CHECK(sum == doctest::Approx(6.0).epsilon(1e-8));
  }
}

TEST_CASE("sym_eigen: rejects asymmetric input") {
  auto m = from_rows({{1.0, 0.5}, {0.2, 1.0}});
  CHECK_THROWS_WITH_AS(sym_eigen(m), doctest::Contains("NotSymmetric"), Error);
}

TEST_CASE("chi_square_sf: zero statistic") {
  CHECK(chi_square_sf(0.0, 1) == 1.0);
  CHECK(chi_square_sf(0.0, 7) == 1.0);
}

TEST_CASE("chi_square_sf: classic 5% critical value, quadrature oracle") {
  double p = chi_square_sf(3.841, 1);
  CHECK(std::fabs(p - 0.0500) < 5e-5);
  CHECK(std::fabs(p - chi2_sf_quadrature(3.841, 1)) < 1e-9);
}

TEST_CASE("chi_square_sf: normal-tail identity at x = 20") {
  double p = chi_square_sf(20.0, 1);
  CHECK(std::fabs(p - 7.744e-6) < 1e-9);
  CHECK(p == doctest::Approx(2.0 * std_normal_sf(std::sqrt(20.0))).epsilon(1e-9));
}

TEST_CASE("chi_square_sf: quadrature oracle across df") {
  for (int df : {1, 2, 3, 5, 10}) {
    for (double x : {0.5, 2.0, 7.3, 15.0, 31.0}) {
      CHECK(std::fabs(chi_square_sf(x, df) - chi2_sf_quadrature(x, df)) < 1e-9);
    }
  }
}

TEST_CASE("chi_square_sf: negative statistic rejected") {
  CHECK_THROWS_WITH_AS(chi_square_sf(-1.0, 1), doctest::Contains("NegativeStatistic"), Error);
}

TEST_CASE("std_normal_sf: symmetry and reference two-sided values") {
  CHECK(std_normal_sf(0.0) == doctest::Approx(0.5));
  CHECK(std::fabs(two_sided_p(-2.659270) - 0.0078) < 5e-5);
  CHECK(std::fabs(two_sided_p(1.685006) - 0.0920) < 5e-5);
}

TEST_CASE("chi-square / normal identity over z in [0, 6]") {
  for (double z = 0.0; z <= 6.0; z += 0.25) {
    double lhs = chi_square_sf(z * z, 1);
    double rhs = 2.0 * std_normal_sf(z);
    CHECK(std::fabs(lhs - rhs) < 1e-9);
  }
}
