#include "distresslab/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "distresslab/errors.hpp"

namespace distress {

namespace {

struct ColumnStats {
  double mean;
  double sd;  // n-1 denominator
};

ColumnStats column_stats(const Matrix& m, std::size_t c) {
  const std::size_t n = m.rows();
  double mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) mean += m(r, c);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double d = m(r, c) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

}  // namespace

Matrix standardize(const Matrix& m) {
  if (m.rows() < 2) fail(Errc::TooFewRows, "standardize needs at least 2 rows");
  Matrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    ColumnStats s = column_stats(m, c);
    if (s.sd == 0.0) fail(Errc::ConstantColumn, "column " + std::to_string(c) + " has zero variance");
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = (m(r, c) - s.mean) / s.sd;
  }
  return out;
}

Matrix correlation_matrix(const Matrix& m) {
  if (m.rows() < 2) fail(Errc::TooFewRows, "correlation needs at least 2 rows");
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  std::vector<ColumnStats> stats(p);
  for (std::size_t c = 0; c < p; ++c) {
    stats[c] = column_stats(m, c);
    if (stats[c].sd == 0.0) fail(Errc::ConstantColumn, "column " + std::to_string(c) + " has zero variance");
  }
  Matrix corr(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    corr(a, a) = 1.0;
    for (std::size_t b = a + 1; b < p; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        s += (m(r, a) - stats[a].mean) * (m(r, b) - stats[b].mean);
      double r = s / (static_cast<double>(n - 1) * stats[a].sd * stats[b].sd);
      r = std::clamp(r, -1.0, 1.0);
      corr(a, b) = r;
      corr(b, a) = r;
    }
  }
  return corr;
}

EigenResult sym_eigen(const Matrix& mat) {
  if (mat.rows() != mat.cols()) fail(Errc::NotSymmetric, "matrix is not square");
  if (mat.max_asymmetry() > 1e-10)
    fail(Errc::NotSymmetric, "max asymmetry " + std::to_string(mat.max_asymmetry()));

  const std::size_t n = mat.rows();
  Matrix a = mat;
  Matrix v = Matrix::identity(n);

  constexpr double kOffTol = 1e-12;
  constexpr int kMaxSweeps = 100;

  auto max_offdiag = [&]() {
    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) worst = std::max(worst, std::fabs(a(p, q)));
    return worst;
  };

  int sweep = 0;
  for (; sweep < kMaxSweeps && max_offdiag() >= kOffTol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) < kOffTol) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }
  if (max_offdiag() >= kOffTol) fail(Errc::NoConvergence, "Jacobi sweep limit reached");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenResult res;
  res.eigenvalues.resize(n);
  res.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    res.eigenvalues[j] = a(src, src);
    // sign convention: first nonzero component positive
    double sign = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::fabs(v(k, src)) > 1e-12) {
        sign = v(k, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t k = 0; k < n; ++k) res.eigenvectors(k, j) = sign * v(k, src);
  }
  return res;
}

namespace {

// Regularized incomplete gamma P(a, x) by its power series.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized incomplete gamma Q(a, x) by modified Lentz continued fraction.
double gamma_q_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (x < 0.0) fail(Errc::NegativeStatistic, "chi-square statistic " + std::to_string(x));
  if (df < 1) fail(Errc::DimensionMismatch, "df must be positive");
  if (x == 0.0) return 1.0;
  double a = 0.5 * static_cast<double>(df);
  double half = 0.5 * x;
  if (half < a + 1.0) return 1.0 - gamma_p_series(a, half);
  return gamma_q_cf(a, half);
}

double std_normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double two_sided_p(double z) { return 2.0 * std_normal_sf(std::fabs(z)); }

}  // namespace distress
