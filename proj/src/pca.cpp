#include "distresslab/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distresslab/errors.hpp"
#include "distresslab/numcore.hpp"

namespace distress {

PcaModel fit_pca(const Matrix& data, std::vector<std::string> feature_names) {
  if (data.rows() < 3) fail(Errc::TooFewRows, "PCA needs at least 3 rows");
  if (data.cols() != feature_names.size())
    fail(Errc::DimensionMismatch, "feature name count does not match columns");

  Matrix corr = correlation_matrix(data);
  EigenResult eig = sym_eigen(corr);

  const std::size_t p = corr.rows();
  PcaModel model;
  model.feature_names = std::move(feature_names);
  model.eigenvalues = eig.eigenvalues;
  model.correlation = corr;
  model.loadings = Matrix(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double lam = std::max(eig.eigenvalues[j], 0.0);
    double scale = std::sqrt(lam);
    for (std::size_t i = 0; i < p; ++i) model.loadings(i, j) = eig.eigenvectors(i, j) * scale;
  }
  model.explained_share.resize(p);
  model.cumulative_share.resize(p);
  double run = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    model.explained_share[j] = eig.eigenvalues[j] / static_cast<double>(p);
    run += model.explained_share[j];
    model.cumulative_share[j] = run;
  }
  return model;
}

PcaModel fit_pca(const Dataset& ds, const std::vector<std::string>& features) {
  Dataset view = ds;
  view.feature_names = features;
  return fit_pca(view.feature_matrix(), features);
}

int select_components(const PcaModel& model, ComponentRule rule, double threshold) {
  int k = 0;
  if (rule == ComponentRule::KaiserUnitEigenvalue) {
    for (double lam : model.eigenvalues)
      if (lam > 1.0) ++k;
  } else {
    for (std::size_t j = 0; j < model.cumulative_share.size(); ++j) {
      if (model.cumulative_share[j] >= threshold) {
        k = static_cast<int>(j) + 1;
        break;
      }
    }
    if (k == 0) k = static_cast<int>(model.cumulative_share.size());
  }
  return std::max(k, 1);
}

namespace {

// Raw varimax criterion over the columns of a features x k matrix.
double varimax_criterion(const Matrix& l) {
  const double n = static_cast<double>(l.rows());
  double total = 0.0;
  for (std::size_t j = 0; j < l.cols(); ++j) {
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) {
      double b2 = l(i, j) * l(i, j);
      s2 += b2;
      s4 += b2 * b2;
    }
    total += (n * s4 - s2 * s2) / (n * n);
  }
  return total;
}

void rotate_pair(Matrix& l, Matrix& rot, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(l.rows());
  double big_a = 0.0, big_b = 0.0, big_c = 0.0, big_d = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) {
    double x = l(i, a), y = l(i, b);
    double u = x * x - y * y;
    double v = 2.0 * x * y;
    big_a += u;
    big_b += v;
    big_c += u * u - v * v;
    big_d += 2.0 * u * v;
  }
  double num = big_d - 2.0 * big_a * big_b / n;
  double den = big_c - (big_a * big_a - big_b * big_b) / n;
  if (num == 0.0 && den == 0.0) return;
  double phi = 0.25 * std::atan2(num, den);
  if (std::fabs(phi) < 1e-15) return;
  double c = std::cos(phi), s = std::sin(phi);
  for (std::size_t i = 0; i < l.rows(); ++i) {
    double x = l(i, a), y = l(i, b);
    l(i, a) = c * x + s * y;
    l(i, b) = -s * x + c * y;
  }
  for (std::size_t i = 0; i < rot.rows(); ++i) {
    double x = rot(i, a), y = rot(i, b);
    rot(i, a) = c * x + s * y;
    rot(i, b) = -s * x + c * y;
  }
}

}  // namespace

RotatedModel varimax_rotate(const PcaModel& model, int k, bool kaiser_normalize) {
  const std::size_t p = model.loadings.rows();
  if (k < 1 || static_cast<std::size_t>(k) > model.loadings.cols())
    fail(Errc::DimensionMismatch, "component count " + std::to_string(k) + " out of range");

  RotatedModel rm;
  rm.feature_names = model.feature_names;
  Matrix l(p, static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < p; ++i)
    for (int j = 0; j < k; ++j) l(i, j) = model.loadings(i, j);
  Matrix rot = Matrix::identity(static_cast<std::size_t>(k));

  if (k >= 2) {
    std::vector<double> row_norm(p, 1.0);
    if (kaiser_normalize) {
      for (std::size_t i = 0; i < p; ++i) {
        double h2 = 0.0;
        for (int j = 0; j < k; ++j) h2 += l(i, j) * l(i, j);
        double h = std::sqrt(h2);
        if (h > 0.0) {
          row_norm[i] = h;
          for (int j = 0; j < k; ++j) l(i, j) /= h;
        }
      }
    }

    constexpr int kMaxSweeps = 200;
    constexpr double kGainTol = 1e-10;
    double last = varimax_criterion(l);
    rm.criterion_path.push_back(last);
    bool settled = false;
    for (int sweep = 0; sweep < kMaxSweeps && !settled; ++sweep) {
      for (int a = 0; a < k - 1; ++a)
        for (int b = a + 1; b < k; ++b)
          rotate_pair(l, rot, static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      double now = varimax_criterion(l);
      rm.criterion_path.push_back(now);
      settled = now - last < kGainTol;
      last = now;
      rm.sweeps = sweep + 1;
    }
    if (!settled) fail(Errc::NoConvergence, "varimax sweep limit reached");

    if (kaiser_normalize)
      for (std::size_t i = 0; i < p; ++i)
        for (int j = 0; j < k; ++j) l(i, j) *= row_norm[i];
  }

  // column sign (largest-magnitude loading positive) and column order
  // (descending sum of squared loadings); k = 1 stays untouched so the
  // rotation is exactly the identity
  if (k >= 2) {
    for (int j = 0; j < k; ++j) {
      std::size_t arg = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < p; ++i) {
        if (std::fabs(l(i, j)) > best) {
          best = std::fabs(l(i, j));
          arg = i;
        }
      }
      if (l(arg, j) < 0.0) {
        for (std::size_t i = 0; i < p; ++i) l(i, j) = -l(i, j);
        for (std::size_t i = 0; i < rot.rows(); ++i) rot(i, j) = -rot(i, j);
      }
    }
  }
  std::vector<double> ssq(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j)
    for (std::size_t i = 0; i < p; ++i) ssq[j] += l(i, j) * l(i, j);
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  if (k >= 2)
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return ssq[x] > ssq[y]; });

  rm.rotated_loadings = Matrix(p, static_cast<std::size_t>(k));
  rm.rotation = Matrix(rot.rows(), static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < p; ++i) rm.rotated_loadings(i, j) = l(i, order[j]);
    for (std::size_t i = 0; i < rot.rows(); ++i) rm.rotation(i, j) = rot(i, order[j]);
  }
  return rm;
}

Matrix score_coefficients(const RotatedModel& rm, const Matrix& corr) {
  if (corr.rows() != rm.rotated_loadings.rows())
    fail(Errc::DimensionMismatch, "correlation size does not match loadings");
  EigenResult eig = sym_eigen(corr);
  double smallest = eig.eigenvalues.back();
  if (smallest <= 1e-10)
    fail(Errc::SingularCorrelation,
         "smallest correlation eigenvalue " + std::to_string(smallest));

  // corr^-1 = V diag(1/lambda) V^T
  const std::size_t p = corr.rows();
  Matrix inv(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < p; ++m)
        s += eig.eigenvectors(i, m) * eig.eigenvectors(j, m) / eig.eigenvalues[m];
      inv(i, j) = s;
    }
  return matmul(inv, rm.rotated_loadings);
}

std::vector<double> project(const RotatedModel& rm, const Matrix& scores_w,
                            const std::vector<double>& standardized_row) {
  if (!rm.rotated_loadings.empty() && rm.rotated_loadings.rows() != scores_w.rows())
    fail(Errc::DimensionMismatch, "score coefficients do not match the rotated model");
  if (standardized_row.size() != scores_w.rows())
    fail(Errc::DimensionMismatch, "row length " + std::to_string(standardized_row.size()) +
                                      " does not match feature count " +
                                      std::to_string(scores_w.rows()));
  std::vector<double> scores(scores_w.cols(), 0.0);
  for (std::size_t j = 0; j < scores_w.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < scores_w.rows(); ++i) s += standardized_row[i] * scores_w(i, j);
    scores[j] = s;
  }
  return scores;
}

}  // namespace distress
