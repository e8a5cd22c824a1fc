#include <cmath>
#include <random>

#include "distresslab/errors.hpp"
#include "distresslab/numcore.hpp"
#include "distresslab/pca.hpp"
#include "doctest.h"

using namespace distress;

namespace {

std::vector<std::string> names(std::size_t p) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < p; ++i) out.push_back("I" + std::to_string(i + 1));
  return out;
}

double communality(const Matrix& loadings, std::size_t row) {
  double h2 = 0.0;
  for (std::size_t j = 0; j < loadings.cols(); ++j) h2 += loadings(row, j) * loadings(row, j);
  return h2;
}

// Gram-Schmidt to columns with exact unit sample variance and zero mean,
// so generated data has a fully controlled covariance.
Matrix orthonormal_factors(std::size_t n, std::size_t k, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Matrix f(n, k);
  for (auto& v : f.data()) v = dist(rng);
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += f(r, j);
    mean /= n;
    for (std::size_t r = 0; r < n; ++r) f(r, j) -= mean;
    for (std::size_t prev = 0; prev < j; ++prev) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += f(r, j) * f(r, prev);
      dot /= (n - 1.0);
      for (std::size_t r = 0; r < n; ++r) f(r, j) -= dot * f(r, prev);
    }
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += f(r, j) * f(r, j);
    double sd = std::sqrt(ss / (n - 1.0));
    for (std::size_t r = 0; r < n; ++r) f(r, j) /= sd;
  }
  return f;
}

PcaModel model_from_loadings(const Matrix& l) {
  PcaModel m;
  m.feature_names = names(l.rows());
  m.loadings = l;
  m.eigenvalues.assign(l.cols(), 1.0);
  return m;
}

Matrix simple_structure_loadings() {
  Matrix l(6, 2);
  l(0, 0) = 0.9;
  l(1, 0) = 0.8;
  l(2, 0) = 0.7;
  l(3, 1) = 0.9;
  l(4, 1) = 0.8;
  l(5, 1) = 0.6;
  return l;
}

}  // namespace

TEST_CASE("fit_pca: two perfectly correlated features are rank one") {
  std::mt19937 rng(2);
  std::normal_distribution<double> dist;
  Matrix data(30, 2);
  for (std::size_t r = 0; r < 30; ++r) {
    double v = dist(rng);
    data(r, 0) = v;
    data(r, 1) = 3.0 * v + 1.0;
  }
  auto model = fit_pca(data, names(2));
  CHECK(model.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(model.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(model.explained_share[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fit_pca: independent features spread the variance evenly") {
  std::mt19937 rng(9);
  std::normal_distribution<double> dist;
  Matrix data(4000, 4);
  for (auto& v : data.data()) v = dist(rng);
  auto model = fit_pca(data, names(4));
  for (double share : model.explained_share) CHECK(std::fabs(share - 0.25) < 0.03);
}

TEST_CASE("fit_pca: two latent factors dominate a 7-feature corpus") {
  std::mt19937 rng(40);
  std::normal_distribution<double> noise(0.0, 0.15);
  auto f = orthonormal_factors(200, 2, rng);
  Matrix data(200, 7);
  for (std::size_t r = 0; r < 200; ++r)
    for (std::size_t c = 0; c < 7; ++c) {
      double w0 = (c < 4) ? 1.0 : 0.2;
      double w1 = (c < 4) ? 0.1 : 1.0;
      data(r, c) = w0 * f(r, 0) + w1 * f(r, 1) + noise(rng);
    }
  auto model = fit_pca(data, names(7));
  CHECK(model.cumulative_share[1] > 0.9);
}

TEST_CASE("fit_pca: loadings column sums of squares equal eigenvalues") {
  std::mt19937 rng(12);
  std::normal_distribution<double> dist;
  Matrix data(60, 5);
  for (auto& v : data.data()) v = dist(rng);
  auto model = fit_pca(data, names(5));
  for (std::size_t j = 0; j < 5; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < 5; ++i) ss += model.loadings(i, j) * model.loadings(i, j);
    CHECK(ss == doctest::Approx(model.eigenvalues[j]).epsilon(1e-8));
  }
}

TEST_CASE("fit_pca: too few rows rejected") {
  Matrix data(2, 2);
  data(0, 0) = 1;
  data(1, 0) = 2;
  data(0, 1) = 2;
  data(1, 1) = 1;
  CHECK_THROWS_WITH_AS(fit_pca(data, names(2)), doctest::Contains("TooFewRows"), Error);
}

TEST_CASE("select_components: constructed spectrum") {
  PcaModel m;
  m.eigenvalues = {3.1, 2.2, 0.8, 0.5, 0.2, 0.1, 0.1};
  double run = 0.0;
  for (double lam : m.eigenvalues) {
    run += lam / 7.0;
    m.explained_share.push_back(lam / 7.0);
    m.cumulative_share.push_back(run);
  }
  CHECK(select_components(m, ComponentRule::KaiserUnitEigenvalue) == 2);
  CHECK(select_components(m, ComponentRule::CumulativeShare, 0.75) == 2);  // 5.3/7 = 0.757
}

TEST_CASE("select_components: floor of one when every eigenvalue is small") {
  PcaModel m;
  m.eigenvalues = {0.9, 0.6, 0.5};
  m.cumulative_share = {0.45, 0.75, 1.0};
  m.explained_share = {0.45, 0.3, 0.25};
  CHECK(select_components(m, ComponentRule::KaiserUnitEigenvalue) == 1);
}

TEST_CASE("select_components: monotone in the cumulative-share threshold") {
  PcaModel m;
  m.eigenvalues = {2.5, 1.5, 0.6, 0.4};
  double run = 0.0;
  for (double lam : m.eigenvalues) {
    run += lam / 5.0;
    m.explained_share.push_back(lam / 5.0);
    m.cumulative_share.push_back(run);
  }
  int last = 0;
  for (double t = 0.05; t <= 1.0; t += 0.05) {
    int k = select_components(m, ComponentRule::CumulativeShare, t);
    CHECK(k >= last);
    last = k;
  }
}

TEST_CASE("varimax: simple structure is a fixed point") {
  auto l = simple_structure_loadings();
  auto rm = varimax_rotate(model_from_loadings(l), 2, false);
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(rm.rotated_loadings(i, j) == doctest::Approx(l(i, j)).epsilon(1e-8));
}

TEST_CASE("varimax: k = 1 is the identity rotation") {
  auto rm = varimax_rotate(model_from_loadings(simple_structure_loadings()), 1, true);
  CHECK(rm.rotation.rows() == 1);
  CHECK(rm.rotation(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("varimax: recovers a 30-degree mix of simple structure") {
  auto l = simple_structure_loadings();
  double th = 30.0 * M_PI / 180.0;
  Matrix q(2, 2);
  q(0, 0) = std::cos(th);
  q(0, 1) = -std::sin(th);
  q(1, 0) = std::sin(th);
  q(1, 1) = std::cos(th);
  Matrix mixed = matmul(l, q);

  for (bool kaiser : {false, true}) {
    auto rm = varimax_rotate(model_from_loadings(mixed), 2, kaiser);
    // compare up to column order/sign
    for (std::size_t j = 0; j < 2; ++j) {
      bool matched = false;
      for (std::size_t c = 0; c < 2 && !matched; ++c) {
        for (double sign : {1.0, -1.0}) {
          bool all = true;
          for (std::size_t i = 0; i < l.rows(); ++i)
            if (std::fabs(rm.rotated_loadings(i, j) - sign * l(i, c)) > 1e-6) {
              all = false;
              break;
            }
          if (all) matched = true;
        }
      }
      CHECK(matched);
    }
    // rotation stays orthogonal
    auto rtr = matmul(rm.rotation.transposed(), rm.rotation);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::fabs(rtr(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
    // and reproduces the rotated loadings exactly
    auto back = matmul(mixed, rm.rotation);
    for (std::size_t i = 0; i < back.data().size(); ++i)
      CHECK(back.data()[i] == doctest::Approx(rm.rotated_loadings.data()[i]).epsilon(1e-10));
  }
}

TEST_CASE("varimax: communalities preserved over 100 random loading matrices") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::uniform_int_distribution<int> pd(4, 14), kd(2, 4);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t p = pd(rng);
    int k = kd(rng);
    Matrix l(p, static_cast<std::size_t>(k));
    for (auto& v : l.data()) v = u(rng);
    auto rm = varimax_rotate(model_from_loadings(l), k, trial % 2 == 0);
    for (std::size_t i = 0; i < p; ++i)
      CHECK(std::fabs(communality(rm.rotated_loadings, i) - communality(l, i)) < 1e-10);
  }
}

TEST_CASE("varimax: criterion never decreases across sweeps") {
  std::mt19937 rng(78);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix l(10, 3);
    for (auto& v : l.data()) v = u(rng);
    auto rm = varimax_rotate(model_from_loadings(l), 3, false);
    for (std::size_t i = 1; i < rm.criterion_path.size(); ++i)
      CHECK(rm.criterion_path[i] >= rm.criterion_path[i - 1] - 1e-12);
  }
}

TEST_CASE("fit_pca: explained shares invariant under factor rotation") {
  std::mt19937 rng(90);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = orthonormal_factors(80, 3, rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix l(6, 3);
    for (auto& v : l.data()) v = u(rng);

    double th = 0.3 + 0.2 * trial;
    Matrix q = Matrix::identity(3);
    q(0, 0) = std::cos(th);
    q(0, 1) = -std::sin(th);
    q(1, 0) = std::sin(th);
    q(1, 1) = std::cos(th);

    Matrix x = matmul(f, l.transposed());
    Matrix xq = matmul(matmul(f, q), matmul(q.transposed(), l.transposed()));

    auto m1 = fit_pca(x, names(6));
    auto m2 = fit_pca(xq, names(6));
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(std::fabs(m1.explained_share[j] - m2.explained_share[j]) < 1e-8);
  }
}

TEST_CASE("score_coefficients: identity correlation returns the loadings") {
  auto l = simple_structure_loadings();
  RotatedModel rm;
  rm.rotated_loadings = l;
  auto w = score_coefficients(rm, Matrix::identity(6));
  for (std::size_t i = 0; i < l.data().size(); ++i)
    CHECK(w.data()[i] == doctest::Approx(l.data()[i]).epsilon(1e-10));
}

TEST_CASE("score_coefficients: regression scores of a fitted model have unit variance") {
  std::mt19937 rng(55);
  std::normal_distribution<double> dist;
  Matrix data(120, 5);
  auto f = orthonormal_factors(120, 2, rng);
  for (std::size_t r = 0; r < 120; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      double w0 = (c < 3) ? 1.0 : 0.3;
      double w1 = (c < 3) ? 0.2 : 1.0;
      data(r, c) = w0 * f(r, 0) + w1 * f(r, 1) + 0.25 * dist(rng);
    }
  auto model = fit_pca(data, names(5));
  auto rm = varimax_rotate(model, 2, true);
  auto w = score_coefficients(rm, model.correlation);

  Matrix z = standardize(data);
  Matrix scores = matmul(z, w);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < scores.rows(); ++r) mean += scores(r, j);
    mean /= scores.rows();
    double var = 0.0;
    for (std::size_t r = 0; r < scores.rows(); ++r)
      var += (scores(r, j) - mean) * (scores(r, j) - mean);
    var /= (scores.rows() - 1.0);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("score_coefficients: singular correlation rejected") {
  std::mt19937 rng(4);
  std::normal_distribution<double> dist;
  Matrix data(30, 2);
  for (std::size_t r = 0; r < 30; ++r) {
    double v = dist(rng);
    data(r, 0) = v;
    data(r, 1) = 2.0 * v;
  }
  auto corr = correlation_matrix(data);
  RotatedModel rm;
  rm.rotated_loadings = Matrix(2, 1, 0.5);
  CHECK_THROWS_WITH_AS(score_coefficients(rm, corr), doctest::Contains("SingularCorrelation"),
                       Error);
}

TEST_CASE("project: zero vector, identity weights, and a brute-force oracle") {
  RotatedModel rm;
  rm.rotated_loadings = Matrix(2, 2);

  Matrix w = Matrix::identity(2);
  auto zero = project(rm, w, {0.0, 0.0});
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  auto s = project(rm, w, {0.5, -0.5});
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(-0.5));

  std::mt19937 rng(66);
  std::normal_distribution<double> dist;
  Matrix w2(5, 2);
  for (auto& v : w2.data()) v = dist(rng);
  std::vector<double> row(5);
  for (auto& v : row) v = dist(rng);
  RotatedModel rm2;
  rm2.rotated_loadings = Matrix(5, 2);
  auto scores = project(rm2, w2, row);
  for (std::size_t j = 0; j < 2; ++j) {
    double expect = 0.0;
    for (std::size_t i = 0; i < 5; ++i) expect += row[i] * w2(i, j);
    CHECK(scores[j] == doctest::Approx(expect).epsilon(1e-12));
  }

  CHECK_THROWS_WITH_AS(project(rm2, w2, {1.0, 2.0}), doctest::Contains("DimensionMismatch"),
                       Error);
}

TEST_CASE("varimax: k = 1 never flips a negative-dominant column") {
  Matrix l(3, 2);
  l(0, 0) = -0.9;
  l(1, 0) = 0.2;
  l(2, 0) = 0.1;
  l(0, 1) = 0.5;
  auto rm = varimax_rotate(model_from_loadings(l), 1, true);
  CHECK(rm.rotation(0, 0) == doctest::Approx(1.0));
  CHECK(rm.rotated_loadings(0, 0) == doctest::Approx(-0.9));
}
