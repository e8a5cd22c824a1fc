#include "distresslab/logit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distresslab/errors.hpp"
#include "distresslab/numcore.hpp"

namespace distress {

namespace {

// ln(1 + e^t) without overflow
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::fabs(t))); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

// design matrix (features..., intercept last) and response
struct DesignData {
  Matrix x;
  std::vector<double> y;
};

DesignData design(const Dataset& ds, const LogitSpec& spec) {
  if (spec.feature_names.empty() && !spec.include_intercept)
    fail(Errc::InvalidConfig, "logit spec has neither covariates nor intercept");
  std::vector<int> idx;
  for (const auto& f : spec.feature_names) idx.push_back(ratio_index(f));
  const std::size_t n = ds.rows.size();
  const std::size_t k = spec.coefficient_count();
  DesignData dd;
  dd.x = Matrix(n, k);
  dd.y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = ds.rows[r];
    for (std::size_t c = 0; c < idx.size(); ++c) {
      if (!row.ratios.is_valid(idx[c]))
        fail(Errc::InvalidFeature,
             "company '" + row.company_id + "' has no valid " + spec.feature_names[c]);
      dd.x(r, c) = row.ratios[idx[c]];
    }
    if (spec.include_intercept) dd.x(r, k - 1) = 1.0;
    dd.y[r] = row.health.label == Label::Distressed ? 1.0 : 0.0;
  }
  return dd;
}

double logl_of(const DesignData& dd, const std::vector<double>& beta) {
  double ll = 0.0;
  for (std::size_t r = 0; r < dd.x.rows(); ++r) {
    double t = 0.0;
    for (std::size_t c = 0; c < dd.x.cols(); ++c) t += dd.x(r, c) * beta[c];
    ll += dd.y[r] * t - softplus(t);
  }
  return ll;
}

std::vector<double> gradient_of(const DesignData& dd, const std::vector<double>& beta) {
  std::vector<double> g(dd.x.cols(), 0.0);
  for (std::size_t r = 0; r < dd.x.rows(); ++r) {
    double t = 0.0;
    for (std::size_t c = 0; c < dd.x.cols(); ++c) t += dd.x(r, c) * beta[c];
    double resid = dd.y[r] - sigmoid(t);
    for (std::size_t c = 0; c < dd.x.cols(); ++c) g[c] += dd.x(r, c) * resid;
  }
  return g;
}

// X^T W X with W = diag(p(1-p))
Matrix information_of(const DesignData& dd, const std::vector<double>& beta) {
  const std::size_t k = dd.x.cols();
  Matrix info(k, k);
  for (std::size_t r = 0; r < dd.x.rows(); ++r) {
    double t = 0.0;
    for (std::size_t c = 0; c < k; ++c) t += dd.x(r, c) * beta[c];
    double p = sigmoid(t);
    double w = p * (1.0 - p);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) info(a, b) += w * dd.x(r, a) * dd.x(r, b);
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < a; ++b) info(a, b) = info(b, a);
  return info;
}

// Cholesky solve of the SPD system A x = b; file-local, sizes are tiny.
// Columns are equilibrated to unit diagonal first, which keeps the solve
// accurate when covariate scales differ by orders of magnitude.
struct Cholesky {
  Matrix l;
  std::vector<double> scale;  // D with unit diagonal of D A D
  bool ok = false;
};

Cholesky cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Cholesky ch;
  ch.l = Matrix(n, n);
  ch.scale.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a(i, i) <= 0.0) return ch;
    ch.scale[i] = 1.0 / std::sqrt(a(i, i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j) * ch.scale[i] * ch.scale[j];
      for (std::size_t k = 0; k < j; ++k) s -= ch.l(i, k) * ch.l(j, k);
      if (i == j) {
        if (s <= 0.0) return ch;  // not positive definite
        ch.l(i, i) = std::sqrt(s);
      } else {
        ch.l(i, j) = s / ch.l(j, j);
      }
    }
  }
  ch.ok = true;
  return ch;
}

std::vector<double> cholesky_solve(const Cholesky& ch, const std::vector<double>& b) {
  const std::size_t n = ch.l.rows();
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i] * ch.scale[i];
    for (std::size_t k = 0; k < i; ++k) s -= ch.l(i, k) * y[k];
    y[i] = s / ch.l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= ch.l(k, ii) * x[k];
    x[ii] = s / ch.l(ii, ii);
  }
  for (std::size_t i = 0; i < n; ++i) x[i] *= ch.scale[i];
  return x;
}

Matrix cholesky_inverse(const Cholesky& ch) {
  const std::size_t n = ch.l.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    auto col = cholesky_solve(ch, e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  // symmetrize roundoff
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c) {
      double v = 0.5 * (inv(r, c) + inv(c, r));
      inv(r, c) = v;
      inv(c, r) = v;
    }
  return inv;
}

}  // namespace

double restricted_log_likelihood(std::size_t n_obs, std::size_t n_dep1) {
  std::size_t n0 = n_obs - n_dep1;
  if (n_dep1 == 0 || n0 == 0) fail(Errc::SingleClassDataset, "restricted fit needs both labels");
  double p = static_cast<double>(n_dep1) / static_cast<double>(n_obs);
  return static_cast<double>(n_dep1) * std::log(p) + static_cast<double>(n0) * std::log1p(-p);
}

double log_likelihood(const std::vector<double>& beta, const Dataset& ds, const LogitSpec& spec) {
  if (beta.size() != spec.coefficient_count())
    fail(Errc::DimensionMismatch, "beta length " + std::to_string(beta.size()) + " expected " +
                                      std::to_string(spec.coefficient_count()));
  return logl_of(design(ds, spec), beta);
}

std::vector<double> log_likelihood_gradient(const std::vector<double>& beta, const Dataset& ds,
                                            const LogitSpec& spec) {
  if (beta.size() != spec.coefficient_count())
    fail(Errc::DimensionMismatch, "beta length mismatch");
  return gradient_of(design(ds, spec), beta);
}

double predict_prob(const std::vector<double>& beta, const RatioVector& rv,
                    const LogitSpec& spec) {
  if (beta.size() != spec.coefficient_count())
    fail(Errc::DimensionMismatch, "beta length mismatch");
  double t = 0.0;
  for (std::size_t c = 0; c < spec.feature_names.size(); ++c) {
    int fi = ratio_index(spec.feature_names[c]);
    if (!rv.is_valid(fi)) fail(Errc::InvalidFeature, "no valid " + spec.feature_names[c]);
    t += beta[c] * rv[fi];
  }
  if (spec.include_intercept) t += beta.back();
  return sigmoid(t);
}

LogitFit fit_logit(const Dataset& ds, const LogitSpec& spec) {
  const std::size_t n = ds.rows.size();
  const std::size_t k = spec.coefficient_count();
  if (ds.single_class()) fail(Errc::SingleClassDataset, "logit needs both labels");
  if (n <= k)
    fail(Errc::TooFewRows, std::to_string(n) + " rows for " + std::to_string(k) + " coefficients");

  DesignData dd = design(ds, spec);
  const std::size_t n1 = ds.count(Label::Distressed);

  LogitFit fit;
  fit.coef_names = spec.feature_names;
  if (spec.include_intercept) fit.coef_names.push_back("C");
  fit.n_obs = n;
  fit.n_dep1 = n1;
  fit.slope_count = spec.feature_names.size();
  fit.restricted_log_likelihood = restricted_log_likelihood(n, n1);

  std::vector<double> beta(k, 0.0);
  if (spec.include_intercept) {
    double p = static_cast<double>(n1) / static_cast<double>(n);
    beta[k - 1] = std::log(p / (1.0 - p));
  }

  double ll = logl_of(dd, beta);
  fit.logl_path.push_back(ll);
  bool converged = false;
  int iter = 0;
  for (; iter < spec.max_iterations; ++iter) {
    auto g = gradient_of(dd, beta);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    if (gmax < spec.tolerance) {
      converged = true;
      break;
    }
    Matrix info = information_of(dd, beta);
    Cholesky ch = cholesky(info);
    if (!ch.ok)
      fail(Errc::PerfectSeparation,
           "observed information is singular (separated or collinear data)");
    auto step = cholesky_solve(ch, g);

    // step-halving until the likelihood stops decreasing; near the optimum
    // the true gain sits below objective roundoff, so a decrease within
    // roundoff of the represented value still counts as acceptance
    const double roundoff = 1e-12 * (1.0 + std::fabs(ll));
    double scale = 1.0;
    std::vector<double> trial(k);
    double trial_ll = ll;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      for (std::size_t c = 0; c < k; ++c) trial[c] = beta[c] + scale * step[c];
      trial_ll = logl_of(dd, trial);
      if (trial_ll >= ll - roundoff) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // no ascent direction left; gradient check decides below

    beta = trial;
    ll = trial_ll;
    fit.logl_path.push_back(ll);

    double bmax = 0.0;
    for (double v : beta) bmax = std::max(bmax, std::fabs(v));
    if (bmax > 30.0)
      fail(Errc::PerfectSeparation,
           "coefficients diverging (|beta| > 30 with improving likelihood)");
  }

  if (!converged) {
    auto g = gradient_of(dd, beta);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    converged = gmax < spec.tolerance;
  }
  if (!converged) fail(Errc::NoConvergence, "Newton iterations exhausted");

  Matrix info = information_of(dd, beta);
  Cholesky ch = cholesky(info);
  if (!ch.ok) fail(Errc::PerfectSeparation, "observed information is singular at the optimum");
  fit.covariance = cholesky_inverse(ch);
  fit.beta = beta;
  fit.std_errors.resize(k);
  for (std::size_t c = 0; c < k; ++c) fit.std_errors[c] = std::sqrt(fit.covariance(c, c));
  fit.log_likelihood = ll;
  fit.iterations = iter;
  fit.converged = true;
  return fit;
}

FitStatistics inference(const LogitFit& fit) {
  if (!fit.converged) fail(Errc::NotConverged, "inference requires a converged fit");
  FitStatistics st;
  st.z_stats.resize(fit.beta.size());
  st.p_values.resize(fit.beta.size());
  for (std::size_t c = 0; c < fit.beta.size(); ++c) {
    st.z_stats[c] = fit.beta[c] / fit.std_errors[c];
    st.p_values[c] = two_sided_p(st.z_stats[c]);
  }
  return st;
}

FitStatistics fit_statistics_from(double logl, double logl0, std::size_t n_obs,
                                  std::size_t n_dep1, int coef_count, int slope_count) {
  FitStatistics st;
  const double n = static_cast<double>(n_obs);
  const double kk = static_cast<double>(coef_count);
  st.mcfadden_r2 = 1.0 - logl / logl0;
  st.lr_statistic = 2.0 * (logl - logl0);
  st.lr_p_value = slope_count > 0 ? chi_square_sf(std::max(st.lr_statistic, 0.0), slope_count) : 1.0;
  st.aic = (-2.0 * logl + 2.0 * kk) / n;
  st.schwarz = (-2.0 * logl + kk * std::log(n)) / n;
  st.hannan_quinn = (-2.0 * logl + 2.0 * kk * std::log(std::log(n))) / n;
  st.avg_log_likelihood = logl / n;
  st.mean_dep = static_cast<double>(n_dep1) / n;
  double ss = static_cast<double>(n_dep1) * static_cast<double>(n_obs - n_dep1) / n;
  st.sd_dep = std::sqrt(ss / (n - 1.0));
  return st;
}

FitStatistics fit_statistics(const LogitFit& fit) {
  if (!fit.converged) fail(Errc::NotConverged, "statistics require a converged fit");
  FitStatistics st =
      fit_statistics_from(fit.log_likelihood, fit.restricted_log_likelihood, fit.n_obs,
                          fit.n_dep1, static_cast<int>(fit.beta.size()),
                          static_cast<int>(fit.slope_count));
  FitStatistics coef = inference(fit);
  st.z_stats = std::move(coef.z_stats);
  st.p_values = std::move(coef.p_values);
  return st;
}

Label classify_cutoff(double prob, double cutoff) {
  if (prob < 0.0 || prob > 1.0 || cutoff < 0.0 || cutoff > 1.0)
    fail(Errc::InvalidConfig, "probability and cutoff must lie in [0, 1]");
  return prob >= cutoff ? Label::Distressed : Label::Healthy;
}

std::string fit_text(const LogitFit& fit, const FitStatistics& stats) {
  std::ostringstream os;
  char buf[160];
  os << "Dependent variable: distressed (1) vs healthy (0)\n";
  os << "Method: ML - Binary Logit (Newton with step-halving)\n";
  os << "Included observations: " << fit.n_obs << "\n";
  os << "Convergence achieved after " << fit.iterations << " iterations\n";
  os << "Covariance matrix computed using second derivatives\n\n";
  std::snprintf(buf, sizeof(buf), "%-10s %12s %12s %12s %10s\n", "Variable", "Coefficient",
                "Std. Error", "z-Statistic", "Prob.");
  os << buf;
  for (std::size_t c = 0; c < fit.beta.size(); ++c) {
    std::snprintf(buf, sizeof(buf), "%-10s %12.6f %12.6f %12.6f %10.4f\n",
                  fit.coef_names[c].c_str(), fit.beta[c], fit.std_errors[c], stats.z_stats[c],
                  stats.p_values[c]);
    os << buf;
  }
  os << "\n";
  std::snprintf(buf, sizeof(buf), "Mean dependent var   %10.6f   S.D. dependent var   %10.6f\n",
                stats.mean_dep, stats.sd_dep);
  os << buf;
  std::snprintf(buf, sizeof(buf), "Log likelihood       %10.6f   Akaike info criterion%10.6f\n",
                fit.log_likelihood, stats.aic);
  os << buf;
  std::snprintf(buf, sizeof(buf), "Restr. log likelihood%10.6f   Schwarz criterion    %10.6f\n",
                fit.restricted_log_likelihood, stats.schwarz);
  os << buf;
  std::snprintf(buf, sizeof(buf), "LR statistic (%zu df)  %10.5f   Hannan-Quinn criter. %10.6f\n",
                fit.slope_count, stats.lr_statistic, stats.hannan_quinn);
  os << buf;
  std::snprintf(buf, sizeof(buf), "Probability(LR stat) %10.3e   Avg. log likelihood  %10.6f\n",
                stats.lr_p_value, stats.avg_log_likelihood);
  os << buf;
  std::snprintf(buf, sizeof(buf), "McFadden R-squared   %10.6f\n", stats.mcfadden_r2);
  os << buf;
  std::snprintf(buf, sizeof(buf), "Obs with Dep=0       %10zu   Obs with Dep=1       %10zu\n",
                fit.n_obs - fit.n_dep1, fit.n_dep1);
  os << buf;
  return os.str();
}

}  // namespace distress
