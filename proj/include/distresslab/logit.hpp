#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "distresslab/finstat.hpp"
#include "distresslab/matrix.hpp"

namespace distress {

struct LogitSpec {
  std::vector<std::string> feature_names;  // covariates, in order
  bool include_intercept = true;           // the C term
  int max_iterations = 100;
  double tolerance = 1e-8;

  std::size_t coefficient_count() const {
    return feature_names.size() + (include_intercept ? 1 : 0);
  }
};

struct LogitFit {
  std::vector<std::string> coef_names;  // features..., then "C"
  std::vector<double> beta;             // aligned with coef_names
  std::vector<double> std_errors;
  Matrix covariance;  // negative inverse Hessian at the optimum
  double log_likelihood = 0.0;
  double restricted_log_likelihood = 0.0;  // intercept-only
  int iterations = 0;
  bool converged = false;
  std::size_t n_obs = 0;
  std::size_t n_dep1 = 0;              // observations with y = 1 (distressed)
  std::vector<double> logl_path;       // log-likelihood after each accepted step
  std::size_t slope_count = 0;         // non-intercept coefficients
};

struct FitStatistics {
  std::vector<double> z_stats;
  std::vector<double> p_values;  // two-sided
  double mcfadden_r2 = 0.0;
  double lr_statistic = 0.0;
  double lr_p_value = 1.0;
  double aic = 0.0;
  double schwarz = 0.0;
  double hannan_quinn = 0.0;
  double avg_log_likelihood = 0.0;
  double mean_dep = 0.0;
  double sd_dep = 0.0;  // n-1 denominator
};

// Newton maximum likelihood with analytic Hessian and step-halving.
// Distressed is coded y = 1. Start at beta = 0 with the intercept at
// ln(pbar/(1-pbar)); converged when max |score| < tolerance.
LogitFit fit_logit(const Dataset& ds, const LogitSpec& spec);

// Binomial log-likelihood, stable for large |x beta|.
double log_likelihood(const std::vector<double>& beta, const Dataset& ds, const LogitSpec& spec);
std::vector<double> log_likelihood_gradient(const std::vector<double>& beta, const Dataset& ds,
                                            const LogitSpec& spec);

// P(distressed) for one ratio vector under the fitted coefficients.
double predict_prob(const std::vector<double>& beta, const RatioVector& rv, const LogitSpec& spec);

// Intercept-only maximum: n1 ln(p) + n0 ln(1-p) at p = n1/n.
double restricted_log_likelihood(std::size_t n_obs, std::size_t n_dep1);

// Coefficient block only: z = beta/se and two-sided p.
FitStatistics inference(const LogitFit& fit);

// Full statistics block of an estimated binary logit.
FitStatistics fit_statistics(const LogitFit& fit);
FitStatistics fit_statistics_from(double logl, double logl0, std::size_t n_obs,
                                  std::size_t n_dep1, int coef_count, int slope_count);

// prob >= cutoff classifies as Distressed (boundary inclusive).
Label classify_cutoff(double prob, double cutoff);

// Formatted estimation table: coefficient rows then the statistics block.
std::string fit_text(const LogitFit& fit, const FitStatistics& stats);

}  // namespace distress
