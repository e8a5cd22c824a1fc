#pragma once

#include <string>
#include <vector>

#include "distresslab/finstat.hpp"
#include "distresslab/matrix.hpp"

namespace distress {

// Correlation-matrix PCA over standardized inputs; full spectrum kept,
// retention decided separately.
struct PcaModel {
  std::vector<std::string> feature_names;
  std::vector<double> eigenvalues;       // descending
  Matrix loadings;                       // features x components, eigvec * sqrt(eigval)
  std::vector<double> explained_share;   // eigenvalue / p
  std::vector<double> cumulative_share;  // running sums
  Matrix correlation;                    // the input correlation matrix
};

struct RotatedModel {
  std::vector<std::string> feature_names;
  Matrix rotated_loadings;          // features x k
  Matrix rotation;                  // k x k orthogonal, rotated = loadings * rotation
  Matrix score_coefficients;        // features x k, empty until computed
  std::vector<double> criterion_path;  // varimax criterion after each sweep
  int sweeps = 0;
};

enum class ComponentRule { KaiserUnitEigenvalue, CumulativeShare };

PcaModel fit_pca(const Dataset& ds, const std::vector<std::string>& features);
PcaModel fit_pca(const Matrix& data, std::vector<std::string> feature_names);

// Kaiser: count of eigenvalues > 1; CumulativeShare: smallest k whose
// cumulative share reaches the threshold. Minimum 1 either way.
int select_components(const PcaModel& model, ComponentRule rule, double threshold = 0.75);

// Iterative pairwise planar rotations maximizing the varimax criterion.
// With kaiser_normalize, rows are scaled to unit communality during the
// rotation. Columns ordered by descending sum of squared loadings;
// largest-magnitude loading per column made positive.
RotatedModel varimax_rotate(const PcaModel& model, int k, bool kaiser_normalize = true);

// Regression-method score coefficients W = corr^-1 * rotated_loadings.
Matrix score_coefficients(const RotatedModel& rm, const Matrix& corr);

// Component scores z^T W for one standardized observation.
std::vector<double> project(const RotatedModel& rm, const Matrix& scores_w,
                            const std::vector<double>& standardized_row);

}  // namespace distress
