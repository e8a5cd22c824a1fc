#pragma once

#include <vector>

#include "distresslab/matrix.hpp"

namespace distress {

struct EigenResult {
  std::vector<double> eigenvalues;  // non-increasing
  Matrix eigenvectors;              // columns aligned with eigenvalues, unit norm
};

// Column-wise standardization to mean 0, sample sd 1 (n-1 denominator).
// Throws ConstantColumn / TooFewRows.
Matrix standardize(const Matrix& m);

// Pearson product-moment correlation of the columns of m.
Matrix correlation_matrix(const Matrix& m);

// Full spectrum of a symmetric matrix via cyclic Jacobi rotations.
// Stops when every off-diagonal magnitude is below 1e-12 or after 100
// sweeps (NoConvergence). Eigenvalues sorted descending; each
// eigenvector's first nonzero component is made positive.
EigenResult sym_eigen(const Matrix& a);

// Upper-tail probability of the chi-square distribution, computed from
// the regularized incomplete gamma function (series for small
// arguments, continued fraction for large ones).
double chi_square_sf(double x, int df);

// Upper tail of the standard normal.
double std_normal_sf(double z);

// Convenience: two-sided p-value for a z statistic.
double two_sided_p(double z);

}  // namespace distress
