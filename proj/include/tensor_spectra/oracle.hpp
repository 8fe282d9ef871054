#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tensor_spectra/tensor.hpp"

namespace tensor_spectra {

struct CompanionRoots {
  std::vector<std::complex<double>> roots;
  bool identically_zero = false;
};

/// Roots of sum_i coeffs[i] t^i from the eigenvalues of its companion matrix.
/// Leading coefficients below 1e-12 * max|coeffs| are trimmed.
CompanionRoots companion_roots(const std::vector<double>& coeffs);

/// Real roots (|Im| <= 1e-8 (1 + |Re|), or near-real roots that univariate
/// Newton confirms), polished by Newton and sorted.
std::vector<double> real_roots(const std::vector<double>& coeffs);

struct OraclePair {
  double lambda = 0.0;
  Eigen::VectorXd u;
  double residual = 0.0;
};

struct OracleResult {
  std::vector<OraclePair> pairs;
  /// False when the eliminated binary form vanishes identically (a continuum
  /// of eigenvectors); pairs is then empty.
  bool complete = true;

  /// Distinct eigenvalues, sorted, merged within tol.
  std::vector<double> eigenvalues(double tol = 1e-7) const;
};

/// All real Z-eigenpairs of a 2-dimensional tensor by eliminating lambda:
/// x2 (A x^{m-1})_1 - x1 (A x^{m-1})_2 = 0.
OracleResult brute_z_n2(const Tensor& a);
/// All real H-eigenpairs of a 2-dimensional tensor (sum u_i^{m0} = 1):
/// x2^{m-1} (A x^{m-1})_1 - x1^{m-1} (A x^{m-1})_2 = 0.
OracleResult brute_h_n2(const Tensor& a);

}  // namespace tensor_spectra
