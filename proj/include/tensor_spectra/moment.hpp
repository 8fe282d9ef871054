#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tensor_spectra/conic.hpp"
#include "tensor_spectra/polynomial.hpp"

namespace tensor_spectra {

/// Truncated moment sequence y = (y_alpha), alpha in N^n_{2k}, stored in
/// graded lexicographic order so that values[monomial_rank(alpha)] = y_alpha.
struct MomentVector {
  int n = 0;
  int k = 0;
  Eigen::VectorXd values;

  MomentVector() = default;
  MomentVector(int n, int k);
  MomentVector(int n, int k, Eigen::VectorXd v);

  /// [u]_{2k}: the moments of the Dirac measure at u.
  static MomentVector of_point(const Eigen::VectorXd& u, int k);

  double operator[](const Monomial& alpha) const;
  /// <f, y> = sum_alpha f_alpha y_alpha.
  double pair(const Polynomial& f) const;
  /// y|_{2t}.
  MomentVector truncate(int t) const;
};

/// Sparse description of the localizing matrix L_q^{(k)}(y): cell (i, j)
/// equals sum over its terms of coeff * y[moment].
struct LocalizingStructure {
  struct Term {
    int row;
    int col;
    int moment;
    double coeff;
  };

  int n = 0;
  int k = 0;
  int side = 0;
  std::vector<Term> terms;  // row <= col; each cell's terms are contiguous
};

/// Structure of L_q^{(k)}; rows and columns are indexed by N^n_{k - ceil(deg q / 2)}.
LocalizingStructure localizing_structure(const Polynomial& q, int k);
/// Structure of M_k = L_1^{(k)}.
LocalizingStructure moment_structure(int n, int k);

Eigen::MatrixXd assemble_matrix(const LocalizingStructure& s, const MomentVector& y);
Eigen::MatrixXd moment_matrix(const MomentVector& y, int t);

/// Moment relaxation of  min f  s.t.  eqs = 0, ineqs >= 0  at order k.
/// The decision vector is y over N^n_{2k}.
ConicProblem build_min_relaxation(const Polynomial& f, const std::vector<Polynomial>& eqs,
                                  const std::vector<Polynomial>& ineqs, int k);
/// Same feasible set, objective max f (stored as min -f with maximize set).
ConicProblem build_max_relaxation(const Polynomial& f, const std::vector<Polynomial>& eqs,
                                  const std::vector<Polynomial>& ineqs, int k);

/// Relaxation order needed so that a polynomial of this degree fits in 2k.
inline int half_degree(int degree) { return (degree + 1) / 2; }

}  // namespace tensor_spectra
