#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tensor_spectra {

/// One coefficient of a PSD block: the block gains coeff * x[var] at
/// (row, col) and, when row != col, at (col, row) as well.
struct BlockTerm {
  int row = 0;
  int col = 0;
  int var = 0;
  double coeff = 0.0;
};

/// Symmetric matrix constraint  constant + sum_i x_i B_i  >= 0.
struct PsdBlock {
  int size = 0;
  Eigen::MatrixXd constant;       // size x size, usually zero
  std::vector<BlockTerm> terms;   // row <= col
  std::string label;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
  /// Adjoint of the linear part: out[i] += <B_i, U>.
  void accumulate_adjoint(const Eigen::MatrixXd& U, Eigen::VectorXd& out) const;
};

/// Standard-form conic program over a free decision vector x:
///
///   minimize  objective' x
///   s.t.      eq_matrix x = eq_rhs,   each PsdBlock(x) >= 0.
///
/// `maximize` only records that the caller negated its objective, so that
/// original_value() can report the value in the caller's sense.
struct ConicProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  std::vector<PsdBlock> blocks;
  bool maximize = false;

  int num_eq() const { return static_cast<int>(eq_matrix.rows()); }
  double original_value(double min_form_value) const { return maximize ? -min_form_value : min_form_value; }
  void validate() const;
};

/// Text dump (objective, equality triplets, block terms) for cross-checking
/// against external solvers.
void write_problem_dump(const ConicProblem& problem, std::ostream& out);

}  // namespace tensor_spectra
