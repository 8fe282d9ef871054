#include "tensor_spectra/conic.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace tensor_spectra {

Eigen::MatrixXd PsdBlock::evaluate(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out = constant.size() == 0 ? Eigen::MatrixXd::Zero(size, size) : constant;
  for (const auto& t : terms) {
    const double v = t.coeff * x[t.var];
    out(t.row, t.col) += v;
    if (t.row != t.col) out(t.col, t.row) += v;
  }
  return out;
}

void PsdBlock::accumulate_adjoint(const Eigen::MatrixXd& U, Eigen::VectorXd& out) const {
  for (const auto& t : terms) {
    const double u = t.row == t.col ? U(t.row, t.col) : U(t.row, t.col) + U(t.col, t.row);
    out[t.var] += t.coeff * u;
  }
}

void ConicProblem::validate() const {
  if (num_vars <= 0) throw std::invalid_argument("conic problem needs at least one variable");
  if (objective.size() != num_vars) throw std::invalid_argument("objective length mismatch");
  if (eq_matrix.rows() != eq_rhs.size() || (eq_matrix.rows() > 0 && eq_matrix.cols() != num_vars))
    throw std::invalid_argument("equality system shape mismatch");
  if (!eq_rhs.allFinite()) throw std::invalid_argument("equality right-hand side is not finite");
  if (blocks.empty()) throw std::invalid_argument("conic problem needs at least one PSD block");
  for (const auto& b : blocks) {
    if (b.size <= 0) throw std::invalid_argument("empty PSD block");
    if (b.constant.size() != 0 && (b.constant.rows() != b.size || b.constant.cols() != b.size))
      throw std::invalid_argument("PSD block constant has wrong shape");
    for (const auto& t : b.terms) {
      if (t.var < 0 || t.var >= num_vars) throw std::invalid_argument("PSD block references invalid variable");
      if (t.row < 0 || t.col < t.row || t.col >= b.size) throw std::invalid_argument("PSD block term out of range");
    }
  }
}

void write_problem_dump(const ConicProblem& problem, std::ostream& out) {
  out << std::setprecision(17);
  out << "# conic problem: minimize c'x s.t. A x = b, blocks(x) psd\n";
  out << "vars " << problem.num_vars << "\n";
  out << "sense " << (problem.maximize ? "max" : "min") << "\n";
  out << "objective";
  for (int i = 0; i < problem.num_vars; ++i) out << ' ' << problem.objective[i];
  out << "\n";
  out << "equalities " << problem.num_eq() << "\n";
  for (int r = 0; r < problem.num_eq(); ++r)
    for (int c = 0; c < problem.num_vars; ++c)
      if (problem.eq_matrix(r, c) != 0.0) out << r << ' ' << c << ' ' << problem.eq_matrix(r, c) << "\n";
  out << "rhs";
  for (int r = 0; r < problem.num_eq(); ++r) out << ' ' << problem.eq_rhs[r];
  out << "\n";
  out << "blocks " << problem.blocks.size() << "\n";
  for (const auto& b : problem.blocks) {
    out << "block " << b.size << ' ' << b.terms.size() << ' ' << (b.label.empty() ? "-" : b.label) << "\n";
    for (const auto& t : b.terms) out << t.row << ' ' << t.col << ' ' << t.var << ' ' << t.coeff << "\n";
    if (b.constant.size() != 0)
      for (int r = 0; r < b.size; ++r)
        for (int c = r; c < b.size; ++c)
          if (b.constant(r, c) != 0.0) out << "const " << r << ' ' << c << ' ' << b.constant(r, c) << "\n";
  }
}

}  // namespace tensor_spectra
