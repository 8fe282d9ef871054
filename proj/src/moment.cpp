#include "tensor_spectra/moment.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace tensor_spectra {

MomentVector::MomentVector(int n_, int k_)
    : n(n_), k(k_), values(Eigen::VectorXd::Zero(basis_size(n_, 2 * k_))) {}

MomentVector::MomentVector(int n_, int k_, Eigen::VectorXd v) : n(n_), k(k_), values(std::move(v)) {
  if (values.size() != basis_size(n, 2 * k)) throw std::invalid_argument("moment vector length mismatch");
}

MomentVector MomentVector::of_point(const Eigen::VectorXd& u, int k) {
  const int n = static_cast<int>(u.size());
  MomentVector y(n, k);
  const auto basis = monomial_basis(n, 2 * k);
  for (std::size_t r = 0; r < basis.size(); ++r) y.values[static_cast<Eigen::Index>(r)] = basis[r].evaluate(u);
  return y;
}

double MomentVector::operator[](const Monomial& alpha) const {
  const auto r = monomial_rank(alpha);
  if (r >= values.size()) throw std::out_of_range("moment index beyond truncation degree");
  return values[r];
}

double MomentVector::pair(const Polynomial& f) const {
  if (f.num_vars() != n) throw std::invalid_argument("polynomial and moment vector disagree on n");
  double acc = 0.0;
  for (const auto& [mono, c] : f.terms()) acc += c * (*this)[mono];
  return acc;
}

MomentVector MomentVector::truncate(int t) const {
  if (t > k) throw std::invalid_argument("cannot truncate to a higher order");
  return MomentVector(n, t, values.head(basis_size(n, 2 * t)));
}

LocalizingStructure localizing_structure(const Polynomial& q, int k) {
  const int n = q.num_vars();
  const int dq = q.degree();
  if (dq > 2 * k) throw std::invalid_argument("localizing polynomial degree exceeds 2k");
  LocalizingStructure s;
  s.n = n;
  s.k = k;
  const int half = k - half_degree(dq);
  const auto basis = monomial_basis(n, half);
  s.side = static_cast<int>(basis.size());
  for (int i = 0; i < s.side; ++i) {
    for (int j = i; j < s.side; ++j) {
      const Monomial bg = basis[i] * basis[j];
      for (const auto& [alpha, c] : q.terms())
        s.terms.push_back({i, j, static_cast<int>(monomial_rank(alpha * bg)), c});
    }
  }
  return s;
}

LocalizingStructure moment_structure(int n, int k) { return localizing_structure(Polynomial::constant(n, 1.0), k); }

Eigen::MatrixXd assemble_matrix(const LocalizingStructure& s, const MomentVector& y) {
  if (y.n != s.n) throw std::invalid_argument("moment vector has wrong number of variables");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.side, s.side);
  for (const auto& t : s.terms) {
    if (t.moment >= y.values.size()) throw std::logic_error("localizing structure references a missing moment");
    const double v = t.coeff * y.values[t.moment];
    out(t.row, t.col) += v;
    if (t.row != t.col) out(t.col, t.row) += v;
  }
  return out;
}

Eigen::MatrixXd moment_matrix(const MomentVector& y, int t) { return assemble_matrix(moment_structure(y.n, t), y); }

namespace {

PsdBlock to_block(const LocalizingStructure& s, std::string label) {
  PsdBlock block;
  block.size = s.side;
  block.constant = Eigen::MatrixXd::Zero(s.side, s.side);
  block.label = std::move(label);
  block.terms.reserve(s.terms.size());
  for (const auto& t : s.terms) block.terms.push_back({t.row, t.col, t.moment, t.coeff});
  return block;
}

using SparseRow = std::vector<std::pair<int, double>>;

// Greedy order-preserving selection of linearly independent rows. A dependent
// row whose right-hand side contradicts the kept rows is retained so that the
// solver sees (and certifies) the inconsistency.
void append_independent_rows(const std::vector<SparseRow>& rows, const std::vector<double>& rhs, int num_vars,
                             ConicProblem& problem) {
  constexpr double kRankTol = 1e-10;
  constexpr double kConsistencyTol = 1e-8;
  Eigen::MatrixXd basis(num_vars, std::min<int>(num_vars, static_cast<int>(rows.size())));
  std::vector<double> basis_rhs;
  std::vector<int> kept;
  int rank = 0;
  Eigen::VectorXd a(num_vars);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a.setZero();
    for (const auto& [col, v] : rows[r]) a[col] += v;
    const double norm0 = a.norm();
    if (norm0 == 0.0) {
      if (std::abs(rhs[r]) > kConsistencyTol) kept.push_back(static_cast<int>(r));
      continue;
    }
    Eigen::VectorXd resid = a;
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(rank);
    for (int pass = 0; pass < 2 && rank > 0; ++pass) {
      const Eigen::VectorXd proj = basis.leftCols(rank).transpose() * resid;
      resid -= basis.leftCols(rank) * proj;
      coef += proj;
    }
    const double rn = resid.norm();
    double predicted = 0.0;
    for (int i = 0; i < rank; ++i) predicted += coef[i] * basis_rhs[i];
    if (rn > kRankTol * norm0 && rank < basis.cols()) {
      basis.col(rank) = resid / rn;
      basis_rhs.push_back((rhs[r] - predicted) / rn);
      ++rank;
      kept.push_back(static_cast<int>(r));
    } else if (std::abs(rhs[r] - predicted) > kConsistencyTol * std::max(1.0, std::abs(rhs[r]))) {
      kept.push_back(static_cast<int>(r));
    }
  }
  problem.eq_matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kept.size()), num_vars);
  problem.eq_rhs.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (const auto& [col, v] : rows[kept[i]]) problem.eq_matrix(static_cast<Eigen::Index>(i), col) += v;
    problem.eq_rhs[static_cast<Eigen::Index>(i)] = rhs[kept[i]];
  }
}

}  // namespace

ConicProblem build_min_relaxation(const Polynomial& f, const std::vector<Polynomial>& eqs,
                                  const std::vector<Polynomial>& ineqs, int k) {
  const int n = f.num_vars();
  if (f.degree() > 2 * k) throw std::invalid_argument("objective degree exceeds 2k");
  for (const auto& p : eqs)
    if (p.num_vars() != n || p.degree() > 2 * k) throw std::invalid_argument("equality degree exceeds 2k");
  for (const auto& p : ineqs)
    if (p.num_vars() != n || p.degree() > 2 * k) throw std::invalid_argument("inequality degree exceeds 2k");

  ConicProblem problem;
  problem.num_vars = static_cast<int>(basis_size(n, 2 * k));
  problem.objective = Eigen::VectorXd::Zero(problem.num_vars);
  for (const auto& [alpha, c] : f.terms()) problem.objective[monomial_rank(alpha)] += c;

  // <1, y> = 1 first, then every distinct cell of L_h^{(k)}(y) = 0.
  std::vector<SparseRow> rows{{{0, 1.0}}};
  std::vector<double> rhs{1.0};
  std::map<SparseRow, bool> seen;
  for (const auto& h : eqs) {
    if (h.is_zero()) continue;
    const auto s = localizing_structure(h, k);
    std::size_t t = 0;
    while (t < s.terms.size()) {
      std::map<int, double> cell;
      const int row = s.terms[t].row;
      const int col = s.terms[t].col;
      for (; t < s.terms.size() && s.terms[t].row == row && s.terms[t].col == col; ++t)
        cell[s.terms[t].moment] += s.terms[t].coeff;
      SparseRow sparse(cell.begin(), cell.end());
      if (seen.emplace(sparse, true).second) {
        rows.push_back(std::move(sparse));
        rhs.push_back(0.0);
      }
    }
  }
  append_independent_rows(rows, rhs, problem.num_vars, problem);

  problem.blocks.push_back(to_block(moment_structure(n, k), "moment"));
  for (std::size_t i = 0; i < ineqs.size(); ++i)
    problem.blocks.push_back(to_block(localizing_structure(ineqs[i], k), "localizing-" + std::to_string(i)));
  return problem;
}

ConicProblem build_max_relaxation(const Polynomial& f, const std::vector<Polynomial>& eqs,
                                  const std::vector<Polynomial>& ineqs, int k) {
  ConicProblem problem = build_min_relaxation(f.scale(-1.0), eqs, ineqs, k);
  problem.maximize = true;
  return problem;
}

}  // namespace tensor_spectra
