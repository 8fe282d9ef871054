#include <gtest/gtest.h>

#include <sstream>

#include "tensor_spectra/eigen_driver.hpp"
#include "tensor_spectra/moment.hpp"
#include "tensor_spectra/oracle.hpp"
#include "tensor_spectra/sdp_solver.hpp"
#include "test_support.hpp"

using namespace tensor_spectra;
using namespace tensor_spectra::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string moment_name(int n, int rank, int max_degree) {
  const Monomial a = monomial_unrank(n, max_degree, rank);
  std::string s = "y_{";
  for (int e : a.exponents) s += std::to_string(e);
  return s + "}";
}

// Symbolic rendering of a cell: positive terms first, then negative ones,
// each group in graded order; unit coefficients only.
std::vector<std::vector<std::string>> render(const LocalizingStructure& s) {
  std::vector<std::vector<std::vector<std::pair<int, double>>>> cells(
      s.side, std::vector<std::vector<std::pair<int, double>>>(s.side));
  for (const auto& t : s.terms) {
    cells[t.row][t.col].push_back({t.moment, t.coeff});
    if (t.row != t.col) cells[t.col][t.row].push_back({t.moment, t.coeff});
  }
  std::vector<std::vector<std::string>> out(s.side, std::vector<std::string>(s.side));
  for (int i = 0; i < s.side; ++i) {
    for (int j = 0; j < s.side; ++j) {
      auto terms = cells[i][j];
      std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        if ((a.second > 0) != (b.second > 0)) return a.second > 0;
        return a.first < b.first;
      });
      std::string text;
      for (const auto& [moment, coeff] : terms) {
        if (!text.empty() || coeff < 0) text += coeff < 0 ? "-" : "+";
        text += moment_name(s.n, moment, 2 * s.k);
      }
      out[i][j] = text;
    }
  }
  return out;
}

std::vector<std::vector<std::string>> split_rows(const std::string& table) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(table);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, '&')) {
      cell.erase(std::remove(cell.begin(), cell.end(), ' '), cell.end());
      row.push_back(cell);
    }
    rows.push_back(row);
  }
  return rows;
}

Polynomial random_poly(int n, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(n);
  for (const auto& mono : monomial_basis(n, degree)) p = p + Polynomial::monomial(mono, u(rng));
  return p;
}

VectorXd coefficient_vector(const Polynomial& p, int side_degree) {
  const auto basis = monomial_basis(p.num_vars(), side_degree);
  VectorXd v(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) v[i] = p.coefficient(basis[i]);
  return v;
}

double feasibility_violation(const ConicProblem& p, const VectorXd& x) {
  double worst = p.num_eq() ? (p.eq_matrix * x - p.eq_rhs).cwiseAbs().maxCoeff() : 0.0;
  for (const auto& b : p.blocks) {
    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(b.evaluate(x)).eigenvalues().minCoeff();
    worst = std::max(worst, -lmin);
  }
  return worst;
}

}  // namespace

TEST(MomentStructure, MomentMatrixMatchesDisplay) {
  const std::string expected =
      "y_{00} & y_{10} & y_{01} & y_{20} & y_{11} & y_{02}\n"
      "y_{10} & y_{20} & y_{11} & y_{30} & y_{21} & y_{12}\n"
      "y_{01} & y_{11} & y_{02} & y_{21} & y_{12} & y_{03}\n"
      "y_{20} & y_{30} & y_{21} & y_{40} & y_{31} & y_{22}\n"
      "y_{11} & y_{21} & y_{12} & y_{31} & y_{22} & y_{13}\n"
      "y_{02} & y_{12} & y_{03} & y_{22} & y_{13} & y_{04}";
  EXPECT_EQ(render(moment_structure(2, 2)), split_rows(expected));
  EXPECT_EQ(render(localizing_structure(Polynomial::constant(2, 1.0), 2)), split_rows(expected));
}

TEST(MomentStructure, LocalizingMatrixMatchesDisplay) {
  const Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  const std::string expected =
      "y_{11}-y_{20}-y_{02} & y_{21}-y_{30}-y_{12} & y_{12}-y_{21}-y_{03}\n"
      "y_{21}-y_{30}-y_{12} & y_{31}-y_{40}-y_{22} & y_{22}-y_{31}-y_{13}\n"
      "y_{12}-y_{21}-y_{03} & y_{22}-y_{31}-y_{13} & y_{13}-y_{22}-y_{04}";
  const auto s = localizing_structure(x1 * x2 - x1.pow(2) - x2.pow(2), 2);
  EXPECT_EQ(s.side, 3);
  EXPECT_EQ(render(s), split_rows(expected));
}

TEST(MomentStructure, DegreeOverflowThrows) {
  EXPECT_THROW(localizing_structure(Polynomial::variable(2, 0).pow(5), 2), std::invalid_argument);
  EXPECT_THROW(build_min_relaxation(Polynomial::variable(1, 0).pow(3), {}, {}, 1), std::invalid_argument);
}

TEST(MomentStructure, SymmetricAndWithinDegree) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3, k = 2 + trial % 2;
    const Polynomial q = random_poly(n, 1 + trial % 4, rng);
    const auto s = localizing_structure(q, k);
    EXPECT_EQ(s.side, basis_size(n, k - half_degree(q.degree())));
    for (const auto& t : s.terms) {
      EXPECT_LE(t.row, t.col);
      EXPECT_LE(monomial_unrank(n, 2 * k, t.moment).degree(), 2 * k);
    }
    MomentVector y(n, k, random_vector(static_cast<int>(basis_size(n, 2 * k)), rng));
    const MatrixXd l = assemble_matrix(s, y);
    EXPECT_EQ(l, l.transpose());
  }
}

TEST(MomentStructure, LocalizingIdentityOnRandomInputs) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3, k = 2 + trial % 2;
    const Polynomial q = random_poly(n, 1 + trial % 3, rng);
    const int side_degree = k - half_degree(q.degree());
    const Polynomial p = random_poly(n, side_degree, rng);
    MomentVector y(n, k, random_vector(static_cast<int>(basis_size(n, 2 * k)), rng));
    const VectorXd v = coefficient_vector(p, side_degree);
    const double lhs = v.dot(assemble_matrix(localizing_structure(q, k), y) * v);
    const double rhs = y.pair(q * p * p);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(MomentStructure, PointMomentsGiveRankOneAndPointValues) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3, k = 2 + trial % 2;
    const VectorXd u = random_vector(n, rng);
    const MomentVector y = MomentVector::of_point(u, k);
    const MatrixXd m = moment_matrix(y, k);
    const VectorXd uk = MomentVector::of_point(u, k).values.head(basis_size(n, k));
    EXPECT_LT((m - uk * uk.transpose()).norm(), 1e-12 * m.norm());

    const Polynomial f = random_poly(n, 2 * k, rng);
    EXPECT_NEAR(y.pair(f), f.evaluate(u), 1e-10 * std::max(1.0, std::abs(f.evaluate(u))));

    const Polynomial q = random_poly(n, 2, rng);
    const Polynomial p = random_poly(n, k - 1, rng);
    const VectorXd v = coefficient_vector(p, k - 1);
    const double expected = q.evaluate(u) * std::pow(p.evaluate(u), 2);
    EXPECT_NEAR(v.dot(assemble_matrix(localizing_structure(q, k), y) * v), expected,
                1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST(MomentStructure, AssemblyIsLinearAndUnitVectorIsCorner) {
  const auto s = moment_structure(2, 2);
  MomentVector e0(2, 2);
  e0.values.setZero();
  e0.values[0] = 1.0;
  MatrixXd expected = MatrixXd::Zero(6, 6);
  expected(0, 0) = 1.0;
  EXPECT_EQ(assemble_matrix(s, e0), expected);

  std::mt19937_64 rng(10);
  const int len = static_cast<int>(basis_size(2, 4));
  MomentVector y(2, 2, random_vector(len, rng)), z(2, 2, random_vector(len, rng));
  const double a = 0.75, b = -2.5;  // exactly representable
  MomentVector combo(2, 2, a * y.values + b * z.values);
  const MatrixXd lhs = assemble_matrix(s, combo);
  const MatrixXd rhs = a * assemble_matrix(s, y) + b * assemble_matrix(s, z);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Relaxation, ToyProblems) {
  const Polynomial x = Polynomial::variable(1, 0);
  const Polynomial one = Polynomial::constant(1, 1.0);
  const ConicSolution min_sol = solve(build_min_relaxation(x.pow(2), {x.pow(2) - one}, {}, 1));
  ASSERT_EQ(min_sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(min_sol.objective, 1.0, 1e-6);

  const ConicProblem max_p = build_max_relaxation(x, {x.pow(2) - one}, {Polynomial::constant(1, 0.5) - x}, 2);
  const ConicSolution max_sol = solve(max_p);
  ASSERT_EQ(max_sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(max_p.original_value(max_sol.objective), -1.0, 1e-6);

  const ConicProblem empty = build_max_relaxation(x, {x.pow(2) - one}, {Polynomial::constant(1, -2.0) - x}, 2);
  const ConicSolution empty_sol = solve(empty);
  EXPECT_EQ(empty_sol.status, SolveStatus::PrimalInfeasible);
  EXPECT_TRUE(verify_solution(empty, empty_sol).passed());
}

TEST(Relaxation, StructureOfMinRelaxation) {
  const EigenSystem sys = z_system(load("ex51.tsr"));
  const ConicProblem p = build_min_relaxation(sys.f, sys.h, {sys.f}, 3);
  EXPECT_EQ(p.num_vars, basis_size(2, 6));
  ASSERT_EQ(p.blocks.size(), 2u);
  EXPECT_EQ(p.blocks[0].size, basis_size(2, 3));
  EXPECT_EQ(p.blocks[1].size, basis_size(2, 1));
  EXPECT_NO_THROW(p.validate());
}

TEST(Relaxation, InjectedEigenvectorsAreFeasible) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int m = 3 + trial % 2;
    const Tensor a = random_symmetric_tensor(m, 2, rng);
    for (EigenKind kind : {EigenKind::Z, EigenKind::H}) {
      const EigenSystem sys = eigen_system(kind, a);
      const OracleResult oracle = kind == EigenKind::Z ? brute_z_n2(a) : brute_h_n2(a);
      for (const auto& pair : oracle.pairs) {
        for (int k = sys.k0; k <= sys.k0 + 1; ++k) {
          const VectorXd y = MomentVector::of_point(pair.u, k).values;
          const ConicProblem min_p = build_min_relaxation(sys.f, sys.h, {}, k);
          EXPECT_LT(feasibility_violation(min_p, y), 1e-8);
          EXPECT_NEAR(min_p.objective.dot(y), pair.lambda, 1e-9 * std::max(1.0, std::abs(pair.lambda)));
          const Polynomial shifted = sys.f - Polynomial::constant(2, pair.lambda - 0.01);
          EXPECT_LT(feasibility_violation(build_min_relaxation(sys.f, sys.h, {shifted}, k), y), 1e-8);
          const Polynomial capped = Polynomial::constant(2, pair.lambda + 0.01) - sys.f;
          const ConicProblem max_p = build_max_relaxation(sys.f, sys.h, {capped}, k);
          EXPECT_LT(feasibility_violation(max_p, y), 1e-8);
          EXPECT_NEAR(max_p.original_value(max_p.objective.dot(y)), pair.lambda, 1e-9 * std::max(1.0, std::abs(pair.lambda)));
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Relaxation, HierarchyBoundsAreMonotone) {
  for (const char* name : {"ex51.tsr", "ex14.tsr"}) {
    for (EigenKind kind : {EigenKind::Z, EigenKind::H}) {
      const EigenSystem sys = eigen_system(kind, load(name));
      double previous = -INFINITY;
      for (int k = sys.k0; k <= sys.k0 + 2; ++k) {
        const ConicProblem p = build_min_relaxation(sys.f, sys.h, {}, k);
        const ConicSolution sol = solve(p);
        ASSERT_EQ(sol.status, SolveStatus::Optimal) << name << " k=" << k;
        EXPECT_GE(sol.objective, previous - 1e-6) << name << " k=" << k;
        previous = sol.objective;
        const MomentVector y(2, k, sol.x);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(moment_matrix(y, k)).eigenvalues().minCoeff(), -1e-7);
      }
    }
  }
}
