#include "tensor_spectra/extract.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tensor_spectra {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MomentVector AtomicMeasure::moments() const {
  if (atoms.empty()) throw std::logic_error("empty atomic measure");
  const int n = static_cast<int>(atoms.front().point.size());
  MomentVector y(n, t);
  for (const auto& a : atoms) y.values += a.weight * MomentVector::of_point(a.point, t).values;
  return y;
}

int numerical_rank(const MatrixXd& m, double rank_tol, double abs_floor) {
  if (m.size() == 0) return 0;
  const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(m).singularValues();
  if (sv.size() == 0 || sv[0] <= abs_floor) return 0;
  const double cut = rank_tol * std::max(sv[0], abs_floor);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++r;
  return r;
}

std::optional<FlatTruncation> flat_truncation(const MomentVector& y, int k0, double rank_tol) {
  for (int t = std::max(k0, 1); t <= y.k; ++t) {
    const int low = numerical_rank(moment_matrix(y, t - k0), rank_tol);
    const int high = numerical_rank(moment_matrix(y, t), rank_tol);
    if (low == high && high > 0) return FlatTruncation{t, high};
  }
  return std::nullopt;
}

namespace {

// Factor M = V V' keeping the r dominant eigen-directions.
MatrixXd psd_factor(const MatrixXd& m, int r) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  const Eigen::Index size = m.rows();
  MatrixXd v(size, r);
  for (int j = 0; j < r; ++j) {
    const Eigen::Index idx = size - 1 - j;
    v.col(j) = es.eigenvectors().col(idx) * std::sqrt(std::max(es.eigenvalues()[idx], 0.0));
  }
  return v;
}

bool simple_spectrum(const MatrixXd& t, double rel_gap) {
  const VectorXd d = t.diagonal();
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    for (Eigen::Index j = i + 1; j < d.size(); ++j)
      if (std::abs(d[i] - d[j]) <= rel_gap * scale) return false;
  return true;
}

}  // namespace

AtomicMeasure extract_atoms(const MomentVector& y, int t, const ExtractOptions& options) {
  if (t < 1 || t > y.k) throw std::invalid_argument("extraction order outside the moment vector");
  const int n = y.n;
  const MatrixXd mt = moment_matrix(y, t);
  const int r = numerical_rank(mt, options.rank_tol);
  if (r == 0) throw ExtractionError("moment matrix is numerically zero");

  const MatrixXd v = psd_factor(mt, r);
  const auto basis = monomial_basis(n, t);
  const auto low = static_cast<Eigen::Index>(basis_size(n, t - 1));
  if (low < r) throw ExtractionError("rank exceeds the size of the lower-degree basis");

  // Pick r well-conditioned rows among monomials of degree <= t-1; U = V V_piv^{-1}
  // has the identity on those rows (column echelon form up to permutation).
  Eigen::ColPivHouseholderQR<MatrixXd> qr(v.topRows(low).transpose());
  std::vector<int> piv(r);
  for (int j = 0; j < r; ++j) piv[j] = qr.colsPermutation().indices()[j];
  MatrixXd vp(r, r);
  for (int j = 0; j < r; ++j) vp.row(j) = v.row(piv[j]);
  Eigen::FullPivLU<MatrixXd> lu(vp.transpose());
  if (!lu.isInvertible()) throw ExtractionError("pivot block is singular");
  const MatrixXd u = lu.solve(v.transpose()).transpose();  // N_t x r

  std::vector<MatrixXd> mult(n, MatrixXd(r, r));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) {
      Monomial shifted = basis[piv[j]];
      shifted.exponents[i] += 1;
      mult[i].row(j) = u.row(monomial_rank(shifted));
    }
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int draw = 0; draw < options.max_draws; ++draw) {
    VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = unif(rng) + 1e-3;
    xi /= xi.sum();
    MatrixXd combo = MatrixXd::Zero(r, r);
    for (int i = 0; i < n; ++i) combo += xi[i] * mult[i];

    Eigen::RealSchur<MatrixXd> schur(combo);
    const MatrixXd& tm = schur.matrixT();
    bool triangular = true;
    for (int j = 0; j + 1 < r; ++j)
      if (std::abs(tm(j + 1, j)) > 1e-8 * std::max(1.0, tm.norm())) triangular = false;
    if (!triangular || !simple_spectrum(tm, 1e-8)) continue;

    // The N_i commute, so the Schur basis of the combination triangularizes
    // each of them; diagonal entries q_j' N_i q_j are the atom coordinates.
    const MatrixXd& q = schur.matrixU();
    AtomicMeasure measure;
    measure.t = t;
    std::vector<VectorXd> points(r, VectorXd(n));
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < n; ++i) points[j][i] = q.col(j).dot(mult[i] * q.col(j));

    // Weights from a least-squares fit of all moments of degree <= 2t.
    MatrixXd full(y.truncate(t).values.size(), r);
    for (int j = 0; j < r; ++j) full.col(j) = MomentVector::of_point(points[j], t).values;
    const VectorXd target = y.truncate(t).values;
    const VectorXd c = full.colPivHouseholderQr().solve(target);
    for (int j = 0; j < r; ++j) measure.atoms.push_back({points[j], c[j]});
    measure.residual = (full * c - target).cwiseAbs().maxCoeff();
    if (measure.residual > options.residual_tol) continue;
    std::sort(measure.atoms.begin(), measure.atoms.end(), [](const Atom& a, const Atom& b) {
      for (Eigen::Index i = 0; i < a.point.size(); ++i)
        if (std::abs(a.point[i] - b.point[i]) > 1e-9) return a.point[i] < b.point[i];
      return false;
    });
    return measure;
  }
  throw ExtractionError("atom extraction failed after " + std::to_string(options.max_draws) + " draws");
}

}  // namespace tensor_spectra
