#include "tensor_spectra/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace tensor_spectra {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal-infeasible";
    case SolveStatus::DualInfeasible: return "dual-infeasible";
    case SolveStatus::Inaccurate: return "inaccurate";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using BlockVec = std::vector<MatrixXd>;

struct Entry {
  int row;
  int col;
  double coeff;
};

// PSD block with its linear part grouped by variable and expanded to both
// triangles.
struct BlockData {
  int size = 0;
  MatrixXd constant;
  std::vector<int> vars;                    // variables present in the block
  std::vector<std::vector<Entry>> entries;  // parallel to vars
};

double inner(const BlockVec& a, const BlockVec& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j].cwiseProduct(b[j]).sum();
  return acc;
}

double norm(const BlockVec& a) { return std::sqrt(inner(a, a)); }

void axpy(double alpha, const BlockVec& x, BlockVec& y) {
  for (std::size_t j = 0; j < x.size(); ++j) y[j] += alpha * x[j];
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// A factor L with M = L L', falling back to a clipped eigendecomposition
// when the Cholesky factorization fails.
MatrixXd psd_factor(const MatrixXd& m) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  VectorXd d = es.eigenvalues().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

// Nesterov-Todd scaling point of (s, z): r' z r = r^{-1} s r^{-T} = diag(lambda).
struct Scaling {
  MatrixXd r;    // W' u = r u r'
  MatrixXd rti;  // r^{-T}
  VectorXd lambda;
};

Scaling nt_scaling(const MatrixXd& s, const MatrixXd& z) {
  const MatrixXd ls = psd_factor(s);
  const MatrixXd lz = psd_factor(z);
  Eigen::JacobiSVD<MatrixXd> svd(lz.transpose() * ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd sig = svd.singularValues().cwiseMax(std::numeric_limits<double>::min());
  const VectorXd isq = sig.cwiseSqrt().cwiseInverse();
  return {ls * svd.matrixV() * isq.asDiagonal(), lz * svd.matrixU() * isq.asDiagonal(), sig};
}

class Engine {
 public:
  Engine(const ConicProblem& problem, const SolverOptions& options) : problem_(problem), opts_(options) {}

  ConicSolution run();

 private:
  // --- problem operators -------------------------------------------------
  BlockVec g_apply(const VectorXd& x) const {  // G x = -sum x_i B_i
    BlockVec out(blocks_.size());
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const auto& b = blocks_[j];
      out[j] = MatrixXd::Zero(b.size, b.size);
      for (std::size_t v = 0; v < b.vars.size(); ++v) {
        const double xv = x[b.vars[v]];
        if (xv == 0.0) continue;
        for (const auto& e : b.entries[v]) out[j](e.row, e.col) -= e.coeff * xv;
      }
    }
    return out;
  }

  VectorXd gt_apply(const BlockVec& u) const {  // G' u = -adj(u)
    VectorXd out = VectorXd::Zero(n_);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const auto& b = blocks_[j];
      for (std::size_t v = 0; v < b.vars.size(); ++v) {
        double acc = 0.0;
        for (const auto& e : b.entries[v]) acc += e.coeff * u[j](e.row, e.col);
        out[b.vars[v]] -= acc;
      }
    }
    return out;
  }

  BlockVec zeros() const {
    BlockVec out(blocks_.size());
    for (std::size_t j = 0; j < blocks_.size(); ++j) out[j] = MatrixXd::Zero(blocks_[j].size, blocks_[j].size);
    return out;
  }


  // --- scaling helpers ----------------------------------------------------
  BlockVec apply_wtw(const BlockVec& u) const {  // W'W u = P u P
    BlockVec out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      const MatrixXd p = scaling_[j].r * scaling_[j].r.transpose();
      out[j] = symmetrize(p * u[j] * p);
    }
    return out;
  }

  BlockVec apply_wtw_inv(const BlockVec& u) const {  // P^{-1} u P^{-1}
    BlockVec out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = symmetrize(pinv_[j] * u[j] * pinv_[j]);
    return out;
  }



  // --- KKT system ---------------------------------------------------------
  //   A' dy + G' dz = bx,  A dx = by,  G dx - W'W dz = bz.
  void factor_kkt();
  void solve_kkt_once(const VectorXd& bx, const VectorXd& by, const BlockVec& bz, VectorXd& dx, VectorXd& dy,
                      BlockVec& dz) const;
  void solve_kkt(const VectorXd& bx, const VectorXd& by, const BlockVec& bz, VectorXd& dx, VectorXd& dy,
                 BlockVec& dz) const;

  bool prepare_equalities(ConicSolution& early);
  double max_step(const std::vector<VectorXd>& lambda, const BlockVec& ds, const BlockVec& dz, double tau,
                  double dtau, double kappa, double dkappa) const;

  const ConicProblem& problem_;
  SolverOptions opts_;
  int n_ = 0;
  int cone_degree_ = 0;
  std::vector<BlockData> blocks_;
  MatrixXd a_;             // independent equality rows
  VectorXd b_;
  std::vector<int> eq_rows_;  // original row of each kept row
  BlockVec h_;
  MatrixXd q1_, q2_, r_;   // A' = q1 r, q2 spans null(A)
  std::vector<Scaling> scaling_;
  BlockVec pinv_;
  MatrixXd hess_;
  Eigen::LLT<MatrixXd> hred_;
};

bool Engine::prepare_equalities(ConicSolution& early) {
  const MatrixXd& a = problem_.eq_matrix;
  const VectorXd& b = problem_.eq_rhs;
  const int p = static_cast<int>(a.rows());
  if (p == 0) {
    a_ = MatrixXd::Zero(0, n_);
    b_ = VectorXd::Zero(0);
    q1_ = MatrixXd::Zero(n_, 0);
    q2_ = MatrixXd::Identity(n_, n_);
    r_ = MatrixXd::Zero(0, 0);
    return true;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> cpqr(a.transpose());
  cpqr.setThreshold(1e-12);
  const int rank = static_cast<int>(cpqr.rank());
  if (rank < p) {
    // Least-squares residual of an inconsistent system is a Farkas ray.
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
    const VectorXd resid = b - a * cod.solve(b);
    if (resid.norm() > 1e-9 * std::max(1.0, b.norm())) {
      early.status = SolveStatus::PrimalInfeasible;
      early.ray_eq = resid / resid.squaredNorm();
      early.ray_blocks.clear();
      for (const auto& blk : blocks_) early.ray_blocks.push_back(MatrixXd::Zero(blk.size, blk.size));
      early.infeasibility_residual = (a.transpose() * early.ray_eq).norm();
      return false;
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < rank; ++i) keep.push_back(static_cast<int>(cpqr.colsPermutation().indices()[i]));
  std::sort(keep.begin(), keep.end());
  eq_rows_ = keep;
  a_.resize(rank, n_);
  b_.resize(rank);
  for (int i = 0; i < rank; ++i) {
    a_.row(i) = a.row(keep[i]);
    b_[i] = b[keep[i]];
  }
  Eigen::HouseholderQR<MatrixXd> qr(a_.transpose());
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n_, n_);
  q1_ = q.leftCols(rank);
  q2_ = q.rightCols(n_ - rank);
  r_ = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  return true;
}

void Engine::factor_kkt() {
  pinv_.resize(blocks_.size());
  hess_ = MatrixXd::Zero(n_, n_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const auto& blk = blocks_[j];
    pinv_[j] = symmetrize(scaling_[j].rti * scaling_[j].rti.transpose());
    const MatrixXd& pi = pinv_[j];
    MatrixXd v(blk.size, blk.size);
    for (std::size_t a = 0; a < blk.vars.size(); ++a) {
      // V = P^{-1} B_a P^{-1} as a sum of rank-one terms.
      v.setZero();
      for (const auto& e : blk.entries[a]) v.noalias() += e.coeff * pi.col(e.row) * pi.row(e.col);
      for (std::size_t c = 0; c < blk.vars.size(); ++c) {
        double acc = 0.0;
        for (const auto& e : blk.entries[c]) acc += e.coeff * v(e.row, e.col);
        hess_(blk.vars[a], blk.vars[c]) += acc;
      }
    }
  }
  hess_ = symmetrize(hess_);
  MatrixXd hred = q2_.transpose() * hess_ * q2_;
  hred = symmetrize(hred);
  hred_.compute(hred);
  double reg = 1e-14 * std::max(1.0, hred.diagonal().cwiseAbs().maxCoeff());
  while (hred_.info() != Eigen::Success && reg < 1e10) {
    MatrixXd shifted = hred;
    shifted.diagonal().array() += reg;
    hred_.compute(shifted);
    reg *= 100.0;
  }
}

void Engine::solve_kkt_once(const VectorXd& bx, const VectorXd& by, const BlockVec& bz, VectorXd& dx, VectorXd& dy,
                            BlockVec& dz) const {
  // dz = (W'W)^{-1}(G dx - bz); substitute into the first row.
  const VectorXd rhs = bx + gt_apply(apply_wtw_inv(bz));
  const int p = static_cast<int>(a_.rows());
  VectorXd x0 = VectorXd::Zero(n_);
  if (p > 0) x0 = q1_ * r_.transpose().triangularView<Eigen::Lower>().solve(by);
  dx = x0;
  if (q2_.cols() > 0) dx += q2_ * hred_.solve(q2_.transpose() * (rhs - hess_ * x0));
  BlockVec gdx = g_apply(dx);
  axpy(-1.0, bz, gdx);
  dz = apply_wtw_inv(gdx);
  // A' dy = bx - G' dz, using the computed dz so the first row stays consistent.
  if (p > 0) dy = r_.triangularView<Eigen::Upper>().solve(q1_.transpose() * (bx - gt_apply(dz)));
  else dy = VectorXd::Zero(0);
}

void Engine::solve_kkt(const VectorXd& bx, const VectorXd& by, const BlockVec& bz, VectorXd& dx, VectorXd& dy,
                       BlockVec& dz) const {
  solve_kkt_once(bx, by, bz, dx, dy, dz);
  for (int refine = 0; refine < 4; ++refine) {
    VectorXd ex = bx - gt_apply(dz);
    if (a_.rows() > 0) ex -= a_.transpose() * dy;
    const VectorXd ey = by - a_ * dx;
    BlockVec ez = bz;
    axpy(-1.0, g_apply(dx), ez);
    axpy(1.0, apply_wtw(dz), ez);
    VectorXd cx, cy;
    BlockVec cz;
    solve_kkt_once(ex, ey, ez, cx, cy, cz);
    dx += cx;
    dy += cy;
    axpy(1.0, cz, dz);
  }
}

double Engine::max_step(const std::vector<VectorXd>& lambda, const BlockVec& ds, const BlockVec& dz, double tau,
                        double dtau, double kappa, double dkappa) const {
  double alpha = std::numeric_limits<double>::infinity();
  auto limit = [&](const VectorXd& lam, const MatrixXd& d) {
    const VectorXd isq = lam.cwiseSqrt().cwiseInverse();
    const MatrixXd scaled = isq.asDiagonal() * d * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(scaled), Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues().minCoeff();
    if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
  };
  for (std::size_t j = 0; j < ds.size(); ++j) {
    limit(lambda[j], ds[j]);
    limit(lambda[j], dz[j]);
  }
  if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
  if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
  return alpha;
}

ConicSolution Engine::run() {
  problem_.validate();
  n_ = problem_.num_vars;
  ConicSolution out;

  for (const auto& pb : problem_.blocks) {
    BlockData bd;
    bd.size = pb.size;
    bd.constant = pb.constant.size() == 0 ? MatrixXd::Zero(pb.size, pb.size) : symmetrize(pb.constant);
    std::vector<int> slot(n_, -1);
    for (const auto& t : pb.terms) {
      if (slot[t.var] < 0) {
        slot[t.var] = static_cast<int>(bd.vars.size());
        bd.vars.push_back(t.var);
        bd.entries.emplace_back();
      }
      auto& list = bd.entries[slot[t.var]];
      list.push_back({t.row, t.col, t.coeff});
      if (t.row != t.col) list.push_back({t.col, t.row, t.coeff});
    }
    cone_degree_ += pb.size;
    blocks_.push_back(std::move(bd));
  }
  h_.resize(blocks_.size());
  for (std::size_t j = 0; j < blocks_.size(); ++j) h_[j] = blocks_[j].constant;

  if (!prepare_equalities(out)) return out;

  const VectorXd& c = problem_.objective;
  const int p = static_cast<int>(a_.rows());
  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b_.norm());
  const double resz0 = std::max(1.0, norm(h_));

  // Starting point: least-squares primal and dual points with W = I.
  scaling_.assign(blocks_.size(), Scaling{});
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const int s = blocks_[j].size;
    scaling_[j] = {MatrixXd::Identity(s, s), MatrixXd::Identity(s, s), VectorXd::Ones(s)};
  }
  factor_kkt();
  VectorXd x, y, dxt, dyt;
  BlockVec zt, s0, z0;
  {
    solve_kkt(VectorXd::Zero(n_), b_, h_, x, dyt, zt);
    s0 = zt;
    for (auto& m : s0) m = -m;  // s = h - G x
    solve_kkt(-c, VectorXd::Zero(p), zeros(), dxt, y, z0);
  }
  auto shift_interior = [&](BlockVec& v) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& m : v) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    if (worst >= -1e-8 * std::max(norm(v), 1.0)) {
      for (auto& m : v) m += (1.0 + worst) * MatrixXd::Identity(m.rows(), m.cols());
    }
  };
  shift_interior(s0);
  shift_interior(z0);
  BlockVec s_cur = s0;
  BlockVec z_cur = z0;
  double tau = 1.0;
  double kappa = 1.0;

  struct Iterate {
    double merit = std::numeric_limits<double>::infinity();
    double pres = 0.0, dres = 0.0, gap = 0.0;
    VectorXd x, y;
    BlockVec s, z;
    double tau = 1.0, kappa = 1.0;
  } best;
  double pinf = std::numeric_limits<double>::infinity();
  int iter = 0;
  SolveStatus status = SolveStatus::IterationLimit;
  bool stalled = false;
  for (;; ++iter) {
    for (std::size_t j = 0; j < blocks_.size(); ++j) scaling_[j] = nt_scaling(s_cur[j], z_cur[j]);
    const BlockVec& s = s_cur;
    const BlockVec& z = z_cur;
    const BlockVec gx = g_apply(x);
    const VectorXd hrx = (p > 0 ? VectorXd(a_.transpose() * y) : VectorXd::Zero(n_)) + gt_apply(z);
    const VectorXd hry = a_ * x;
    BlockVec hrz = gx;
    axpy(1.0, s, hrz);
    const double hz = inner(h_, z);
    const double by = b_.dot(y);
    const double cx = c.dot(x);

    VectorXd rx = hrx + tau * c;
    VectorXd ry = hry - tau * b_;
    BlockVec rz = hrz;
    axpy(-tau, h_, rz);
    const double rt = kappa + cx + by + hz;

    const double gap_sz = inner(s, z);
    const double mu = (gap_sz + tau * kappa) / (cone_degree_ + 1);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double pres = std::max(ry.norm() / resy0, norm(rz) / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double gap = gap_sz / (tau * tau);
    const double relgap = std::max(gap, std::abs(pcost - dcost)) / (1.0 + std::abs(pcost));
    pinf = (hz + by < 0.0) ? hrx.norm() / (-(hz + by)) : std::numeric_limits<double>::infinity();
    const double dinf = (cx < 0.0) ? std::max(hry.norm() / resy0, norm(hrz) / resz0) / (-cx)
                                   : std::numeric_limits<double>::infinity();
    const double merit = std::max({pres, dres, relgap});
    if (merit < best.merit) best = {merit, pres, dres, relgap, x, y, s_cur, z_cur, tau, kappa};

    if (opts_.verbose)
      std::fprintf(stderr, "%3d pcost % .8e dcost % .8e gap %.2e pres %.2e dres %.2e pinf %.2e tau %.2e kap %.2e\n",
                   iter, pcost, dcost, relgap, pres, dres, pinf, tau, kappa);

    if (pres <= opts_.feas_tol && dres <= opts_.feas_tol && relgap <= opts_.gap_tol) {
      status = SolveStatus::Optimal;
      break;
    }
    if (pinf <= opts_.feas_tol) {
      status = SolveStatus::PrimalInfeasible;
      break;
    }
    if (dinf <= opts_.feas_tol) {
      status = SolveStatus::DualInfeasible;
      break;
    }
    // Near the optimum, rounding can make residuals grow again; stop and
    // fall back to the best iterate instead of wandering off.
    const bool diverging = best.merit <= opts_.inaccurate_tol && merit > 100.0 * best.merit;
    if (iter >= opts_.max_iter || stalled || diverging) {
      status = SolveStatus::IterationLimit;
      break;
    }

    factor_kkt();
    VectorXd dx2, dy2;
    BlockVec dz2;
    solve_kkt(-c, b_, h_, dx2, dy2, dz2);

    std::vector<VectorXd> lambda(blocks_.size());
    for (std::size_t j = 0; j < blocks_.size(); ++j) lambda[j] = scaling_[j].lambda;

    double sigma = 0.0;
    BlockVec ds_aff_scaled, dz_aff_scaled;
    double dtau_aff = 0.0, dkappa_aff = 0.0;
    double alpha = 0.0;
    VectorXd dx, dy;
    BlockVec dz, ds, ds_scaled, dz_scaled;
    double dtau = 0.0, dkappa = 0.0;

    for (int phase = 0; phase < 2; ++phase) {
      const double f = 1.0 - sigma;
      // Scaled complementarity right-hand side.
      BlockVec rc(blocks_.size());
      for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto& lam = lambda[j];
        MatrixXd m = MatrixXd::Zero(lam.size(), lam.size());
        m.diagonal() = -lam.cwiseProduct(lam) + VectorXd::Constant(lam.size(), sigma * mu);
        if (phase == 1) {
          const MatrixXd prod = ds_aff_scaled[j] * dz_aff_scaled[j];
          m -= 0.5 * (prod + prod.transpose());
        }
        rc[j] = m;
      }
      double rk = -tau * kappa + sigma * mu;
      if (phase == 1) rk -= dtau_aff * dkappa_aff;

      // W' (lambda^{-1} o rc).
      BlockVec wtu(blocks_.size());
      for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto& lam = lambda[j];
        MatrixXd uj = rc[j];
        for (int r = 0; r < lam.size(); ++r)
          for (int q = 0; q < lam.size(); ++q) uj(r, q) *= 2.0 / (lam[r] + lam[q]);
        wtu[j] = symmetrize(scaling_[j].r * uj * scaling_[j].r.transpose());
      }
      BlockVec bz = rz;
      for (auto& m : bz) m *= -f;
      axpy(-1.0, wtu, bz);
      VectorXd dx1, dy1;
      BlockVec dz1;
      solve_kkt(-f * rx, -f * ry, bz, dx1, dy1, dz1);

      const double tt = -f * rt;
      const double num = tt - rk / tau - c.dot(dx1) - b_.dot(dy1) - inner(h_, dz1);
      const double den = c.dot(dx2) + b_.dot(dy2) + inner(h_, dz2) - kappa / tau;
      dtau = num / den;
      dx = dx1 + dtau * dx2;
      dy = dy1 + dtau * dy2;
      dz = dz1;
      axpy(dtau, dz2, dz);
      dkappa = (rk - kappa * dtau) / tau;

      // ds from the linearized primal equation G dx + ds - h dtau = -f rz,
      // which keeps the primal residual exact when P is ill-conditioned.
      ds = rz;
      for (auto& m : ds) m *= -f;
      axpy(-1.0, g_apply(dx), ds);
      axpy(dtau, h_, ds);
      dz_scaled.resize(blocks_.size());
      ds_scaled.resize(blocks_.size());
      for (std::size_t j = 0; j < blocks_.size(); ++j) {
        dz_scaled[j] = symmetrize(scaling_[j].r.transpose() * dz[j] * scaling_[j].r);
        ds_scaled[j] = symmetrize(scaling_[j].rti.transpose() * ds[j] * scaling_[j].rti);
      }
      const double amax = max_step(lambda, ds_scaled, dz_scaled, tau, dtau, kappa, dkappa);
      if (phase == 0) {
        const double aff = std::min(1.0, amax);
        sigma = std::pow(1.0 - aff, 3);
        ds_aff_scaled = ds_scaled;
        dz_aff_scaled = dz_scaled;
        dtau_aff = dtau;
        dkappa_aff = dkappa;
      } else {
        alpha = std::min(1.0, opts_.step_fraction * amax);
      }
    }

    if (alpha < 1e-10) stalled = true;

    x += alpha * dx;
    y += alpha * dy;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      s_cur[j] = symmetrize(s_cur[j] + alpha * ds[j]);
      z_cur[j] = symmetrize(z_cur[j] + alpha * dz[j]);
    }
  }

  double res_p = 0.0, res_d = 0.0, res_gap = 0.0;
  if (status == SolveStatus::IterationLimit && std::isfinite(best.merit)) {
    x = best.x;
    y = best.y;
    z_cur = best.z;
    tau = best.tau;
    kappa = best.kappa;
    res_p = best.pres;
    res_d = best.dres;
    res_gap = best.gap;
  } else if (status == SolveStatus::Optimal) {
    res_p = best.pres;
    res_d = best.dres;
    res_gap = best.gap;
  }
  out.iterations = iter;
  out.tau = tau;
  out.kappa = kappa;
  out.primal_residual = res_p;
  out.dual_residual = res_d;
  out.gap = res_gap;
  out.infeasibility_residual = pinf;
  const BlockVec& z = z_cur;
  auto expand_dual = [&](const VectorXd& v) {
    VectorXd full = VectorXd::Zero(problem_.num_eq());
    for (std::size_t i = 0; i < eq_rows_.size(); ++i) full[eq_rows_[i]] = v[static_cast<Eigen::Index>(i)];
    return full;
  };

  if (status == SolveStatus::PrimalInfeasible) {
    const double scale = -(inner(h_, z) + b_.dot(y));
    out.status = status;
    out.ray_eq = expand_dual(-y / scale);
    out.ray_blocks.clear();
    for (const auto& m : z) out.ray_blocks.push_back(m / scale);
    return out;
  }
  if (status == SolveStatus::DualInfeasible) {
    out.status = status;
    out.x = x / (-c.dot(x));
    return out;
  }
  if (status == SolveStatus::IterationLimit && res_p <= opts_.inaccurate_tol && res_d <= opts_.inaccurate_tol &&
      res_gap <= opts_.inaccurate_tol)
    status = SolveStatus::Inaccurate;
  out.status = status;
  out.x = x / tau;
  out.objective = c.dot(out.x);
  out.eq_dual = expand_dual(y / tau);
  out.dual_objective = -(b_.dot(y) + inner(h_, z)) / tau;
  out.block_duals.clear();
  for (const auto& m : z) out.block_duals.push_back(m / tau);
  return out;
}

}  // namespace

ConicSolution InteriorPointSolver::solve(const ConicProblem& problem, const SolverOptions& options) const {
  Engine engine(problem, options);
  return engine.run();
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string VerificationReport::summary() const {
  std::ostringstream out;
  for (const auto& c : checks)
    out << c.name << '=' << c.value << (c.passed ? " <= " : " > ") << c.threshold << (c.passed ? " ok" : " FAIL")
        << "; ";
  return out.str();
}

namespace {

double min_eigenvalue(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

VerificationReport verify_solution(const ConicProblem& problem, const ConicSolution& sol, double feas_tol,
                                   double gap_tol) {
  VerificationReport report;
  auto add = [&](std::string name, double value, double threshold) {
    report.checks.push_back({std::move(name), value, threshold, value <= threshold});
  };
  if (sol.status == SolveStatus::PrimalInfeasible) {
    if (sol.ray_eq.size() != problem.num_eq() || sol.ray_blocks.size() != problem.blocks.size()) {
      add("certificate-shape", 1.0, 0.0);
      return report;
    }
    VectorXd stationarity = problem.num_eq() > 0 ? VectorXd(problem.eq_matrix.transpose() * sol.ray_eq)
                                                 : VectorXd::Zero(problem.num_vars);
    double offset = 0.0;
    double min_eig = 0.0;
    for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
      const auto& blk = problem.blocks[j];
      blk.accumulate_adjoint(sol.ray_blocks[j], stationarity);
      if (blk.constant.size() != 0) offset += blk.constant.cwiseProduct(sol.ray_blocks[j]).sum();
      min_eig = std::min(min_eig, min_eigenvalue(sol.ray_blocks[j]));
    }
    const double margin = (problem.num_eq() > 0 ? problem.eq_rhs.dot(sol.ray_eq) : 0.0) - offset;
    const double scale = std::max(1.0, sol.ray_eq.norm());
    add("farkas-stationarity", stationarity.norm(), feas_tol * std::max(1.0, margin));
    add("farkas-psd", -min_eig, feas_tol * scale);
    add("farkas-margin", -margin, -feas_tol * scale);
    return report;
  }
  if (sol.x.size() != problem.num_vars) {
    add("solution-shape", 1.0, 0.0);
    return report;
  }
  const double b_norm = std::max(1.0, problem.eq_rhs.size() > 0 ? problem.eq_rhs.norm() : 0.0);
  const double eq_res = problem.num_eq() > 0 ? (problem.eq_matrix * sol.x - problem.eq_rhs).norm() / b_norm : 0.0;
  add("equality-residual", eq_res, feas_tol);
  double worst_primal = 0.0;
  for (const auto& blk : problem.blocks) {
    const MatrixXd m = blk.evaluate(sol.x);
    const double scale = std::max(1.0, m.norm());
    worst_primal = std::max(worst_primal, -min_eigenvalue(m) / scale);
  }
  add("primal-psd", worst_primal, feas_tol);
  if (sol.block_duals.size() == problem.blocks.size() && sol.eq_dual.size() == problem.num_eq()) {
    VectorXd grad = problem.objective;
    if (problem.num_eq() > 0) grad += problem.eq_matrix.transpose() * sol.eq_dual;
    VectorXd adj = VectorXd::Zero(problem.num_vars);
    double worst_dual = 0.0;
    double dual_const = 0.0;
    for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
      problem.blocks[j].accumulate_adjoint(sol.block_duals[j], adj);
      const double scale = std::max(1.0, sol.block_duals[j].norm());
      worst_dual = std::max(worst_dual, -min_eigenvalue(sol.block_duals[j]) / scale);
      if (problem.blocks[j].constant.size() != 0)
        dual_const += problem.blocks[j].constant.cwiseProduct(sol.block_duals[j]).sum();
    }
    add("dual-residual", (grad - adj).norm() / std::max(1.0, problem.objective.norm()), feas_tol);
    add("dual-psd", worst_dual, feas_tol);
    const double pobj = problem.objective.dot(sol.x);
    const double dobj = -(problem.num_eq() > 0 ? problem.eq_rhs.dot(sol.eq_dual) : 0.0) - dual_const;
    add("duality-gap", std::abs(pobj - dobj) / (1.0 + std::abs(pobj)), gap_tol);
  }
  return report;
}

}  // namespace tensor_spectra
