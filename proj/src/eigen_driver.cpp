#include "tensor_spectra/eigen_driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <sstream>

#include "tensor_spectra/moment.hpp"

namespace tensor_spectra {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(EigenKind kind) { return kind == EigenKind::Z ? "Z" : "H"; }

std::string to_string(Isolation iso) { return iso == Isolation::Isolated ? "isolated" : "inconclusive"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::CertifiedComplete: return "certified-complete";
    case Termination::ContinuumSuspected: return "continuum-suspected";
    case Termination::Budget: return "budget";
  }
  return "unknown";
}

namespace {

Polynomial power_sum(int n, int p) {
  Polynomial s(n);
  for (int j = 0; j < n; ++j) s = s + Polynomial::variable(n, j).pow(p);
  return s;
}

int eigen_power(EigenKind kind, int m) { return kind == EigenKind::Z ? 1 : m - 1; }

VectorXd cwise_pow(const VectorXd& x, int p) {
  VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::pow(x[i], p);
  return out;
}

int normalization_degree(EigenKind kind, int m) { return kind == EigenKind::Z ? 2 : 2 * (m / 2); }

double normalization(EigenKind kind, int m, const VectorXd& u) {
  return cwise_pow(u, normalization_degree(kind, m)).sum();
}

VectorXd normalize(EigenKind kind, int m, const VectorXd& u) {
  const int d = normalization_degree(kind, m);
  const double s = normalization(kind, m, u);
  if (!(s > 0.0)) return u;
  return u / std::pow(s, 1.0 / d);
}

double eigenvalue_of(EigenKind kind, const Tensor& a, const VectorXd& u) {
  const int m = a.order();
  const VectorXd g = a.contract_partial(u);
  if (kind == EigenKind::Z) return u.dot(g);
  return cwise_pow(u, normalization_degree(kind, m) - m + 1).dot(g);
}

std::string format_tol(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

VectorXd eigen_equations(EigenKind kind, const Tensor& a, double lambda, const VectorXd& u) {
  const int n = a.dim();
  VectorXd f(n + 1);
  f[0] = normalization(kind, a.order(), u) - 1.0;
  f.tail(n) = a.contract_partial(u) - lambda * cwise_pow(u, eigen_power(kind, a.order()));
  return f;
}

}  // namespace

EigenSystem z_system(const Tensor& a) {
  EigenSystem s;
  s.kind = EigenKind::Z;
  s.m = a.order();
  s.n = a.dim();
  s.m0 = 2;
  s.k0 = (s.m + 2) / 2;
  s.f = tensor_to_poly(a);
  s.ax = tensor_to_poly_vector(a);
  for (int j = 0; j < s.n; ++j) s.h.push_back(s.ax[j] - Polynomial::variable(s.n, j) * s.f);
  s.h.push_back(power_sum(s.n, 2) - Polynomial::constant(s.n, 1.0));
  return s;
}

EigenSystem h_system(const Tensor& a) {
  EigenSystem s;
  s.kind = EigenKind::H;
  s.m = a.order();
  s.n = a.dim();
  s.m0 = 2 * (s.m / 2);
  s.k0 = (s.m0 + s.m) / 2;
  s.ax = tensor_to_poly_vector(a);
  s.f = Polynomial(s.n);
  for (int j = 0; j < s.n; ++j) s.f = s.f + Polynomial::variable(s.n, j).pow(s.m0 - s.m + 1) * s.ax[j];
  for (int j = 0; j < s.n; ++j) s.h.push_back(s.ax[j] - Polynomial::variable(s.n, j).pow(s.m - 1) * s.f);
  s.h.push_back(power_sum(s.n, s.m0) - Polynomial::constant(s.n, 1.0));
  return s;
}

EigenSystem eigen_system(EigenKind kind, const Tensor& a) { return kind == EigenKind::Z ? z_system(a) : h_system(a); }

std::int64_t h_count_bound(int m, int n) {
  std::int64_t b = n;
  for (int i = 1; i < n; ++i) b *= (m - 1);
  return b;
}

double eigen_residual(EigenKind kind, const Tensor& a, double lambda, const VectorXd& u) {
  if (u.size() != a.dim()) throw std::invalid_argument("eigenvector length mismatch");
  return eigen_equations(kind, a, lambda, u).cwiseAbs().maxCoeff();
}

MatrixXd eigen_jacobian(EigenKind kind, const Tensor& a, double lambda, const VectorXd& u) {
  const int n = a.dim();
  const int m = a.order();
  if (u.size() != n) throw std::invalid_argument("eigenvector length mismatch");
  const int p = eigen_power(kind, m);
  const int d = normalization_degree(kind, m);
  const auto ax = tensor_to_poly_vector(a);
  MatrixXd j = MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) j(0, 1 + i) = d * std::pow(u[i], d - 1);
  for (int r = 0; r < n; ++r) {
    j(1 + r, 0) = -std::pow(u[r], p);
    for (int i = 0; i < n; ++i) j(1 + r, 1 + i) = ax[r].derivative(i).evaluate(u);
    j(1 + r, 1 + r) -= lambda * p * std::pow(u[r], p - 1);
  }
  return j;
}

Isolation check_isolated(EigenKind kind, const Tensor& a, double lambda, const VectorXd& u, double jac_tol) {
  const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(eigen_jacobian(kind, a, lambda, u)).singularValues();
  return sv[sv.size() - 1] > jac_tol * sv[0] ? Isolation::Isolated : Isolation::Inconclusive;
}

PolishResult polish_eigenpair(EigenKind kind, const Tensor& a, double lambda, const VectorXd& u) {
  PolishResult out{lambda, u, eigen_residual(kind, a, lambda, u), false};
  if (out.residual > 1e-2) return out;

  const int n = a.dim();
  VectorXd z(n + 1);
  z[0] = lambda;
  z.tail(n) = u;
  double res = out.residual;
  for (int it = 0; it < 30 && res > 0.0; ++it) {
    const MatrixXd j = eigen_jacobian(kind, a, z[0], z.tail(n));
    Eigen::JacobiSVD<MatrixXd> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd sv = svd.singularValues();
    if (sv[n] <= 1e-10 * sv[0]) return out;
    const VectorXd step = svd.solve(-eigen_equations(kind, a, z[0], z.tail(n)));
    const VectorXd next = z + step;
    const double next_res = eigen_residual(kind, a, next[0], next.tail(n));
    if (!(next_res < res) && step.norm() > 1e-15 * (1.0 + z.norm())) break;
    z = next;
    res = next_res;
    if (step.norm() <= 1e-15 * (1.0 + z.norm())) break;
  }
  // Newton must stay in the basin it started from.
  if (std::abs(z[0] - lambda) > 1e-2 * (1.0 + std::abs(lambda)) || (z.tail(n) - u).norm() > 1e-1) return out;
  if (!(res <= out.residual)) return out;
  return {z[0], z.tail(n), res, true};
}

namespace {

struct SweepContext {
  EigenSystem sys;
  const Tensor& a;
  const DriverOptions& options;
  std::vector<StepRecord>* log;
  int dump_counter = 0;

  int kmax() const { return sys.k0 + options.kmax_offset; }

  Polynomial shifted_f(double c) const { return sys.f - Polynomial::constant(sys.n, c); }

  void dump(const ConicProblem& p, const std::string& phase, int k) {
    if (!options.dump_dir) return;
    std::filesystem::create_directories(*options.dump_dir);
    std::ostringstream name;
    const int index = log ? static_cast<int>(log->size()) : dump_counter++;
    name << to_string(sys.kind) << '-' << std::setw(3) << std::setfill('0') << index << '-' << phase << "-k" << k
         << ".sdp";
    std::ofstream out(std::filesystem::path(*options.dump_dir) / name.str());
    write_problem_dump(p, out);
  }

  struct Relaxation {
    SolveStatus status = SolveStatus::IterationLimit;
    bool certified_infeasible = false;
    bool usable = false;  // Optimal or Inaccurate with a primal point
    double value = 0.0;
    MomentVector y;
  };

  Relaxation solve_relaxation(const ConicProblem& p, const std::string& phase, int k, double anchor, double delta) {
    dump(p, phase, k);
    const ConicSolution sol = solve(p, options.solver);
    Relaxation r;
    r.status = sol.status;
    std::string note;
    if (sol.status == SolveStatus::PrimalInfeasible) {
      const VerificationReport rep = verify_solution(p, sol);
      r.certified_infeasible = rep.passed();
      note = r.certified_infeasible ? "farkas certificate verified" : "farkas certificate rejected: " + rep.summary();
    } else if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::Inaccurate) {
      r.usable = true;
      r.value = p.original_value(sol.objective);
      r.y = MomentVector(sys.n, k, sol.x);
    }
    if (log) log->push_back({phase, anchor, delta, k, sol.status, r.value, note});
    return r;
  }

  void annotate(const std::string& note) {
    if (!log || log->empty()) return;
    auto& last = log->back().note;
    last += last.empty() ? note : "; " + note;
  }

  // Flat truncation, extraction, polishing and residual gating of the
  // minimizers of a solved relaxation with optimal value `value`. Small
  // trailing singular values (atoms with tiny weight) can hide below the
  // rank threshold, so a tighter threshold is tried when the first fails.
  std::optional<Eigenpair> accept(const MomentVector& y, double value, int k) {
    for (const double rank_tol : {options.rank_tol, options.rank_tol * 1e-2}) {
      if (auto pair = accept_at(y, value, k, rank_tol)) return pair;
    }
    return std::nullopt;
  }

  std::optional<Eigenpair> accept_at(const MomentVector& y, double value, int k, double rank_tol) {
    const auto flat = flat_truncation(y, sys.k0, rank_tol);
    if (!flat) {
      annotate("not flat (rank tol " + format_tol(rank_tol) + ")");
      return std::nullopt;
    }
    AtomicMeasure measure;
    try {
      ExtractOptions eo;
      eo.rank_tol = rank_tol;
      eo.seed = options.seed;
      measure = extract_atoms(y, flat->t, eo);
    } catch (const ExtractionError& e) {
      annotate(std::string("extraction failed: ") + e.what());
      return std::nullopt;
    }

    struct Candidate {
      double weight;
      double lambda;
      VectorXd u;
    };
    std::vector<Candidate> accepted;
    for (const auto& atom : measure.atoms) {
      const VectorXd u = normalize(sys.kind, sys.m, atom.point);
      const double lam = eigenvalue_of(sys.kind, a, u);
      const PolishResult pr = polish_eigenpair(sys.kind, a, lam, u);
      if (pr.residual > options.res_tol) continue;
      accepted.push_back({atom.weight, pr.lambda, pr.u});
    }
    if (accepted.empty()) {
      annotate("no extracted atom passed the residual gate");
      return std::nullopt;
    }
    // The heaviest atom fixes the eigenvalue; low-weight atoms at other
    // levels are remnants of nearby eigenvalues, not minimizers.
    const auto heaviest = std::max_element(accepted.begin(), accepted.end(),
                                           [](const Candidate& l, const Candidate& r) { return l.weight < r.weight; });
    if (std::abs(heaviest->lambda - value) > 1e-3 * (1.0 + std::abs(value))) {
      annotate("extracted eigenvalue disagrees with the relaxation value");
      return std::nullopt;
    }

    Eigenpair pair;
    pair.kind = sys.kind;
    pair.value = heaviest->lambda;
    pair.order_used = k;
    pair.isolated = true;
    const double tol = options.dedup_tol * std::max(1.0, std::abs(pair.value));
    for (const auto& c : accepted) {
      if (std::abs(c.lambda - pair.value) > tol) continue;
      const bool dup = std::any_of(pair.vectors.begin(), pair.vectors.end(),
                                   [&](const VectorXd& v) { return (v - c.u).norm() <= options.vector_dedup_tol; });
      if (!dup) pair.vectors.push_back(c.u);
    }
    std::sort(pair.vectors.begin(), pair.vectors.end(), [](const VectorXd& l, const VectorXd& r) {
      for (Eigen::Index i = 0; i < l.size(); ++i)
        if (std::abs(l[i] - r[i]) > 1e-9) return l[i] < r[i];
      return false;
    });
    for (const auto& u : pair.vectors) {
      pair.residual = std::max(pair.residual, eigen_residual(sys.kind, a, pair.value, u));
      if (check_isolated(sys.kind, a, pair.value, u, options.jac_tol) != Isolation::Isolated) pair.isolated = false;
    }
    annotate("flat at t=" + std::to_string(flat->t) + ", rank " + std::to_string(flat->rank));
    return pair;
  }

  // Minimize f over h = 0 and the extra inequalities through the hierarchy.
  StepOutcome minimize(const std::vector<Polynomial>& ineqs, const std::string& phase, double anchor, double delta) {
    StepOutcome out;
    out.delta_used = delta;
    for (int k = sys.k0; k <= kmax(); ++k) {
      const ConicProblem p = build_min_relaxation(sys.f, sys.h, ineqs, k);
      Relaxation r = solve_relaxation(p, phase, k, anchor, delta);
      out.order = k;
      if (r.certified_infeasible) {
        out.kind = StepOutcome::Kind::Infeasible;
        return out;
      }
      if (!r.usable) continue;
      out.bound = r.value;
      if (auto pair = accept(r.y, r.value, k)) {
        out.kind = StepOutcome::Kind::Found;
        out.pair = std::move(pair);
        return out;
      }
    }
    out.kind = StepOutcome::Kind::Unresolved;
    out.reason = "relaxation order cap reached without flat truncation or infeasibility";
    return out;
  }

  // Polished eigenvalues of the atoms of a flat moment vector; empty when
  // the vector is not flat or extraction fails.
  std::vector<double> atom_eigenvalues(const MomentVector& y) {
    std::vector<double> out;
    const auto flat = flat_truncation(y, sys.k0, options.rank_tol);
    if (!flat) return out;
    try {
      ExtractOptions eo;
      eo.rank_tol = options.rank_tol;
      eo.seed = options.seed;
      for (const auto& atom : extract_atoms(y, flat->t, eo).atoms) {
        const VectorXd u = normalize(sys.kind, sys.m, atom.point);
        const PolishResult pr = polish_eigenpair(sys.kind, a, eigenvalue_of(sys.kind, a, u), u);
        // Newton on an isolated root reaches rounding level; near-singular
        // points on a continuum stall well above it.
        if (pr.polished && pr.residual <= std::min(options.res_tol, 1e-11) &&
            check_isolated(sys.kind, a, pr.lambda, pr.u, options.jac_tol) == Isolation::Isolated)
          out.push_back(pr.lambda);
      }
    } catch (const ExtractionError&) {
    }
    return out;
  }

  // True when max f over h = 0, f <= lambda + delta equals lambda. The max
  // relaxation bounds that value from above, so a value within a tight
  // tolerance settles it. A flat relaxation whose atoms polish to an
  // eigenvalue above lambda proves the opposite. At the order cap, a stalled
  // (inaccurate) solve within eps is accepted; anything else shrinks delta.
  bool backward_check(double lambda, double delta) {
    const double scale = std::max(1.0, std::abs(lambda));
    const double eps = std::min(options.eq_tol, delta / 2.0) * scale;
    const double tight = std::min(eps, std::max(options.dedup_tol, 1e-6) * scale);
    const std::vector<Polynomial> bound{shifted_f(lambda + delta).scale(-1.0)};
    bool stalled_within_eps = false;
    for (int k = sys.k0; k <= kmax(); ++k) {
      const ConicProblem p = build_max_relaxation(sys.f, sys.h, bound, k);
      Relaxation r = solve_relaxation(p, "nu-check", k, lambda, delta);
      if (r.certified_infeasible) {
        annotate("anchor unexpectedly infeasible");
        return false;
      }
      if (!r.usable) continue;
      if (r.value <= lambda + tight) return true;
      const auto atoms = atom_eigenvalues(r.y);
      if (std::any_of(atoms.begin(), atoms.end(), [&](double v) { return v > lambda + tight; })) {
        std::ostringstream note;
        note << "flat: another eigenvalue lies within delta (atoms at";
        for (double v : atoms) note << " " << v;
        annotate(note.str() + ")");
        return false;
      }
      stalled_within_eps = r.status == SolveStatus::Inaccurate && r.value <= lambda + eps;
    }
    if (stalled_within_eps) annotate("accepted within eps after a stalled solve");
    return stalled_within_eps;
  }
};

}  // namespace

StepOutcome smallest_eigenvalue(EigenKind kind, const Tensor& a, const DriverOptions& options,
                                std::vector<StepRecord>* log) {
  SweepContext ctx{eigen_system(kind, a), a, options, log};
  std::vector<Polynomial> ineqs;
  if (options.nonneg && kind == EigenKind::Z) ineqs.push_back(ctx.sys.f);
  return ctx.minimize(ineqs, "min", 0.0, 0.0);
}

StepOutcome next_eigenvalue(EigenKind kind, const Tensor& a, double lambda_i, double delta,
                            const DriverOptions& options, std::vector<StepRecord>* log) {
  SweepContext ctx{eigen_system(kind, a), a, options, log};
  while (!ctx.backward_check(lambda_i, delta)) {
    delta /= options.shrink;
    if (delta < options.delta_min) {
      StepOutcome out;
      out.kind = StepOutcome::Kind::NonIsolatedSuspected;
      out.delta_used = delta * options.shrink;
      out.reason = "delta shrank below delta_min without isolating the next eigenvalue";
      return out;
    }
  }
  return ctx.minimize({ctx.shifted_f(lambda_i + delta)}, "shifted-min", lambda_i, delta);
}

Spectrum full_sweep(EigenKind kind, const Tensor& a, const DriverOptions& options) {
  Spectrum s;
  s.kind = kind;
  constexpr int kMaxEigenvalues = 200;

  StepOutcome step = smallest_eigenvalue(kind, a, options, &s.log);
  bool all_isolated = true;
  int stalls = 0;
  while (true) {
    if (step.kind == StepOutcome::Kind::Infeasible) {
      s.termination = all_isolated ? Termination::CertifiedComplete : Termination::ContinuumSuspected;
      if (s.eigenpairs.empty())
        s.detail = "no real " + to_string(kind) + "-eigenvalues (infeasible at order " + std::to_string(step.order) + ")";
      else if (all_isolated)
        s.detail = "largest eigenvalue certified at order " + std::to_string(step.order);
      else
        s.detail = "sweep finished but an eigenpair failed the isolation test";
      break;
    }
    if (step.kind == StepOutcome::Kind::NonIsolatedSuspected) {
      s.termination = Termination::ContinuumSuspected;
      s.detail = step.reason;
      break;
    }
    if (step.kind == StepOutcome::Kind::Unresolved) {
      s.termination = Termination::Budget;
      std::ostringstream msg;
      msg << step.reason << "; last lower bound " << step.bound;
      s.detail = msg.str();
      break;
    }

    Eigenpair pair = std::move(*step.pair);
    const double tol = options.dedup_tol * std::max(1.0, std::abs(pair.value));
    if (!s.eigenpairs.empty() && std::abs(pair.value - s.eigenpairs.back().value) <= tol) {
      auto& prev = s.eigenpairs.back();
      for (const auto& v : pair.vectors) {
        const bool dup = std::any_of(prev.vectors.begin(), prev.vectors.end(),
                                     [&](const VectorXd& w) { return (w - v).norm() <= options.vector_dedup_tol; });
        if (!dup) prev.vectors.push_back(v);
      }
      prev.isolated = prev.isolated && pair.isolated;
      if (++stalls > 2) {
        s.termination = Termination::ContinuumSuspected;
        s.detail = "repeated eigenvalue after shifting; eigenvalues may accumulate";
        break;
      }
    } else {
      stalls = 0;
      s.eigenpairs.push_back(std::move(pair));
    }
    all_isolated = all_isolated && s.eigenpairs.back().isolated;

    if (kind == EigenKind::H &&
        static_cast<std::int64_t>(s.eigenpairs.size()) > h_count_bound(a.order(), a.dim())) {
      s.termination = Termination::Budget;
      s.detail = "more eigenvalues than the H-eigenvalue count bound; results unreliable";
      break;
    }
    if (static_cast<int>(s.eigenpairs.size()) >= kMaxEigenvalues) {
      s.termination = Termination::Budget;
      s.detail = "eigenvalue count cap reached";
      break;
    }
    step = next_eigenvalue(kind, a, s.eigenpairs.back().value, options.delta0, options, &s.log);
  }
  return s;
}

}  // namespace tensor_spectra
