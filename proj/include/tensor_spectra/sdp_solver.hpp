#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensor_spectra/conic.hpp"

namespace tensor_spectra {

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, Inaccurate, IterationLimit };

std::string to_string(SolveStatus status);

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  /// Residual level under which a stalled run is reported as Inaccurate.
  double inaccurate_tol = 1e-4;
  double step_fraction = 0.99;
  bool verbose = false;
};

/// Result of a conic solve.
///
/// For Optimal / Inaccurate, x is the primal point and (eq_dual, block_duals)
/// the dual multipliers with  c + A' eq_dual - sum_j adj(B_j)(Z_j) = 0.
/// For PrimalInfeasible, (ray_eq, ray_blocks) is a Farkas ray:
///   A' ray_eq + sum_j adj(B_j)(Z_j) = 0,  Z_j psd,  b' ray_eq - sum_j <C_j, Z_j> > 0.
struct ConicSolution {
  SolveStatus status = SolveStatus::IterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;       // c'x in the stored (min) form
  double dual_objective = 0.0;
  Eigen::VectorXd eq_dual;
  std::vector<Eigen::MatrixXd> block_duals;
  Eigen::VectorXd ray_eq;
  std::vector<Eigen::MatrixXd> ray_blocks;

  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double infeasibility_residual = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  int iterations = 0;
};

/// Pluggable conic back end.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) const = 0;
};

/// Dense primal-dual interior-point method on the homogeneous self-dual
/// embedding, Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
class InteriorPointSolver final : public ConicSolver {
 public:
  ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) const override;
};

inline ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {}) {
  return InteriorPointSolver{}.solve(problem, options);
}

struct VerificationCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool passed() const;
  std::string summary() const;
};

/// Recomputes residuals (Optimal/Inaccurate) or the Farkas conditions
/// (PrimalInfeasible) from the stored problem data.
VerificationReport verify_solution(const ConicProblem& problem, const ConicSolution& solution,
                                   double feas_tol = 1e-7, double gap_tol = 1e-6);

}  // namespace tensor_spectra
