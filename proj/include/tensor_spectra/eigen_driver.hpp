#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensor_spectra/extract.hpp"
#include "tensor_spectra/polynomial.hpp"
#include "tensor_spectra/sdp_solver.hpp"
#include "tensor_spectra/tensor.hpp"

namespace tensor_spectra {

enum class EigenKind { Z, H };
std::string to_string(EigenKind kind);

/// Polynomial optimization data whose minimizers are the eigenvectors:
/// min f s.t. h = 0, relaxed from order k0 upward.
struct EigenSystem {
  EigenKind kind = EigenKind::Z;
  int m = 0;
  int n = 0;
  int m0 = 0;  // normalization degree: 2 for Z, largest even number <= m for H
  int k0 = 0;
  Polynomial f{1};
  std::vector<Polynomial> h;
  std::vector<Polynomial> ax;  // components of A x^{m-1}
};

/// f = A x^m, h = (A x^{m-1} - f x, x'x - 1), k0 = ceil((m+1)/2).
EigenSystem z_system(const Tensor& a);
/// m0 = 2 ceil((m-1)/2), f = (x^[m0-m+1])' A x^{m-1},
/// h = (A x^{m-1} - f x^[m-1], sum x_i^m0 - 1), k0 = ceil((m0+m-1)/2).
EigenSystem h_system(const Tensor& a);
EigenSystem eigen_system(EigenKind kind, const Tensor& a);

/// n (m-1)^{n-1}, the number of complex H-eigenvalues counted with multiplicity.
std::int64_t h_count_bound(int m, int n);

/// max(|norm(u) - 1|, ||F(lambda, u)||_inf) for the eigen equation of the kind.
double eigen_residual(EigenKind kind, const Tensor& a, double lambda, const Eigen::VectorXd& u);

/// Jacobian of F(lambda, x) = [normalization(x) - 1; A x^{m-1} - lambda x^[p]]
/// with respect to (lambda, x); (n+1) x (n+1).
Eigen::MatrixXd eigen_jacobian(EigenKind kind, const Tensor& a, double lambda, const Eigen::VectorXd& u);

enum class Isolation { Isolated, Inconclusive };
std::string to_string(Isolation iso);

/// Isolated iff sigma_min(J) > jac_tol * sigma_max(J).
Isolation check_isolated(EigenKind kind, const Tensor& a, double lambda, const Eigen::VectorXd& u,
                         double jac_tol = 1e-6);

struct PolishResult {
  double lambda = 0.0;
  Eigen::VectorXd u;
  double residual = 0.0;
  bool polished = false;  // false: Newton was skipped or rejected, input returned
};

/// Newton refinement of F(lambda, x) = 0.
PolishResult polish_eigenpair(EigenKind kind, const Tensor& a, double lambda, const Eigen::VectorXd& u);

struct Eigenpair {
  EigenKind kind = EigenKind::Z;
  double value = 0.0;
  std::vector<Eigen::VectorXd> vectors;
  double residual = 0.0;
  bool isolated = false;
  int order_used = 0;
};

enum class Termination { CertifiedComplete, ContinuumSuspected, Budget };
std::string to_string(Termination t);

/// One relaxation solved during a sweep.
struct StepRecord {
  std::string phase;  // "min", "shifted-min", "nu-check"
  double anchor = 0.0;  // lambda_i (0 for the first step)
  double delta = 0.0;
  int order = 0;
  SolveStatus status = SolveStatus::IterationLimit;
  double value = 0.0;
  std::string note;
};

struct Spectrum {
  EigenKind kind = EigenKind::Z;
  std::vector<Eigenpair> eigenpairs;
  Termination termination = Termination::Budget;
  std::string detail;
  std::vector<StepRecord> log;
};

struct DriverOptions {
  double delta0 = 0.05;
  double shrink = 5.0;
  double delta_min = 1e-6;
  double eq_tol = 1e-4;
  int kmax_offset = 3;
  double res_tol = 1e-7;
  double rank_tol = 1e-6;
  double dedup_tol = 1e-6;
  double vector_dedup_tol = 1e-5;
  double jac_tol = 1e-6;
  bool nonneg = false;
  std::uint64_t seed = 20240531;
  SolverOptions solver;
  /// When set, every assembled relaxation is written there as a text dump.
  std::optional<std::string> dump_dir;
};

struct StepOutcome {
  enum class Kind { Infeasible, Found, NonIsolatedSuspected, Unresolved };
  Kind kind = Kind::Unresolved;
  std::optional<Eigenpair> pair;
  double delta_used = 0.0;
  int order = 0;  // order of the certificate / acceptance
  double bound = 0.0;  // last relaxation value when Unresolved
  std::string reason;
};

/// Smallest eigenvalue, or a certificate that none exists.
StepOutcome smallest_eigenvalue(EigenKind kind, const Tensor& a, const DriverOptions& options = {},
                                std::vector<StepRecord>* log = nullptr);

/// Next eigenvalue above lambda_i, after the backward check that no eigenvalue
/// lies in (lambda_i, lambda_i + delta].
StepOutcome next_eigenvalue(EigenKind kind, const Tensor& a, double lambda_i, double delta,
                            const DriverOptions& options = {}, std::vector<StepRecord>* log = nullptr);

Spectrum full_sweep(EigenKind kind, const Tensor& a, const DriverOptions& options = {});

}  // namespace tensor_spectra
