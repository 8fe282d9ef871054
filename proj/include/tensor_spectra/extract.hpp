#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensor_spectra/moment.hpp"

namespace tensor_spectra {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Atom {
  Eigen::VectorXd point;
  double weight = 0.0;
};

/// Finitely atomic measure sum_j c_j delta_{u_j} recovered from a moment vector.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  int t = 0;                 // extraction used y|_{2t}
  double residual = 0.0;     // || sum_j c_j [u_j]_{2t} - y|_{2t} ||_inf

  /// sum_j c_j [u_j]_{2t}.
  MomentVector moments() const;
};

struct ExtractOptions {
  double rank_tol = 1e-6;
  double residual_tol = 1e-4;
  std::uint64_t seed = 20240531;
  int max_draws = 5;
};

/// Count of singular values above rank_tol * max(sigma_1, abs_floor).
int numerical_rank(const Eigen::MatrixXd& m, double rank_tol, double abs_floor = 1e-12);

struct FlatTruncation {
  int t = 0;
  int rank = 0;
};

/// Smallest t in [k0, y.k] with rank M_{t-k0}(y) = rank M_t(y).
std::optional<FlatTruncation> flat_truncation(const MomentVector& y, int k0, double rank_tol);

/// Recovers rank M_t(y) atoms from a flat moment vector by building
/// multiplication matrices on a pivoted monomial basis and reading coordinates
/// off an ordered Schur form of a random combination of them.
/// Throws ExtractionError when the combination keeps repeated eigenvalues or
/// the reconstruction residual exceeds options.residual_tol.
AtomicMeasure extract_atoms(const MomentVector& y, int t, const ExtractOptions& options = {});

}  // namespace tensor_spectra
