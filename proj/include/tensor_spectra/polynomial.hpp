#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tensor_spectra/tensor.hpp"

namespace tensor_spectra {

/// Exponent vector alpha of x^alpha = x_1^{alpha_1} ... x_n^{alpha_n}.
struct Monomial {
  std::vector<int> exponents;

  Monomial() = default;
  explicit Monomial(std::vector<int> e);
  static Monomial zero(int n) { return Monomial(std::vector<int>(n, 0)); }

  int num_vars() const { return static_cast<int>(exponents.size()); }
  int degree() const;
  Monomial operator*(const Monomial& other) const;
  double evaluate(const Eigen::VectorXd& x) const;

  bool operator==(const Monomial&) const = default;
};

/// Graded lexicographic order: total degree first, then x_1 > x_2 > ... .
/// This is the listing order of [1, x_1, ..., x_n, x_1^2, x_1 x_2, ...].
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// |N^n_d| = binomial(n + d, d).
std::int64_t basis_size(int n, int d);

/// Position of a monomial in the graded lexicographic listing of N^n_d.
std::int64_t monomial_rank(const Monomial& alpha);
/// Inverse of monomial_rank over N^n_d; throws std::invalid_argument when
/// rank is outside [0, basis_size(n, d)).
Monomial monomial_unrank(int n, int d, std::int64_t rank);

/// All monomials of N^n_d in graded lexicographic order.
std::vector<Monomial> monomial_basis(int n, int d);

/// Sparse real polynomial in n variables.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  explicit Polynomial(int n) : n_(n) {}
  Polynomial(int n, TermMap terms);

  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);
  static Polynomial monomial(const Monomial& alpha, double c = 1.0);

  int num_vars() const { return n_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const Monomial& alpha) const;

  double evaluate(const Eigen::VectorXd& x) const;
  Polynomial derivative(int var) const;
  std::vector<Polynomial> gradient() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator-() const { return scale(-1.0); }
  Polynomial scale(double c) const;
  Polynomial pow(int e) const;

  std::string to_string() const;

 private:
  void check_compatible(const Polynomial& other) const;
  void cleanup();

  int n_;
  TermMap terms_;
};

inline Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
inline Polynomial scale(const Polynomial& p, double c) { return p.scale(c); }
inline Polynomial multiply(const Polynomial& p, const Polynomial& q) { return p * q; }
inline double evaluate(const Polynomial& p, const Eigen::VectorXd& x) { return p.evaluate(x); }
inline std::vector<Polynomial> gradient(const Polynomial& p) { return p.gradient(); }

/// A x^m as a polynomial in x.
Polynomial tensor_to_poly(const Tensor& tensor);
/// The n components of A x^{m-1}.
std::vector<Polynomial> tensor_to_poly_vector(const Tensor& tensor);

}  // namespace tensor_spectra
