#include "tensor_spectra/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tensor_spectra {

namespace {

// Coefficients smaller than this after arithmetic are dropped.
constexpr double kDropTolerance = 1e-14;

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

// Number of exponent vectors over `vars` variables with total degree exactly `deg`.
std::int64_t count_exact(int vars, int deg) {
  if (vars == 0) return deg == 0 ? 1 : 0;
  return binomial(vars + deg - 1, vars - 1);
}

}  // namespace

Monomial::Monomial(std::vector<int> e) : exponents(std::move(e)) {
  for (int v : exponents)
    if (v < 0) throw std::invalid_argument("monomial exponents must be nonnegative");
}

int Monomial::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.num_vars() != num_vars()) throw std::invalid_argument("monomial variable count mismatch");
  Monomial out = *this;
  for (int i = 0; i < num_vars(); ++i) out.exponents[i] += other.exponents[i];
  return out;
}

double Monomial::evaluate(const Eigen::VectorXd& x) const {
  double v = 1.0;
  for (int i = 0; i < num_vars(); ++i)
    for (int e = 0; e < exponents[i]; ++e) v *= x[i];
  return v;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  // Within a degree, larger power of x_1 comes first.
  return std::lexicographical_compare(b.exponents.begin(), b.exponents.end(), a.exponents.begin(),
                                      a.exponents.end());
}

std::int64_t basis_size(int n, int d) {
  if (n < 1 || d < 0) return d < 0 ? 0 : 1;
  return binomial(n + d, d);
}

std::int64_t monomial_rank(const Monomial& alpha) {
  const int n = alpha.num_vars();
  const int d = alpha.degree();
  std::int64_t rank = basis_size(n, d - 1);
  int remaining = d;
  for (int i = 0; i < n - 1; ++i) {
    // Monomials agreeing on x_1..x_{i-1} with a larger x_i exponent come first.
    for (int v = remaining; v > alpha.exponents[i]; --v) rank += count_exact(n - i - 1, remaining - v);
    remaining -= alpha.exponents[i];
  }
  return rank;
}

Monomial monomial_unrank(int n, int d, std::int64_t rank) {
  if (n < 1 || rank < 0 || rank >= basis_size(n, d))
    throw std::invalid_argument("monomial rank out of range");
  int deg = 0;
  while (basis_size(n, deg) <= rank) ++deg;
  rank -= basis_size(n, deg - 1);
  std::vector<int> e(n, 0);
  int remaining = deg;
  for (int i = 0; i < n - 1; ++i) {
    int v = remaining;
    for (; v >= 0; --v) {
      const std::int64_t block = count_exact(n - i - 1, remaining - v);
      if (rank < block) break;
      rank -= block;
    }
    e[i] = v;
    remaining -= v;
  }
  e[n - 1] = remaining;
  return Monomial(std::move(e));
}

std::vector<Monomial> monomial_basis(int n, int d) {
  const std::int64_t size = basis_size(n, d);
  std::vector<Monomial> out;
  out.reserve(static_cast<std::size_t>(size));
  for (std::int64_t r = 0; r < size; ++r) out.push_back(monomial_unrank(n, d, r));
  return out;
}

Polynomial::Polynomial(int n, TermMap terms) : n_(n), terms_(std::move(terms)) {
  for (const auto& [mono, c] : terms_)
    if (mono.num_vars() != n_) throw std::invalid_argument("term has wrong number of variables");
  cleanup();
}

Polynomial Polynomial::constant(int n, double c) {
  return Polynomial(n, TermMap{{Monomial::zero(n), c}});
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
  Monomial m = Monomial::zero(n);
  m.exponents[i] = 1;
  return Polynomial(n, TermMap{{m, 1.0}});
}

Polynomial Polynomial::monomial(const Monomial& alpha, double c) {
  return Polynomial(alpha.num_vars(), TermMap{{alpha, c}});
}

int Polynomial::degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

double Polynomial::coefficient(const Monomial& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw std::invalid_argument("point dimension does not match polynomial");
  double v = 0.0;
  for (const auto& [mono, c] : terms_) v += c * mono.evaluate(x);
  return v;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= n_) throw std::invalid_argument("variable index out of range");
  TermMap out;
  for (const auto& [mono, c] : terms_) {
    const int e = mono.exponents[var];
    if (e == 0) continue;
    Monomial d = mono;
    d.exponents[var] = e - 1;
    out[d] += c * e;
  }
  return Polynomial(n_, std::move(out));
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> out;
  out.reserve(n_);
  for (int i = 0; i < n_; ++i) out.push_back(derivative(i));
  return out;
}

void Polynomial::check_compatible(const Polynomial& other) const {
  if (other.n_ != n_) throw std::invalid_argument("polynomials have different numbers of variables");
}

void Polynomial::cleanup() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kDropTolerance; });
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  check_compatible(other);
  TermMap out = terms_;
  for (const auto& [mono, c] : other.terms_) out[mono] += c;
  return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other.scale(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_compatible(other);
  TermMap out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) out[ma * mb] += ca * cb;
  return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::scale(double c) const {
  TermMap out = terms_;
  for (auto& [mono, v] : out) v *= c;
  return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result = constant(n_, 1.0);
  for (int i = 0; i < e; ++i) result = result * *this;
  return result;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    first = false;
    const double a = std::abs(c);
    const bool is_const = mono.degree() == 0;
    if (a != 1.0 || is_const) out << a;
    for (int i = 0; i < n_; ++i) {
      if (mono.exponents[i] == 0) continue;
      out << "x" << i + 1;
      if (mono.exponents[i] > 1) out << "^" << mono.exponents[i];
    }
  }
  return out.str();
}

std::vector<Polynomial> tensor_to_poly_vector(const Tensor& tensor) {
  const int n = tensor.dim();
  const int m = tensor.order();
  std::vector<Polynomial::TermMap> rows(n);
  std::vector<int> index(m);
  const auto entries = tensor.entries();
  for (std::size_t flat = 0; flat < entries.size(); ++flat) {
    if (entries[flat] == 0.0) continue;
    tensor.unravel(flat, index);
    Monomial mono = Monomial::zero(n);
    for (int p = 1; p < m; ++p) ++mono.exponents[index[p]];
    rows[index[0]][mono] += entries[flat];
  }
  std::vector<Polynomial> out;
  out.reserve(n);
  for (auto& terms : rows) out.emplace_back(n, std::move(terms));
  return out;
}

Polynomial tensor_to_poly(const Tensor& tensor) {
  const int n = tensor.dim();
  auto rows = tensor_to_poly_vector(tensor);
  Polynomial out(n);
  for (int j = 0; j < n; ++j) out = out + Polynomial::variable(n, j) * rows[j];
  return out;
}

}  // namespace tensor_spectra
