#include "tensor_spectra/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tensor_spectra/polynomial.hpp"

namespace tensor_spectra {

using Eigen::VectorXd;

CompanionRoots companion_roots(const std::vector<double>& coeffs) {
  CompanionRoots out;
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) {
    out.identically_zero = true;
    return out;
  }
  int deg = static_cast<int>(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs[deg]) <= 1e-12 * scale) --deg;
  if (deg == 0) return out;

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) c(i, deg - 1) = -coeffs[i] / coeffs[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.roots.push_back(es.eigenvalues()[i]);
  return out;
}

namespace {

// Horner evaluation of p and p'.
std::pair<double, double> eval_with_derivative(const std::vector<double>& coeffs, double t) {
  double p = 0.0, dp = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    dp = dp * t + p;
    p = p * t + *it;
  }
  return {p, dp};
}

bool newton_root(const std::vector<double>& coeffs, double& t) {
  double scale = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) scale += std::abs(coeffs[i]) * std::pow(std::abs(t), double(i));
  for (int it = 0; it < 50; ++it) {
    const auto [p, dp] = eval_with_derivative(coeffs, t);
    if (dp == 0.0) break;
    const double step = p / dp;
    t -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(t))) break;
  }
  return std::abs(eval_with_derivative(coeffs, t).first) <= 1e-10 * std::max(scale, 1e-300);
}

}  // namespace

std::vector<double> real_roots(const std::vector<double>& coeffs) {
  const CompanionRoots cr = companion_roots(coeffs);
  std::vector<double> out;
  for (const auto& z : cr.roots) {
    const double re = z.real();
    const double im = std::abs(z.imag());
    if (im > 1e-4 * (1.0 + std::abs(re))) continue;
    double t = re;
    const bool converged = newton_root(coeffs, t);
    if (im > 1e-8 * (1.0 + std::abs(re)) && !converged) continue;
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double l, double r) { return std::abs(l - r) <= 1e-12 * (1.0 + std::abs(l)); }),
            out.end());
  return out;
}

std::vector<double> OracleResult::eigenvalues(double tol) const {
  std::vector<double> v;
  for (const auto& p : pairs) v.push_back(p.lambda);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || std::abs(x - out.back()) > tol * std::max(1.0, std::abs(x))) out.push_back(x);
  return out;
}

namespace {

enum class Kind { Z, H };

// Coefficients of b(1, t) for a binary form b.
std::vector<double> dehomogenize(const Polynomial& b, int degree) {
  std::vector<double> c(degree + 1, 0.0);
  for (const auto& [mono, coef] : b.terms()) c[mono.exponents[1]] += coef;
  return c;
}

OracleResult brute_n2(const Tensor& a, Kind kind) {
  if (a.dim() != 2) throw std::invalid_argument("the elimination oracle needs a 2-dimensional tensor");
  const int m = a.order();
  const int p = kind == Kind::Z ? 1 : m - 1;
  const int m0 = kind == Kind::Z ? 2 : 2 * (m / 2);
  const auto g = tensor_to_poly_vector(a);
  const Polynomial x1 = Polynomial::variable(2, 0);
  const Polynomial x2 = Polynomial::variable(2, 1);
  const Polynomial form = x2.pow(p) * g[0] - x1.pow(p) * g[1];
  const int degree = m - 1 + p;

  OracleResult out;
  double amax = 0.0;
  for (double v : a.entries()) amax = std::max(amax, std::abs(v));
  double fmax = 0.0;
  for (const auto& [mono, c] : form.terms()) fmax = std::max(fmax, std::abs(c));
  if (fmax <= 1e-12 * std::max(amax, 1e-300)) {
    out.complete = false;
    return out;
  }

  const std::vector<double> coeffs = dehomogenize(form, degree);
  std::vector<VectorXd> directions;
  for (double t : real_roots(coeffs)) directions.push_back((VectorXd(2) << 1.0, t).finished());
  // b(0, 1) = 0 means x = (0, 1) is a root at infinity of b(1, t).
  if (std::abs(coeffs[degree]) <= 1e-12 * fmax) directions.push_back((VectorXd(2) << 0.0, 1.0).finished());

  for (const auto& d : directions) {
    for (double sign : {1.0, -1.0}) {
      VectorXd u = sign * d;
      u /= std::pow(u.array().pow(m0).sum(), 1.0 / m0);
      const VectorXd gu = a.contract_partial(u);
      const VectorXd up = u.array().pow(p);
      const VectorXd weight = u.array().pow(m0 - p);
      const double lambda = weight.dot(gu);
      const double residual = std::max((gu - lambda * up).cwiseAbs().maxCoeff(),
                                       std::abs(u.array().pow(m0).sum() - 1.0));
      out.pairs.push_back({lambda, u, residual});
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const OraclePair& l, const OraclePair& r) { return l.lambda < r.lambda; });
  return out;
}

}  // namespace

OracleResult brute_z_n2(const Tensor& a) { return brute_n2(a, Kind::Z); }
OracleResult brute_h_n2(const Tensor& a) { return brute_n2(a, Kind::H); }

}  // namespace tensor_spectra
