#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tensor_spectra {

/// Raised by the tensor text reader; the message carries the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Dense cubical tensor of order m and dimension n (n^m real entries).
///
/// Entries are stored row-major with the last index running fastest. All
/// indices passed to the accessors are 0-based; the text format is 1-based.
class Tensor {
 public:
  Tensor(int order, int dim);
  Tensor(int order, int dim, std::vector<double> entries);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  std::span<const double> entries() const { return entries_; }

  double operator()(std::span<const int> index) const { return entries_[offset(index)]; }
  double at(std::span<const int> index) const;

  std::size_t offset(std::span<const int> index) const;
  /// Inverse of offset(): writes the multi-index of a flat position.
  void unravel(std::size_t flat, std::span<int> index) const;

  /// A x^m, the full contraction.
  double contract_full(const Eigen::VectorXd& x) const;
  /// A x^{m-1}, contraction over every index except the first.
  Eigen::VectorXd contract_partial(const Eigen::VectorXd& x) const;

  bool operator==(const Tensor& other) const = default;

 private:
  void check_vector(const Eigen::VectorXd& x) const;

  int order_;
  int dim_;
  std::vector<double> entries_;
};

/// Tensor with ones on the superdiagonal I_{i...i} and zeros elsewhere.
Tensor identity_tensor(int order, int dim);

/// Read the text format: a header "m n [dense|sparse]" followed by entries.
Tensor parse_tensor(std::string_view text);
Tensor read_tensor_file(const std::string& path);

enum class TensorFormat { Dense, Sparse };
std::string serialize_tensor(const Tensor& tensor, TensorFormat format = TensorFormat::Sparse);

}  // namespace tensor_spectra
