#include "tensor_spectra/tensor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tensor_spectra {

namespace {

std::size_t checked_size(int order, int dim) {
  if (order < 2) throw std::invalid_argument("tensor order must be at least 2");
  if (dim < 1) throw std::invalid_argument("tensor dimension must be at least 1");
  std::size_t total = 1;
  for (int i = 0; i < order; ++i) total *= static_cast<std::size_t>(dim);
  return total;
}

}  // namespace

Tensor::Tensor(int order, int dim)
    : order_(order), dim_(dim), entries_(checked_size(order, dim), 0.0) {}

Tensor::Tensor(int order, int dim, std::vector<double> entries)
    : order_(order), dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != checked_size(order, dim))
    throw std::invalid_argument("tensor needs n^m entries");
  for (double v : entries_)
    if (!std::isfinite(v)) throw std::invalid_argument("tensor entries must be finite");
}

std::size_t Tensor::offset(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int i : index) flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  return flat;
}

void Tensor::unravel(std::size_t flat, std::span<int> index) const {
  for (int pos = order_ - 1; pos >= 0; --pos) {
    index[pos] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
    flat /= static_cast<std::size_t>(dim_);
  }
}

double Tensor::at(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != order_)
    throw std::invalid_argument("index length does not match tensor order");
  for (int i : index)
    if (i < 0 || i >= dim_) throw std::out_of_range("tensor index out of range");
  return entries_[offset(index)];
}

void Tensor::check_vector(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("vector length does not match tensor dimension");
}

Eigen::VectorXd Tensor::contract_partial(const Eigen::VectorXd& x) const {
  check_vector(x);
  // Contract the trailing index repeatedly: n^m -> n^{m-1} -> ... -> n.
  std::vector<double> current(entries_);
  std::size_t len = current.size();
  for (int step = 1; step < order_; ++step) {
    const std::size_t next_len = len / static_cast<std::size_t>(dim_);
    std::vector<double> next(next_len, 0.0);
    for (std::size_t i = 0; i < next_len; ++i) {
      double acc = 0.0;
      const double* row = current.data() + i * static_cast<std::size_t>(dim_);
      for (int j = 0; j < dim_; ++j) acc += row[j] * x[j];
      next[i] = acc;
    }
    current.swap(next);
    len = next_len;
  }
  return Eigen::Map<const Eigen::VectorXd>(current.data(), dim_);
}

double Tensor::contract_full(const Eigen::VectorXd& x) const {
  return x.dot(contract_partial(x));
}

Tensor identity_tensor(int order, int dim) {
  Tensor base(order, dim);
  std::vector<double> entries(base.size(), 0.0);
  std::vector<int> index(order);
  for (int i = 0; i < dim; ++i) {
    std::fill(index.begin(), index.end(), i);
    entries[base.offset(index)] = 1.0;
  }
  return Tensor(order, dim, std::move(entries));
}

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> tokens;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_real(const std::string& tok, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "non-numeric value '" + tok + "'");
  if (!std::isfinite(value)) throw ParseError(line, "non-finite value '" + tok + "'");
  return value;
}

int parse_int(const std::string& tok, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected integer, got '" + tok + "'");
  return value;
}

}  // namespace

Tensor parse_tensor(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  int order = 0;
  int dim = 0;
  bool dense = false;
  bool have_header = false;
  std::vector<double> entries;
  std::set<std::size_t> seen;
  std::size_t dense_count = 0;
  std::vector<int> index;
  Tensor shape(2, 1);

  while (std::getline(in, raw)) {
    ++line_no;
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() < 2 || tokens.size() > 3) throw ParseError(line_no, "malformed header");
      order = parse_int(tokens[0], line_no);
      dim = parse_int(tokens[1], line_no);
      if (order < 2 || dim < 1) throw ParseError(line_no, "malformed header: need m >= 2, n >= 1");
      if (tokens.size() == 3) {
        if (tokens[2] == "dense") dense = true;
        else if (tokens[2] != "sparse") throw ParseError(line_no, "malformed header: unknown format '" + tokens[2] + "'");
      }
      shape = Tensor(order, dim);
      entries.assign(shape.size(), 0.0);
      index.resize(order);
      have_header = true;
      continue;
    }
    if (dense) {
      for (const auto& tok : tokens) {
        if (dense_count >= entries.size()) throw ParseError(line_no, "too many dense values");
        entries[dense_count++] = parse_real(tok, line_no);
      }
      continue;
    }
    if (static_cast<int>(tokens.size()) != order + 1)
      throw ParseError(line_no, "sparse entry needs " + std::to_string(order) + " indices and a value");
    for (int p = 0; p < order; ++p) {
      const int i = parse_int(tokens[p], line_no);
      if (i < 1 || i > dim) throw ParseError(line_no, "index out of range");
      index[p] = i - 1;
    }
    const std::size_t flat = shape.offset(index);
    if (!seen.insert(flat).second) throw ParseError(line_no, "duplicate sparse entry");
    entries[flat] = parse_real(tokens[order], line_no);
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  if (dense && dense_count != entries.size())
    throw ParseError(line_no, "expected " + std::to_string(entries.size()) + " dense values, got " +
                                  std::to_string(dense_count));
  return Tensor(order, dim, std::move(entries));
}

Tensor read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tensor file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_tensor(buffer.str());
}

namespace {

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string serialize_tensor(const Tensor& tensor, TensorFormat format) {
  std::ostringstream out;
  const auto entries = tensor.entries();
  out << tensor.order() << ' ' << tensor.dim() << (format == TensorFormat::Dense ? " dense\n" : " sparse\n");
  if (format == TensorFormat::Dense) {
    const auto row = static_cast<std::size_t>(tensor.dim());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << format_real(entries[i]) << ((i + 1) % row == 0 ? '\n' : ' ');
    }
    return out.str();
  }
  std::vector<int> index(tensor.order());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i] == 0.0) continue;
    tensor.unravel(i, index);
    for (int p : index) out << p + 1 << ' ';
    out << format_real(entries[i]) << '\n';
  }
  return out.str();
}

}  // namespace tensor_spectra
