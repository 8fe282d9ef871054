#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tensor_spectra/eigen_driver.hpp"

namespace tensor_spectra {

enum class RunMode { Z, H, Both };

struct RunConfig {
  RunMode mode = RunMode::Z;
  std::string input;
  double delta = 0.05;
  double delta_min = 1e-6;
  int kmax_offset = 3;
  double tol_res = 1e-7;
  double rank_tol = 1e-6;
  bool nonneg = false;
  std::uint64_t seed = 20240531;
  bool json = false;
  bool timings = false;
  std::optional<std::string> dump_dir;

  DriverOptions driver_options() const;
};

struct RunResult {
  Spectrum spectrum;
  double seconds = 0.0;
};

/// Stable JSON document for one sweep; reals carry 12 significant digits.
/// Wall-clock seconds are included only when config.timings is set.
std::string emit_json(const RunResult& run, const RunConfig& config);
/// Fixed-width table with four decimals and a closing termination line.
std::string emit_text(const RunResult& run, const RunConfig& config, int m, int n);

/// Full command-line entry point; returns the process exit code
/// (0 complete, 2 usage or input error, 3 partial result).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tensor_spectra
