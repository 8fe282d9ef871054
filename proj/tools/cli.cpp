#include "tensor_spectra/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace tensor_spectra {

using ordered_json = nlohmann::ordered_json;

DriverOptions RunConfig::driver_options() const {
  DriverOptions o;
  o.delta0 = delta;
  o.delta_min = delta_min;
  o.kmax_offset = kmax_offset;
  o.res_tol = tol_res;
  o.rank_tol = rank_tol;
  o.nonneg = nonneg;
  o.seed = seed;
  o.dump_dir = dump_dir;
  return o;
}

namespace {

double round12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string fixed4(double x) {
  if (std::abs(x) < 5e-5) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  return buf;
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Z: return "zeig";
    case RunMode::H: return "heig";
    case RunMode::Both: return "both";
  }
  return "";
}

bool partial(const Spectrum& s) { return s.termination != Termination::CertifiedComplete; }

}  // namespace

std::string emit_json(const RunResult& run, const RunConfig& config) {
  const Spectrum& s = run.spectrum;
  ordered_json doc;
  doc["kind"] = to_string(s.kind);
  ordered_json values = ordered_json::array();
  for (const auto& p : s.eigenpairs) {
    ordered_json e;
    e["value"] = round12(p.value);
    ordered_json vecs = ordered_json::array();
    for (const auto& v : p.vectors) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(std::abs(v[i]) <= 1e-14 ? 0.0 : round12(v[i]));
      vecs.push_back(row);
    }
    e["vectors"] = vecs;
    e["residual"] = round12(p.residual);
    e["isolated"] = p.isolated;
    e["order"] = p.order_used;
    values.push_back(e);
  }
  doc["eigenvalues"] = values;
  doc["termination"] = to_string(s.termination);
  doc["detail"] = s.detail;
  ordered_json cfg;
  cfg["mode"] = mode_name(config.mode);
  cfg["input"] = config.input;
  cfg["delta"] = config.delta;
  cfg["delta_min"] = config.delta_min;
  cfg["kmax_offset"] = config.kmax_offset;
  cfg["tol_res"] = config.tol_res;
  cfg["rank_tol"] = config.rank_tol;
  cfg["nonneg"] = config.nonneg;
  cfg["seed"] = config.seed;
  doc["config"] = cfg;
  ordered_json timings;
  timings["relaxations"] = s.log.size();
  if (config.timings) timings["seconds"] = round12(run.seconds);
  doc["timings"] = timings;
  return doc.dump(2);
}

std::string emit_text(const RunResult& run, const RunConfig& config, int m, int n) {
  const Spectrum& s = run.spectrum;
  const std::string kind = to_string(s.kind);
  std::ostringstream out;
  out << kind << "-eigenvalues of " << config.input << " (m=" << m << ", n=" << n << ")";
  if (config.nonneg && s.kind == EigenKind::Z) out << ", nonnegative only";
  out << "\n";
  if (s.eigenpairs.empty()) {
    if (s.termination == Termination::CertifiedComplete)
      out << "no real " << kind << "-eigenvalues (certified)\n";
    else
      out << "no real " << kind << "-eigenvalues found\n";
  } else {
    char head[128];
    std::snprintf(head, sizeof head, "  %12s  %9s  %8s  %5s  %s\n", "lambda", "residual", "isolated", "order",
                  "eigenvectors");
    out << head;
    for (const auto& p : s.eigenpairs) {
      std::string vecs;
      for (const auto& v : p.vectors) {
        if (!vecs.empty()) vecs += ' ';
        vecs += '(';
        for (Eigen::Index i = 0; i < v.size(); ++i) vecs += (i ? ", " : "") + fixed4(v[i]);
        vecs += ')';
      }
      char row[256];
      std::snprintf(row, sizeof row, "  %12s  %9s  %8s  %5d  ", fixed4(p.value).c_str(), sci(p.residual).c_str(),
                    p.isolated ? "yes" : "no", p.order_used);
      out << row << vecs << "\n";
    }
  }
  out << "termination: " << to_string(s.termination);
  if (!s.detail.empty()) out << " (" << s.detail << ")";
  if (partial(s)) out << " [partial]";
  out << "\n";
  if (config.timings) out << "relaxations: " << s.log.size() << ", seconds: " << round12(run.seconds) << "\n";
  return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::string mode;
  CLI::App app{"Real Z- and H-eigenvalues of tensors by moment relaxations", "tensor-spectra"};
  app.add_option("mode", mode, "zeig, heig or both")->required()->check(CLI::IsMember({"zeig", "heig", "both"}));
  app.add_option("file", config.input, "tensor file")->required();
  app.add_option("--delta", config.delta, "initial gap delta")->capture_default_str();
  app.add_option("--delta-min", config.delta_min, "smallest delta before giving up")->capture_default_str();
  app.add_option("--kmax-offset", config.kmax_offset, "relaxation orders tried above k0")->capture_default_str();
  app.add_flag("--nonneg", config.nonneg, "Z only: restrict to nonnegative eigenvalues");
  app.add_option("--tol-res", config.tol_res, "eigen-equation residual gate")->capture_default_str();
  app.add_option("--rank-tol", config.rank_tol, "relative singular value cut for ranks")->capture_default_str();
  app.add_option("--seed", config.seed, "seed for extraction draws (TENSOR_SPECTRA_SEED overrides)")
      ->capture_default_str();
  app.add_flag("--json", config.json, "machine-readable output");
  app.add_flag("--timings", config.timings, "report wall-clock time");
  app.add_option("--dump-sdp", config.dump_dir, "write every relaxation to this directory");

  std::vector<const char*> argv{"tensor-spectra"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (const char* env = std::getenv("TENSOR_SPECTRA_SEED")) {
    try {
      std::size_t used = 0;
      config.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      err << "error: TENSOR_SPECTRA_SEED is not an unsigned integer: " << env << "\n";
      return 2;
    }
  }
  config.mode = mode == "zeig" ? RunMode::Z : mode == "heig" ? RunMode::H : RunMode::Both;
  if (!(config.delta_min > 0.0) || !(config.delta > config.delta_min) || !(config.tol_res > 0.0) ||
      !(config.rank_tol > 0.0) || config.kmax_offset < 0) {
    err << "error: need 0 < delta-min < delta, positive tolerances and kmax-offset >= 0\n";
    return 2;
  }

  std::optional<Tensor> tensor;
  try {
    tensor = read_tensor_file(config.input);
  } catch (const std::exception& e) {
    err << "error: " << config.input << ": " << e.what() << "\n";
    return 2;
  }

  std::vector<EigenKind> kinds;
  if (config.mode != RunMode::H) kinds.push_back(EigenKind::Z);
  if (config.mode != RunMode::Z) kinds.push_back(EigenKind::H);

  std::vector<RunResult> runs;
  try {
    for (EigenKind kind : kinds) {
      const auto t0 = std::chrono::steady_clock::now();
      RunResult r{full_sweep(kind, *tensor, config.driver_options())};
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      runs.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (config.json) {
    if (runs.size() == 1) {
      out << emit_json(runs.front(), config) << "\n";
    } else {
      out << "[\n";
      for (std::size_t i = 0; i < runs.size(); ++i) out << emit_json(runs[i], config) << (i + 1 < runs.size() ? ",\n" : "\n");
      out << "]\n";
    }
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (i) out << "\n";
      out << emit_text(runs[i], config, tensor->order(), tensor->dim());
    }
  }
  for (const auto& r : runs)
    if (partial(r.spectrum)) return 3;
  return 0;
}

}  // namespace tensor_spectra
