#pragma once

#include "cavity_packets/analysis.hpp"
#include "cavity_packets/core_model.hpp"
#include "cavity_packets/dressed_analytics.hpp"
#include "cavity_packets/dynamics.hpp"
#include "cavity_packets/observables.hpp"

#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cavity_packets {

enum class RunMode { Evolve, Master, Sweep, Wigner, Chain, Analyze };

RunMode parse_mode(std::string_view text);
const char* to_string(RunMode mode);

enum class SweepMetric {
  MaxMeanPhoton,  ///< closed evolution, records max_t <a^dagger a>
  Stationary,     ///< dissipative steady state, records packet summary and P_n
};

struct SweepAxis {
  std::string name = "delta";  ///< one of delta, f_drive, kappa, gamma_rd, gamma_pd
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> values() const;
};

struct ExcludedRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct SweepSettings {
  SweepAxis axis;
  SweepMetric metric = SweepMetric::MaxMeanPhoton;
  std::vector<ExcludedRange> exclude;  ///< points inside are reported as skipped
  /// On TruncationOverflow the cutoff doubles until it would exceed this.
  int n_max_limit = 6400;
};

struct ChainSettings {
  Branch branch = Branch::Minus;
  int m = 200;
  double lambda_lo = -1e300;
  double lambda_hi = 1e300;
  int margin = 5;  ///< sites added on each side of the oscillatory window
};

struct RunConfig {
  RunMode mode = RunMode::Evolve;
  SystemParams params;
  TimeGrid grid;
  InitialState initial;
  SweepSettings sweep;
  ChainSettings chain;
  PacketOptions packets;
  SpectrumOptions spectrum;
  double max_jump = 15.0;
  GridSpec wigner;
  StationaryOptions stationary;  ///< on_window is never read from config
  /// RK4 step for the stationary relaxation windows; 0 picks 0.9 of the
  /// largest step the stability rule allows.
  double stationary_dt = 0.0;
  bool master_evolve = true;     ///< master mode: write the transient
  bool master_stationary = true; ///< master mode: solve for the steady state
  std::string analyze_input;     ///< directory holding timeseries.csv and pnt.csv
  std::string output_dir = ".";

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Flat key = value text. Lines starting with # or ; are comments and
/// [section] headers prefix the keys that follow with "section.".
RunConfig parse_ini(std::string_view text, RunConfig base = {});
/// JSON object; nested objects flatten to dotted keys.
RunConfig parse_json(std::string_view text, RunConfig base = {});
/// Picks the parser from the extension (.json or anything else as INI).
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
/// Applies one "key=value" assignment.
void apply_override(RunConfig& config, std::string_view assignment);
void set_key(RunConfig& config, const std::string& key, const std::string& value);
/// Canonical key = value listing, the form written to the run metadata.
std::map<std::string, std::string> config_entries(const RunConfig& config);

/// Formats with 17 significant digits so values round-trip exactly.
std::string format_double(double v);

struct SweepRow {
  double axis_value = 0.0;
  std::string status = "ok";
  std::string message;
  int n_max_used = 0;
  double max_mean_n = 0.0;
  double turning_point = 0.0;
  PacketSet packets;
  std::vector<double> probs;  ///< stationary P_n
  double mean_n = 0.0;
};

/// Runs every grid point (concurrently when threads > 1). Rows come back in
/// grid order and do not depend on the thread count.
std::vector<SweepRow> run_sweep(const RunConfig& config, int threads);

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::string summary;  ///< one-line description for the run log
};

/// Executes the configured mode and writes its CSV and JSON files into
/// config.output_dir. Library errors propagate; see exit_code_for.
RunResult run(const RunConfig& config, int threads = 1);

/// 2 for configuration errors, 3 for numerical failures, 4 for
/// NoConvergence, 1 otherwise.
int exit_code_for(const std::exception& e);

/// Thread count from the CAVITY_PACKETS_THREADS variable, or 1.
int default_threads();

}  // namespace cavity_packets
