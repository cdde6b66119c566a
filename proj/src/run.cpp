#include "cavity_packets/cli_io.hpp"

#include "cavity_packets/errors.hpp"
#include "cavity_packets/wkb_chain.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace cavity_packets {
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const NoConvergence*>(&e) != nullptr) return 4;
  if (dynamic_cast<const Error*>(&e) != nullptr) return 3;
  return 1;
}

namespace {

constexpr const char* kVersion = "0.1.0";

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("out: cannot write '" + path.string() + "'");
    out_ << header << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  /// Appends a line whose cells are already formatted.
  void raw_row(const std::string& line) { out_ << line << '\n'; }

  const fs::path& path() const { return path_; }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return quote(s); }
  static std::string cell(const char* s) { return quote(std::string(s)); }

  fs::path path_;
  std::ofstream out_;
};

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out: cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

fs::path write_timeseries(const fs::path& dir, const Trajectory& traj) {
  CsvWriter csv(dir / "timeseries.csv", "t,mean_n,norm_or_trace,pop_excited");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    csv.row(traj.times[i], traj.mean_n[i], traj.norm[i], traj.pop_excited[i]);
  }
  return csv.path();
}

fs::path write_pnt(const fs::path& dir, const std::vector<PhotonDistribution>& series) {
  CsvWriter csv(dir / "pnt.csv", "t,n,p");
  for (const PhotonDistribution& d : series) {
    for (std::size_t n = 0; n < d.probs.size(); ++n) csv.row(d.time, n, d.probs[n]);
  }
  return csv.path();
}

fs::path write_spectrum(const fs::path& dir, const Spectrum* s) {
  CsvWriter csv(dir / "spectrum.csv", "freq,magnitude");
  if (s != nullptr) {
    for (std::size_t k = 0; k < s->freqs.size(); ++k) csv.row(s->freqs[k], s->magnitudes[k]);
  }
  return csv.path();
}

fs::path write_packets(const fs::path& dir, const std::vector<PacketSet>& sets) {
  CsvWriter csv(dir / "packets.csv", "t,packet_id,norm,mean,peak_n");
  for (const PacketSet& set : sets) {
    for (const Packet& p : set.packets) csv.row(set.time, p.track_id, p.norm, p.mean, p.peak);
  }
  return csv.path();
}

fs::path write_tracks(const fs::path& dir, const std::vector<PacketTrack>& tracks) {
  CsvWriter csv(dir / "tracks.csv", "packet_id,t_start,t_end,samples,amplitude,frequency");
  for (const PacketTrack& t : tracks) {
    csv.row(t.id, t.times.front(), t.times.back(), t.times.size(), t.amplitude, t.frequency);
  }
  return csv.path();
}

std::vector<PhotonDistribution> distributions_of(const Trajectory& traj) {
  std::vector<PhotonDistribution> out;
  out.reserve(traj.distributions.size());
  for (std::size_t i = 0; i < traj.distributions.size(); ++i) {
    out.push_back(make_distribution(traj.distributions[i], traj.times[i]));
  }
  return out;
}

TrackOptions track_options(const RunConfig& config) {
  TrackOptions o;
  o.packets = config.packets;
  o.spectrum = config.spectrum;
  o.max_jump = config.max_jump;
  return o;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json dressed_json(double f, double delta) {
  nlohmann::json doc;
  if (!(f > 0.0)) return doc;
  try {
    const LdsReport l = lds_report(f, delta);
    doc["lds"] = {
        {"theta", l.theta},
        {"omega_plus", {{"value", l.omega_plus.value}, {"imaginary", l.omega_plus.imaginary}}},
        {"omega_minus", {{"value", l.omega_minus.value}, {"imaginary", l.omega_minus.imaginary}}},
        {"chi_plus", finite_or_null(l.chi_plus)},
        {"chi_minus", finite_or_null(l.chi_minus)},
        {"zeta_plus", finite_or_null(l.zeta_plus)},
        {"zeta_minus", finite_or_null(l.zeta_minus)},
        {"p1", l.p1},
        {"q1", l.q1},
        {"p2", finite_or_null(l.p2)},
        {"q2", finite_or_null(l.q2)},
        {"r2", l.r2},
        {"amplitude", finite_or_null(l.amplitude)},
        {"validity_threshold", l.validity_threshold},
        {"validity_lds", l.validity_lds},
        {"stable_plus", l.stable_plus},
        {"stable_minus", l.stable_minus},
    };
  } catch (const PoleAtTwoF&) {
    doc["lds"] = nullptr;
  }
  const CdsReport c = cds_report(f, delta);
  doc["cds"] = {
      {"threshold_eighth", c.threshold_eighth},
      {"threshold_quarter", c.threshold_quarter},
      {"threshold_split", c.threshold_split},
      {"n_plus_up", finite_or_null(c.n_plus_up)},
      {"n_minus_up", finite_or_null(c.n_minus_up)},
      {"n_tilde_lo", finite_or_null(c.n_tilde_lo)},
      {"n_tilde_hi", finite_or_null(c.n_tilde_hi)},
      {"split_flag", c.split_flag},
      {"stationary_regime", to_string(c.regime)},
      {"in_bimodal_window", c.in_bimodal_window},
      {"stationary_low", c.stationary_low},
      {"stationary_high", finite_or_null(c.stationary_high)},
  };
  doc["f_drive"] = f;
  doc["delta"] = delta;
  return doc;
}

nlohmann::json base_metadata(const RunConfig& config) {
  nlohmann::json doc;
  doc["program"] = "cavity_packets";
  doc["version"] = kVersion;
  doc["mode"] = to_string(config.mode);
  nlohmann::json cfg;
  for (const auto& [k, v] : config_entries(config)) {
    if (k != "out") cfg[k] = v;
  }
  doc["config"] = cfg;
  doc["units"] = "hbar = g = 1; times in 1/g";
  return doc;
}

void analyse_series(const RunConfig& config, const fs::path& dir, const std::vector<double>& times,
                    const std::vector<double>& mean_n, const std::vector<PhotonDistribution>& series,
                    RunResult& result, nlohmann::json& meta) {
  const int min_samples = std::max(config.spectrum.min_samples, 2);
  if (static_cast<int>(times.size()) >= min_samples) {
    const Spectrum s = spectrum(times, mean_n, config.spectrum);
    result.files.push_back(write_spectrum(dir, &s));
    nlohmann::json peaks = nlohmann::json::array();
    for (const SpectralPeak& p : s.peaks) peaks.push_back({{"freq", p.freq}, {"height", p.height}});
    nlohmann::json fundamentals = nlohmann::json::array();
    for (const SpectralPeak& p : fundamental_peaks(s)) fundamentals.push_back(p.freq);
    meta["spectrum"] = {{"peaks", peaks}, {"fundamentals", fundamentals}};
  } else {
    result.files.push_back(write_spectrum(dir, nullptr));
    meta["spectrum"] = "skipped: fewer than spectrum.min_samples samples";
  }
  if (!series.empty()) {
    const TrackResult tracks = track_packets(series, track_options(config));
    result.files.push_back(write_packets(dir, tracks.snapshots));
    result.files.push_back(write_tracks(dir, tracks.tracks));
  }
}

RunResult run_evolve(const RunConfig& config, const fs::path& dir) {
  if (config.params.dissipative()) {
    throw ConfigError("kappa/gamma_rd/gamma_pd: evolve mode integrates the closed system; use mode=master");
  }
  RunResult result;
  const Trajectory traj = evolve_schrodinger(config.params, prepare_state(config.initial, config.params.n_max),
                                             config.grid);
  const std::vector<PhotonDistribution> series = distributions_of(traj);
  nlohmann::json meta = base_metadata(config);
  result.files.push_back(write_timeseries(dir, traj));
  result.files.push_back(write_pnt(dir, series));
  analyse_series(config, dir, traj.times, traj.mean_n, series, result, meta);
  const auto peak = std::max_element(traj.mean_n.begin(), traj.mean_n.end());
  meta["max_mean_n"] = *peak;
  meta["final_norm"] = traj.norm.back();
  meta["energy_drift"] = traj.energy.back() - traj.energy.front();
  result.files.push_back(dir / "dressed_report.json");
  write_json(result.files.back(), dressed_json(config.params.f_drive, config.params.delta));
  result.files.push_back(dir / "metadata.json");
  write_json(result.files.back(), meta);
  result.summary = "evolve: " + std::to_string(traj.size()) + " snapshots, max <n> = " + format_double(*peak);
  return result;
}

double stationary_step(const RunConfig& config, const SystemParams& params) {
  return config.stationary_dt > 0.0 ? config.stationary_dt : 0.9 * max_stable_dt(params);
}

fs::path write_stationary(const fs::path& dir, const PhotonDistribution& dist, const PacketSet& set,
                          std::vector<fs::path>& files) {
  {
    CsvWriter csv(dir / "stationary_pnt.csv", "n,p");
    for (std::size_t n = 0; n < dist.probs.size(); ++n) csv.row(n, dist.probs[n]);
    files.push_back(csv.path());
  }
  CsvWriter csv(dir / "stationary_packets.csv", "packet_id,n_lo,n_hi,norm,mean,peak_n");
  int id = 0;
  for (const Packet& p : set.packets) csv.row(id++, p.n_lo, p.n_hi, p.norm, p.mean, p.peak);
  files.push_back(csv.path());
  return csv.path();
}

RunResult run_master(const RunConfig& config, const fs::path& dir) {
  RunResult result;
  nlohmann::json meta = base_metadata(config);
  const DensityMatrix rho0 = to_density(prepare_state(config.initial, config.params.n_max));
  std::string summary = "master:";
  if (config.master_evolve) {
    const Trajectory traj = evolve_lindblad(config.params, rho0, config.grid);
    const std::vector<PhotonDistribution> series = distributions_of(traj);
    result.files.push_back(write_timeseries(dir, traj));
    result.files.push_back(write_pnt(dir, series));
    analyse_series(config, dir, traj.times, traj.mean_n, series, result, meta);
    meta["trace_drift"] = traj.norm.back() - traj.norm.front();
    summary += " " + std::to_string(traj.size()) + " snapshots";
  }
  if (config.master_stationary) {
    const double dt = stationary_step(config, config.params);
    const StationaryState st = find_stationary(config.params, rho0, dt, config.stationary);
    const PhotonDistribution dist = photon_distribution(st.rho, st.time);
    const PacketSet set = detect_packets(dist, config.packets);
    write_stationary(dir, dist, set, result.files);
    meta["stationary"] = {{"relaxation_time", st.time},   {"residual", st.residual},
                          {"seeded", st.seeded},           {"dt", dt},
                          {"top_occupation", st.top_occupation}, {"mean_n", dist.mean()},
                          {"packets", set.packets.size()}};
    summary += " stationary <n> = " + format_double(dist.mean()) + ", " + std::to_string(set.packets.size()) +
               " packet(s)";
  }
  result.files.push_back(dir / "dressed_report.json");
  write_json(result.files.back(), dressed_json(config.params.f_drive, config.params.delta));
  result.files.push_back(dir / "metadata.json");
  write_json(result.files.back(), meta);
  result.summary = summary;
  return result;
}

SystemParams with_axis(SystemParams p, const std::string& axis, double v) {
  if (axis == "delta") p.delta = v;
  else if (axis == "f_drive") p.f_drive = v;
  else if (axis == "kappa") p.kappa = v;
  else if (axis == "gamma_rd") p.gamma_rd = v;
  else if (axis == "gamma_pd") p.gamma_pd = v;
  else throw ConfigError("sweep.axis: unknown axis '" + axis + "'");
  return p;
}

double turning_point_for(const SystemParams& p, const InitialState& initial) {
  if (!(p.f_drive > 0.0)) return 0.0;
  const CdsReport c = cds_report(p.f_drive, p.delta);
  switch (initial.kind) {
    case InitialState::Kind::LdsPlus: return c.n_minus_up;
    case InitialState::Kind::LdsMinus: return c.n_plus_up;
    default: return std::max(c.n_minus_up, c.n_plus_up);
  }
}

const char* status_for(const std::exception& e) {
  if (dynamic_cast<const TruncationOverflow*>(&e) != nullptr) return "truncation_overflow";
  if (dynamic_cast<const StepUnstable*>(&e) != nullptr) return "step_unstable";
  if (dynamic_cast<const NoConvergence*>(&e) != nullptr) return "no_convergence";
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return "config_error";
  return "failed";
}

SweepRow sweep_point(const RunConfig& config, double value) {
  SweepRow row;
  row.axis_value = value;
  for (const ExcludedRange& r : config.sweep.exclude) {
    if (value >= r.lo && value <= r.hi) {
      row.status = "skipped";
      row.message = "inside an excluded range";
      return row;
    }
  }
  SystemParams params = with_axis(config.params, config.sweep.axis.name, value);
  row.n_max_used = params.n_max;
  try {
    params.validate();
    row.turning_point = turning_point_for(params, config.initial);
    if (config.sweep.metric == SweepMetric::MaxMeanPhoton) {
      EvolveOptions opts;
      opts.store_distributions = false;
      for (;;) {
        try {
          const PureState psi0 = prepare_state(config.initial, params.n_max);
          const Trajectory traj = params.dissipative()
                                      ? evolve_lindblad(params, to_density(psi0), config.grid, opts)
                                      : evolve_schrodinger(params, psi0, config.grid, opts);
          row.max_mean_n = *std::max_element(traj.mean_n.begin(), traj.mean_n.end());
          row.mean_n = traj.mean_n.back();
          break;
        } catch (const TruncationOverflow&) {
          if (2 * params.n_max > config.sweep.n_max_limit) throw;
          params.n_max *= 2;
          row.n_max_used = params.n_max;
        }
      }
    } else {
      if (!params.dissipative()) throw ConfigError("sweep.metric: stationary points need a positive rate");
      const DensityMatrix rho0 = to_density(prepare_state(config.initial, params.n_max));
      const StationaryState st = find_stationary(params, rho0, stationary_step(config, params), config.stationary);
      const PhotonDistribution dist = photon_distribution(st.rho, st.time);
      row.packets = detect_packets(dist, config.packets);
      row.probs = dist.probs;
      row.mean_n = dist.mean();
    }
  } catch (const Error& e) {
    row.status = status_for(e);
    row.message = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& config, int threads) {
  const std::vector<double> values = config.sweep.axis.values();
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) rows[i] = sweep_point(config, values[i]);
  };
  const int count = std::clamp(threads, 1, static_cast<int>(values.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.axis_value < b.axis_value; });
  return rows;
}

namespace {

RunResult run_sweep_mode(const RunConfig& config, const fs::path& dir, int threads) {
  RunResult result;
  const std::vector<SweepRow> rows = run_sweep(config, threads);
  nlohmann::json meta = base_metadata(config);
  int ok = 0;
  if (config.sweep.metric == SweepMetric::MaxMeanPhoton) {
    CsvWriter csv(dir / "sweep.csv", "axis_value,status,max_mean_n,turning_point,n_max_used,message");
    for (const SweepRow& r : rows) {
      csv.row(r.axis_value, r.status, r.max_mean_n, r.turning_point, r.n_max_used, r.message);
      ok += r.status == "ok";
    }
    result.files.push_back(csv.path());
    meta["time_horizon"] = "max_mean_n is the maximum over the stored strides of t in [0, t_final]";
  } else {
    constexpr int kColumns = 3;
    std::string header = "axis_value,status,mean_n,packet_count";
    for (int k = 1; k <= kColumns; ++k) {
      header += ",norm_" + std::to_string(k) + ",mean_" + std::to_string(k);
    }
    header += ",n_max_used,message";
    CsvWriter csv(dir / "sweep.csv", header);
    for (const SweepRow& r : rows) {
      std::ostringstream line;
      line << format_double(r.axis_value) << ',' << r.status << ',' << format_double(r.mean_n) << ','
           << r.packets.packets.size();
      for (int k = 0; k < kColumns; ++k) {
        if (k < static_cast<int>(r.packets.packets.size())) {
          line << ',' << format_double(r.packets.packets[k].norm) << ',' << format_double(r.packets.packets[k].mean);
        } else {
          line << ",,";
        }
      }
      line << ',' << r.n_max_used << ',';
      csv.raw_row(line.str() + quote(r.message));
      ok += r.status == "ok";
    }
    result.files.push_back(csv.path());
    CsvWriter pnt(dir / "sweep_pnt.csv", "axis_value,n,p");
    for (const SweepRow& r : rows) {
      for (std::size_t n = 0; n < r.probs.size(); ++n) pnt.row(r.axis_value, n, r.probs[n]);
    }
    result.files.push_back(pnt.path());
  }
  meta["points"] = rows.size();
  meta["points_ok"] = ok;
  result.files.push_back(dir / "metadata.json");
  write_json(result.files.back(), meta);
  result.summary = "sweep: " + std::to_string(ok) + " of " + std::to_string(rows.size()) + " points ok";
  return result;
}

RunResult run_wigner(const RunConfig& config, const fs::path& dir) {
  RunResult result;
  TimeGrid grid = config.grid;
  grid.output_stride = static_cast<int>(std::min<long long>(grid.steps(), std::numeric_limits<int>::max()));
  EvolveOptions opts;
  opts.store_states = true;
  const PureState psi0 = prepare_state(config.initial, config.params.n_max);
  DensityMatrix rho;
  Trajectory traj;
  if (config.params.dissipative()) {
    traj = evolve_lindblad(config.params, to_density(psi0), grid, opts);
    rho = traj.density_states.back();
  } else {
    traj = evolve_schrodinger(config.params, psi0, grid, opts);
    rho = to_density(traj.pure_states.back());
  }
  const WignerGrid w = wigner(reduce_photonic(rho), config.wigner);
  {
    CsvWriter csv(dir / "wigner.csv", "re_z,im_z,w");
    for (std::size_t j = 0; j < w.im_axis.size(); ++j) {
      for (std::size_t i = 0; i < w.re_axis.size(); ++i) csv.row(w.re_axis[i], w.im_axis[j], w.values(i, j));
    }
    result.files.push_back(csv.path());
  }
  result.files.push_back(write_pnt(dir, {photon_distribution(rho, traj.times.back())}));
  nlohmann::json meta = base_metadata(config);
  meta["wigner"] = {{"time", traj.times.back()}, {"min", w.min()}, {"max", w.max()}, {"integral", w.integral()},
                    {"convention", "z is the coherent amplitude alpha; vacuum W = (2/pi) exp(-2|z|^2)"}};
  result.files.push_back(dir / "metadata.json");
  write_json(result.files.back(), meta);
  result.summary = "wigner: min W = " + format_double(w.min());
  return result;
}

RunResult run_chain(const RunConfig& config, const fs::path& dir) {
  RunResult result;
  const ChainSpec spec =
      ChainSpec::cavity_dressed(config.params.f_drive, config.params.delta, config.chain.branch, config.chain.m);
  const ChainModes modes = chain_eigensolve(spec);
  const double lo = config.chain.lambda_lo;
  const double hi = config.chain.lambda_hi;
  {
    CsvWriter csv(dir / "chain_spectrum.csv", "k,lambda,confined_fraction,osc_lo,osc_hi");
    for (int k = 0; k < modes.eigenvalues.size(); ++k) {
      const double lambda = modes.eigenvalues(k);
      if (lambda < lo || lambda > hi) continue;
      const RegionMap map = classify_region(spec, lambda);
      const int osc_lo = map.oscillatory.empty() ? -1 : map.oscillatory.front().lo;
      const int osc_hi = map.oscillatory.empty() ? -1 : map.oscillatory.back().hi;
      csv.row(k, lambda, confined_fraction(modes, spec, k, config.chain.margin), osc_lo, osc_hi);
    }
    result.files.push_back(csv.path());
  }
  {
    CsvWriter csv(dir / "chain_modes.csv", "k,n,c");
    for (int k = 0; k < modes.eigenvalues.size(); ++k) {
      const double lambda = modes.eigenvalues(k);
      if (lambda < lo || lambda > hi) continue;
      for (int n = 0; n < spec.size(); ++n) csv.row(k, n, modes.eigenvectors(n, k));
    }
    result.files.push_back(csv.path());
  }
  const DecayReport decay = decay_verification(modes, spec, lo, hi);
  {
    CsvWriter csv(dir / "chain_decay.csv", "k,lambda,turning_point,direction,sites,slope,monotone");
    for (const DecaySide& s : decay.sides) {
      csv.row(s.mode, s.lambda, s.turning_point, s.direction, s.sites, s.slope, s.monotone ? 1 : 0);
    }
    result.files.push_back(csv.path());
  }
  nlohmann::json meta = base_metadata(config);
  meta["chain"] = {{"sites", spec.size()},
                   {"xi", spec.xi},
                   {"decay_all_monotone", decay.all_monotone()},
                   {"decay_all_negative_slope", decay.all_decaying()}};
  result.files.push_back(dir / "dressed_report.json");
  write_json(result.files.back(), dressed_json(config.params.f_drive, config.params.delta));
  result.files.push_back(dir / "metadata.json");
  write_json(result.files.back(), meta);
  result.summary = "chain: " + std::to_string(spec.size()) + " sites";
  return result;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("analyze.input: cannot read '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ConfigError("analyze.input: '" + path.string() + "' does not start with " + header);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double cell_number(const std::string& s, const fs::path& path) {
  // strtod rather than stod: tails of P_n are written as subnormals, which
  // stod rejects as out of range.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ConfigError("analyze.input: bad number '" + s + "' in " + path.string());
  }
  return v;
}

RunResult run_analyze(const RunConfig& config, const fs::path& dir) {
  RunResult result;
  const fs::path in = config.analyze_input;
  std::vector<double> times;
  std::vector<double> mean_n;
  for (const auto& r : read_csv(in / "timeseries.csv", "t,mean_n,norm_or_trace,pop_excited")) {
    if (r.size() != 4) throw ConfigError("analyze.input: timeseries.csv rows need 4 columns");
    times.push_back(cell_number(r[0], in / "timeseries.csv"));
    mean_n.push_back(cell_number(r[1], in / "timeseries.csv"));
  }
  std::vector<PhotonDistribution> series;
  for (const auto& r : read_csv(in / "pnt.csv", "t,n,p")) {
    if (r.size() != 3) throw ConfigError("analyze.input: pnt.csv rows need 3 columns");
    const double t = cell_number(r[0], in / "pnt.csv");
    const double n = cell_number(r[1], in / "pnt.csv");
    if (series.empty() || series.back().time != t) {
      if (n != 0.0) throw ConfigError("analyze.input: pnt.csv snapshots must start at n = 0");
      series.push_back(PhotonDistribution{{}, t});
    }
    series.back().probs.push_back(cell_number(r[2], in / "pnt.csv"));
  }
  for (PhotonDistribution& d : series) d = make_distribution(std::move(d.probs), d.time);
  nlohmann::json meta = base_metadata(config);
  analyse_series(config, dir, times, mean_n, series, result, meta);
  result.files.push_back(dir / "metadata.json");
  write_json(result.files.back(), meta);
  result.summary = "analyze: " + std::to_string(series.size()) + " snapshots";
  return result;
}

}  // namespace

RunResult run(const RunConfig& config, int threads) {
  config.validate();
  const fs::path dir = config.output_dir.empty() ? fs::path(".") : fs::path(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("out: cannot create '" + dir.string() + "': " + ec.message());
  switch (config.mode) {
    case RunMode::Evolve: return run_evolve(config, dir);
    case RunMode::Master: return run_master(config, dir);
    case RunMode::Sweep: return run_sweep_mode(config, dir, threads);
    case RunMode::Wigner: return run_wigner(config, dir);
    case RunMode::Chain: return run_chain(config, dir);
    case RunMode::Analyze: return run_analyze(config, dir);
  }
  throw ConfigError("mode: unsupported");
}

}  // namespace cavity_packets
