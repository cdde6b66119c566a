#include "cavity_packets/cli_io.hpp"

#include "cavity_packets/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace cavity_packets {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunMode parse_mode(std::string_view text) {
  if (text == "evolve") return RunMode::Evolve;
  if (text == "master") return RunMode::Master;
  if (text == "sweep") return RunMode::Sweep;
  if (text == "wigner") return RunMode::Wigner;
  if (text == "chain") return RunMode::Chain;
  if (text == "analyze") return RunMode::Analyze;
  throw ConfigError("mode: unknown value '" + std::string(text) + "'");
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Evolve: return "evolve";
    case RunMode::Master: return "master";
    case RunMode::Sweep: return "sweep";
    case RunMode::Wigner: return "wigner";
    case RunMode::Chain: return "chain";
    case RunMode::Analyze: return "analyze";
  }
  return "evolve";
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty()) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() ||
      out < std::numeric_limits<int>::min() || out > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return static_cast<int>(out);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::vector<ExcludedRange> to_ranges(const std::string& key, const std::string& value) {
  std::vector<ExcludedRange> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':', 1);
    if (colon == std::string::npos) throw ConfigError(key + ": ranges are written lo:hi, got '" + item + "'");
    ExcludedRange r{to_double(key, trim(item.substr(0, colon))), to_double(key, trim(item.substr(colon + 1)))};
    if (r.hi < r.lo) throw ConfigError(key + ": range '" + item + "' has hi < lo");
    out.push_back(r);
  }
  return out;
}

std::string from_ranges(const std::vector<ExcludedRange>& ranges) {
  std::string out;
  for (const ExcludedRange& r : ranges) {
    if (!out.empty()) out += ",";
    out += format_double(r.lo) + ":" + format_double(r.hi);
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CP_DOUBLE(member)                                                                      \
  Field {                                                                                      \
    [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, \
        [](const RunConfig& c) { return format_double(c.member); }                              \
  }
#define CP_INT(member)                                                                      \
  Field {                                                                                   \
    [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_int(k, v); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                          \
  }
#define CP_BOOL(member)                                                                      \
  Field {                                                                                    \
    [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_bool(k, v); }, \
        [](const RunConfig& c) { return from_bool(c.member); }                                \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"mode", {[](RunConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); },
                [](const RunConfig& c) { return std::string(to_string(c.mode)); }}},
      {"f_drive", CP_DOUBLE(params.f_drive)},
      {"delta", CP_DOUBLE(params.delta)},
      {"dxl", CP_DOUBLE(params.dxl)},
      {"kappa", CP_DOUBLE(params.kappa)},
      {"gamma_rd", CP_DOUBLE(params.gamma_rd)},
      {"gamma_pd", CP_DOUBLE(params.gamma_pd)},
      {"n_max", CP_INT(params.n_max)},
      {"coupling", CP_DOUBLE(params.coupling)},
      {"t_final", CP_DOUBLE(grid.t_final)},
      {"dt", CP_DOUBLE(grid.dt)},
      {"output_stride", CP_INT(grid.output_stride)},
      {"initial_state",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          try {
            c.initial = InitialState::parse(v);
          } catch (const ConfigError& e) {
            throw ConfigError(k + ": " + e.what());
          }
        },
        [](const RunConfig& c) { return c.initial.to_string(); }}},
      {"out", {[](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
               [](const RunConfig& c) { return c.output_dir; }}},
      {"sweep.axis", {[](RunConfig& c, const std::string& k, const std::string& v) {
                        if (v != "delta" && v != "f_drive" && v != "kappa" && v != "gamma_rd" && v != "gamma_pd") {
                          throw ConfigError(k + ": unknown axis '" + v + "'");
                        }
                        c.sweep.axis.name = v;
                      },
                      [](const RunConfig& c) { return c.sweep.axis.name; }}},
      {"sweep.start", CP_DOUBLE(sweep.axis.start)},
      {"sweep.stop", CP_DOUBLE(sweep.axis.stop)},
      {"sweep.count", CP_INT(sweep.axis.count)},
      {"sweep.metric",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "max_mean_n") {
            c.sweep.metric = SweepMetric::MaxMeanPhoton;
          } else if (v == "stationary") {
            c.sweep.metric = SweepMetric::Stationary;
          } else {
            throw ConfigError(k + ": expected max_mean_n or stationary, got '" + v + "'");
          }
        },
        [](const RunConfig& c) {
          return std::string(c.sweep.metric == SweepMetric::MaxMeanPhoton ? "max_mean_n" : "stationary");
        }}},
      {"sweep.exclude", {[](RunConfig& c, const std::string& k, const std::string& v) { c.sweep.exclude = to_ranges(k, v); },
                         [](const RunConfig& c) { return from_ranges(c.sweep.exclude); }}},
      {"sweep.n_max_limit", CP_INT(sweep.n_max_limit)},
      {"chain.branch",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "plus" || v == "+") {
            c.chain.branch = Branch::Plus;
          } else if (v == "minus" || v == "-") {
            c.chain.branch = Branch::Minus;
          } else {
            throw ConfigError(k + ": expected plus or minus, got '" + v + "'");
          }
        },
        [](const RunConfig& c) { return std::string(c.chain.branch == Branch::Plus ? "plus" : "minus"); }}},
      {"chain.m", CP_INT(chain.m)},
      {"chain.lambda_lo", CP_DOUBLE(chain.lambda_lo)},
      {"chain.lambda_hi", CP_DOUBLE(chain.lambda_hi)},
      {"chain.margin", CP_INT(chain.margin)},
      {"packets.valley_fraction", CP_DOUBLE(packets.valley_fraction)},
      {"packets.min_norm", CP_DOUBLE(packets.min_norm)},
      {"packets.smoothing", CP_INT(packets.smoothing)},
      {"packets.support_floor", CP_DOUBLE(packets.support_floor)},
      {"spectrum.zero_pad", CP_INT(spectrum.zero_pad)},
      {"spectrum.peak_fraction", CP_DOUBLE(spectrum.peak_fraction)},
      {"spectrum.min_samples", CP_INT(spectrum.min_samples)},
      {"tracking.max_jump", CP_DOUBLE(max_jump)},
      {"wigner.re_min", CP_DOUBLE(wigner.re_min)},
      {"wigner.re_max", CP_DOUBLE(wigner.re_max)},
      {"wigner.im_min", CP_DOUBLE(wigner.im_min)},
      {"wigner.im_max", CP_DOUBLE(wigner.im_max)},
      {"wigner.re_points", CP_INT(wigner.re_points)},
      {"wigner.im_points", CP_INT(wigner.im_points)},
      {"stationary.tolerance", CP_DOUBLE(stationary.tolerance)},
      {"stationary.time_limit_factor", CP_DOUBLE(stationary.time_limit_factor)},
      {"stationary.dt", CP_DOUBLE(stationary_dt)},
      {"stationary.seed", CP_BOOL(stationary.seed_with_null_vector)},
      {"stationary.guard_truncation", CP_BOOL(stationary.guard_truncation)},
      {"master.evolve", CP_BOOL(master_evolve)},
      {"master.stationary", CP_BOOL(master_stationary)},
      {"analyze.input", {[](RunConfig& c, const std::string&, const std::string& v) { c.analyze_input = v; },
                         [](const RunConfig& c) { return c.analyze_input; }}},
  };
  return table;
}

#undef CP_DOUBLE
#undef CP_INT
#undef CP_BOOL

}  // namespace

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key + ": unknown configuration key");
  it->second.set(config, key, trim(value));
}

std::map<std::string, std::string> config_entries(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(config);
  return out;
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_ini(std::string_view text, RunConfig base) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    set_key(base, section.empty() ? key : section + "." + key, value);
  }
  return base;
}

namespace {

void flatten_json(const nlohmann::json& node, const std::string& prefix, RunConfig& config) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const nlohmann::json& v = it.value();
    if (v.is_object()) {
      flatten_json(v, key, config);
    } else if (v.is_string()) {
      set_key(config, key, v.get<std::string>());
    } else if (v.is_boolean()) {
      set_key(config, key, v.get<bool>() ? "true" : "false");
    } else if (v.is_number_integer()) {
      set_key(config, key, std::to_string(v.get<long long>()));
    } else if (v.is_number()) {
      set_key(config, key, format_double(v.get<double>()));
    } else {
      throw ConfigError(key + ": unsupported JSON value " + v.dump());
    }
  }
}

}  // namespace

RunConfig parse_json(std::string_view text, RunConfig base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config JSON: top level must be an object");
  flatten_json(doc, "", base);
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_json(buf.str(), std::move(base));
  return parse_ini(buf.str(), std::move(base));
}

void RunConfig::validate() const {
  params.validate();
  if (mode != RunMode::Chain && mode != RunMode::Analyze) grid.validate();
  if (initial.kind == InitialState::Kind::Fock || initial.kind == InitialState::Kind::ExcitedFock) {
    if (initial.n > params.n_max) throw ConfigError("initial_state: photon number exceeds n_max");
  }
  if (mode == RunMode::Sweep) {
    if (sweep.axis.count < 2) throw ConfigError("sweep.count: need at least 2 grid points");
    if (!std::isfinite(sweep.axis.start) || !std::isfinite(sweep.axis.stop)) {
      throw ConfigError("sweep.start: sweep bounds must be finite");
    }
    if (sweep.n_max_limit < params.n_max) throw ConfigError("sweep.n_max_limit: below n_max");
  }
  if (mode == RunMode::Master && !params.dissipative() && master_stationary) {
    throw ConfigError("kappa: master mode with master.stationary needs at least one positive rate");
  }
  if (mode == RunMode::Wigner) wigner.validate();
  if (mode == RunMode::Chain) {
    if (!(params.f_drive > 0.0)) throw ConfigError("f_drive: chain mode needs a positive drive");
    if (chain.m < 16) throw ConfigError("chain.m: need at least 16");
    if (chain.margin < 0) throw ConfigError("chain.margin: must be non-negative");
  }
  if (mode == RunMode::Analyze && analyze_input.empty()) {
    throw ConfigError("analyze.input: analyze mode needs the directory of a previous run");
  }
  if (packets.smoothing < 1 || packets.smoothing % 2 == 0) {
    throw ConfigError("packets.smoothing: must be a positive odd integer");
  }
  if (!(packets.valley_fraction > 0.0 && packets.valley_fraction < 1.0)) {
    throw ConfigError("packets.valley_fraction: must lie in (0, 1)");
  }
  if (packets.min_norm < 0.0) throw ConfigError("packets.min_norm: must be non-negative");
  if (spectrum.zero_pad < 1) throw ConfigError("spectrum.zero_pad: must be at least 1");
  if (spectrum.min_samples < 2) throw ConfigError("spectrum.min_samples: must be at least 2");
  if (!(max_jump > 0.0)) throw ConfigError("tracking.max_jump: must be positive");
  if (stationary_dt < 0.0) throw ConfigError("stationary.dt: must be non-negative");
  if (!(stationary.tolerance > 0.0)) throw ConfigError("stationary.tolerance: must be positive");
}

int default_threads() {
  if (const char* env = std::getenv("CAVITY_PACKETS_THREADS")) {
    try {
      const int n = to_int("CAVITY_PACKETS_THREADS", trim(env));
      if (n >= 1) return n;
    } catch (const ConfigError&) {
    }
    throw ConfigError("CAVITY_PACKETS_THREADS: expected a positive integer, got '" + std::string(env) + "'");
  }
  return 1;
}

}  // namespace cavity_packets
