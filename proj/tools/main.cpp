#include "cavity_packets/cli_io.hpp"
#include "cavity_packets/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace cp = cavity_packets;

int main(int argc, char** argv) {
  CLI::App app{"Strongly driven Jaynes-Cummings simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "INI or JSON configuration file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads for sweeps (default: CAVITY_PACKETS_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--override", overrides, "key=value, applied after the config file")->take_all();

  const std::vector<std::pair<std::string, std::string>> modes = {
      {"evolve", "Closed-system RK4 evolution"},
      {"master", "Lindblad evolution and stationary state"},
      {"sweep", "Parameter sweep (max <n> or stationary packets)"},
      {"wigner", "Wigner function of the state at t_final"},
      {"chain", "Cavity-dressed chain modes and WKB classification"},
      {"analyze", "Recompute spectrum and packets from a previous run"},
  };
  for (const auto& [name, help] : modes) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cp::RunConfig config;
    if (!config_path.empty()) config = cp::load_config(config_path);
    config.mode = cp::parse_mode(app.get_subcommands().front()->get_name());
    for (const std::string& o : overrides) cp::apply_override(config, o);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (threads <= 0) threads = cp::default_threads();

    const cp::RunResult result = cp::run(config, threads);
    std::cerr << result.summary << '\n';
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cp::exit_code_for(e);
  }
}
