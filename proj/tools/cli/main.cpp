// balayage-cli <command> --config file.json [--out dir] [--seed n] [--tol t] [--quiet]

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "balayage/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw balayage::ValidationError("cannot read config '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete balayage, equilibrium and Gauss-problem solver"};
  app.set_version_flag("--version", balayage::version());

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool quiet = false;

  app.add_option("command", command, "one of: discretize, sweep, equilibrium, gauss, converge-up, converge-down, verify")
      ->required()
      ->check(CLI::IsMember(balayage::command_names()));
  app.add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "overrides rng_seed");
  auto* tol_opt = app.add_option("--tol", tol, "overrides solver.tol")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : balayage::kExitValidation;
  }

  balayage::RunConfig cfg;
  try {
    cfg = balayage::parse_config_text(read_file(config_path));
  } catch (const balayage::ConfigError& e) {
    std::cerr << balayage::error_json("validation", e.violations()).dump(2) << "\n";
    return balayage::kExitValidation;
  } catch (const balayage::ValidationError& e) {
    std::cerr << balayage::error_json("validation", {e.what()}).dump(2) << "\n";
    return balayage::kExitValidation;
  }
  if (*out_opt) cfg.output_dir = out_dir;
  if (*seed_opt) cfg.rng_seed = seed;
  if (*tol_opt) cfg.tol = tol;

  const auto outcome = balayage::run(*balayage::parse_command(command), cfg);
  if (outcome.exit_code == balayage::kExitValidation || outcome.exit_code == balayage::kExitSolver) {
    std::cerr << outcome.summary << ": " << outcome.error << "\n";
  } else if (!quiet) {
    std::cout << outcome.summary << "\n";
    for (const auto& f : outcome.files) std::cout << "  " << cfg.output_dir << "/" << f << "\n";
  }
  return outcome.exit_code;
}
