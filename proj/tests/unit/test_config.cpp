#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "balayage/run.hpp"

using namespace balayage;
namespace fs = std::filesystem;

namespace {

const char* kSphere = R"({
  "schema": 1,
  "kernel": {"alpha": 2.0, "dim": 3},
  "geometry": {"shape": "sphere", "center": [0, 0, 0], "radius": 1.0},
  "resolution": 3,
  "source": {"charges": [{"location": [0, 0, 2], "mass": 1.0}]},
  "rng_seed": 4
})";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("balayage-unit-" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("config: valid document") {
  const auto cfg = parse_config_text(kSphere);
  CHECK(cfg.kernel.alpha == 2.0);
  CHECK(cfg.resolution == 3);
  CHECK(cfg.rng_seed == 4);
  REQUIRE(cfg.geometry.has_value());
  CHECK(std::holds_alternative<Sphere>(cfg.geometry->shape));
  CHECK(config_hash(cfg).size() == 16);
}

TEST_CASE("config: every violation is reported") {
  auto j = nlohmann::json::parse(kSphere);
  j["kernel"]["alpha"] = 3.0;
  j["resolution"] = 0;
  j["colour"] = "red";
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    CHECK(v.size() == 3);
    CHECK(v[0].rfind("kernel:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
}

TEST_CASE("config: output location is not part of the hash, overrides are") {
  auto a = parse_config_text(kSphere);
  auto b = a;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.tol = 1e-6;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("run: sweep writes a stamped report") {
  auto cfg = parse_config_text(kSphere);
  cfg.output_dir = scratch("sweep").string();
  const auto o = run(Command::sweep, cfg);
  CHECK(o.exit_code == kExitOk);
  const auto j = read_json(fs::path(cfg.output_dir) / "result.json");
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "sweep");
  CHECK(j["config_hash"] == config_hash(cfg));
  CHECK(j["rng_seed"] == 4);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "measure.csv"));
}

TEST_CASE("run: validation and verification exit codes") {
  auto cfg = parse_config_text(kSphere);
  cfg.output_dir = scratch("node").string();
  cfg.source.charges = {{{0, 0, 1}, 1.0}};
  const auto bad = run(Command::sweep, cfg);
  CHECK(bad.exit_code == kExitValidation);
  const auto err = read_json(fs::path(cfg.output_dir) / "error.json");
  CHECK(err["error"] == "validation");

  auto missing = parse_config_text(kSphere);
  missing.output_dir = scratch("missing").string();
  CHECK(run(Command::converge_up, missing).exit_code == kExitValidation);

  auto ok = parse_config_text(kSphere);
  ok.output_dir = scratch("verify").string();
  ok.resolution = 5;
  CHECK(run(Command::verify, ok).exit_code == kExitOk);
  CHECK(fs::exists(fs::path(ok.output_dir) / "checks.csv"));
  CHECK(fs::exists(fs::path(ok.output_dir) / "references.csv"));
}

TEST_CASE("run: command names round-trip") {
  for (const auto& n : command_names()) {
    const auto c = parse_command(n);
    REQUIRE(c.has_value());
    CHECK(command_name(*c) == n);
  }
  CHECK_FALSE(parse_command("nope").has_value());
}
