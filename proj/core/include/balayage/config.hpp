#pragma once

// Run configuration for the batch front-end: parsed from JSON, validated as a whole.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "balayage/error.hpp"
#include "balayage/geometry.hpp"
#include "balayage/kernel.hpp"
#include "balayage/measure.hpp"

namespace balayage {

/// Rejected configuration; `violations` lists every offending field as "path: reason".
class ConfigError : public ValidationError {
public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

struct SourceConfig {
  std::vector<PointCharge> charges;
  /// Measure CSV carried by `measure_geometry` at `measure_resolution`; used instead of charges.
  std::optional<std::string> measure_file;
  std::optional<SetSpec> measure_geometry;
  int measure_resolution = 1;
};

/// Increasing exhaustion: truncations of a ray or of `geometry` at `radii`, or explicit nested
/// restrictions `stages` of `geometry` (one window per stage).
struct ExhaustionConfig {
  std::optional<Ray> ray;
  std::vector<double> radii;
  std::vector<SetSpec> stages;
  int resolution = 0;  ///< 0: use the top-level resolution
};

/// Decreasing sequence: restrictions of `geometry` (largest first) and the limit geometry.
struct DecreasingConfig {
  std::vector<SetSpec> stages;
  std::optional<SetSpec> limit;
};

struct RunConfig {
  KernelSpec kernel;
  std::optional<SetSpec> geometry;
  int resolution = 1;
  SourceConfig source;
  double tol = 1e-8;
  std::size_t max_iter = 200000;
  std::uint64_t rng_seed = 1;
  /// verify: A' for the balayage-with-a-rest check.
  std::optional<SetSpec> subset;
  std::optional<ExhaustionConfig> exhaustion;
  std::optional<DecreasingConfig> decreasing;
  /// converge-up: also solve the Gauss problem on every stage.
  bool gauss_stages = true;
  /// converge-up: report the lambda mass beyond this radius per stage.
  std::optional<double> shell_radius;
  std::string output_dir = "out";
  /// The input document, kept for hashing and echoing into reports.
  std::string canonical;
};

SetSpec set_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SetSpec& spec);

/// Parses and validates; throws ConfigError with every violation found.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);

/// FNV-1a digest (16 hex digits) of the canonical configuration after overrides.
std::string config_hash(const RunConfig& cfg);
/// Canonical JSON of the effective configuration (overrides applied).
nlohmann::json effective_config(const RunConfig& cfg);

}  // namespace balayage
