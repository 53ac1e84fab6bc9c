#pragma once

// Stage-by-stage sweeps along nested exhaustions (increasing) and decreasing sequences.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "balayage/measure.hpp"
#include "balayage/qp.hpp"

namespace balayage {

inline constexpr std::size_t kBumpCount = 5;

/// Smooth radial bump: 1 on |x - center| <= radius / 2, 0 beyond radius, C-infinity in between.
struct Bump {
  Point center;
  double radius = 1.0;
  double operator()(std::span<const double> x) const;
};

/// Five bumps centred at the first stage's node centroid with radii 2^k times twice its circumradius.
std::array<Bump, kBumpCount> vague_bumps(const DiscreteSet& first_stage);
double integrate(const Bump& f, const DiscreteMeasure& mu);

struct ConvergenceReport {
  std::string kind;  ///< "increasing" or "decreasing"
  std::vector<std::string> stage_labels;
  std::vector<std::size_t> panels;
  std::vector<double> masses;
  std::vector<double> energies;
  std::vector<double> gauss_values;
  std::vector<double> constants_c;  ///< NaN when the stage was not solved as a Gauss problem
  /// ||mu_j - mu_{j+1}|| in the finest stage's matrix; size stages - 1.
  std::vector<double> distances;
  /// Max over probes of the wrong-direction potential change from the previous stage,
  /// relative to max(1, max |U|); the first entry is 0.
  std::vector<double> potential_violations;
  std::vector<std::array<double, kBumpCount>> vague;
  std::vector<Point> probes;
  /// Integral of the largest bump against the final stage's measure.
  double vague_mass_estimate = 0.0;
  /// Relative energy distance of the final stage to a direct sweep of the limit geometry.
  std::optional<double> limit_distance;
  /// Same distance from the energy gap sqrt(I(final) - I(direct)), exact when the limit is a subset
  /// of the final stage; it avoids cross entries between nearly coincident panels.
  std::optional<double> limit_energy_gap;
  std::vector<DiscreteMeasure> measures;
  std::string note;

  bool energies_monotone(double slack) const;
  bool distances_strictly_decreasing() const;
  double max_potential_violation() const;
};

using StageList = std::vector<std::shared_ptr<const DiscreteSet>>;

/// Throws ValidationError unless every stage's nodes embed in the next (increasing) or the
/// previous (decreasing) stage.
void check_nested(const StageList& stages, bool increasing);

ConvergenceReport sweep_exhaustion(const Source& omega, const StageList& stages, const KernelSpec& spec,
                                   const QPOptions& opt = {});
/// `limit`, when given, is swept directly and compared with the final stage.
ConvergenceReport sweep_decreasing(const Source& omega, const StageList& stages, const KernelSpec& spec,
                                   const QPOptions& opt = {}, std::shared_ptr<const DiscreteSet> limit = nullptr);
/// Gauss problems along increasing stages; masses/energies refer to lambda_{K_j,f}.
ConvergenceReport gauss_exhaustion(const Source& omega, const StageList& stages, const KernelSpec& spec,
                                   const QPOptions& opt = {});

/// Columns: stage,label,panels,mass,energy,gauss_value,c,distance_to_next,potential_violation.
std::string tidy_csv(const ConvergenceReport& r);

}  // namespace balayage
