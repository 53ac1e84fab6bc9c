#pragma once

// Inner balayage: the swept measure as the minimizer of the Gauss functional over the
// nonnegative cone, and executable checks of its characterizations.

#include <cstdint>
#include <span>
#include <vector>

#include "balayage/measure.hpp"
#include "balayage/qp.hpp"
#include "balayage/report.hpp"
#include "balayage/workspace.hpp"

namespace balayage {

struct BalayageResult {
  DiscreteMeasure swept;
  double source_mass = 0.0;
  double swept_mass = 0.0;
  double energy_swept = 0.0;          ///< I(omega^A) = w^T K w
  double mutual_energy_source = 0.0;  ///< I(omega^A, omega) = b^T w
  /// Max over nodes of the potential mismatch (on the support) or deficit (elsewhere), relative to max |b|.
  double potential_match_residual = 0.0;
  /// Max over off-set probes of (U^{omega^A} - U^omega)_+ / U^omega.
  double domination_residual = 0.0;
  double gauss_value = 0.0;  ///< cone QP objective
  std::vector<double> b;     ///< panel-averaged U^omega
  std::vector<Point> probes;
  QPSolution qp;
};

/// Nodes whose mass exceeds this fraction of the largest mass count as support.
inline constexpr double kSupportThreshold = 1e-6;

BalayageResult sweep(const Source& omega, const Workspace& ws, const QPOptions& opt = {});
BalayageResult sweep(const Source& omega, std::shared_ptr<const DiscreteSet> target, const KernelSpec& spec,
                     const QPOptions& opt = {});

/// Potential match / deficit on nodes, relative to max(1, max |b|).
double potential_match(std::span<const double> kw, std::span<const double> b, std::span<const double> w);

/// Potential match on the set, symmetry I(omega^A, sigma) = I(omega, sigma^A), Gauss minimality,
/// minimum potential and energy, domination, energy identity and mass bound. Random test measures
/// are drawn from `rng_seed`.
Report verify_characterizations(const BalayageResult& result, const Workspace& ws, const Source& omega,
                                std::uint64_t rng_seed, const QPOptions& opt = {});

struct RestReport {
  DiscreteMeasure direct;    ///< omega^{A'}
  DiscreteMeasure two_step;  ///< (omega^A)^{A'}
  double relative_distance = 0.0;
  /// Max over probes of (U^{omega^{A'}} - U^{omega^A})_+ relative to U^{omega^A}.
  double potential_excess = 0.0;
  double mass_direct = 0.0;
  double mass_two_step = 0.0;
  double mass_outer = 0.0;  ///< omega^A(X)
  Report report;
};

/// `inner` must be a subset of `outer`'s panels (for example restrict(outer, ...)).
RestReport sweep_with_rest(const Source& omega, const Workspace& outer, const Workspace& inner,
                           const QPOptions& opt = {});

/// omega^A(X) <= nu(X) for `count` membership-verified members nu of Gamma_{A,omega}.
/// Uniqueness of the minimum-mass measure is not asserted.
Report minimum_mass_check(const BalayageResult& result, const Workspace& ws, std::uint64_t rng_seed,
                          std::size_t count = 10, const QPOptions& opt = {});

/// Members of {nu >= 0 on the panels : K nu >= b + level - slack}: randomly reweighted copies of
/// `base` lifted by a multiple of the uniform measure until membership holds.
std::vector<std::vector<double>> sample_dominating_class(const Workspace& ws, std::span<const double> base,
                                                         std::span<const double> b, double level,
                                                         std::uint64_t rng_seed, std::size_t count);

}  // namespace balayage
