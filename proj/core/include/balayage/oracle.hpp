#pragma once

// Independent reference values: closed forms for the Newtonian ball and refinement extrapolation.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace balayage {

enum class OracleMethod : std::uint8_t { closed_form, brute_force, refinement_extrapolation };

struct ReferenceValue {
  std::string name;
  double value = 0.0;
  OracleMethod method = OracleMethod::closed_form;
  double uncertainty = 0.0;  ///< always > 0
};

std::string method_name(OracleMethod m);

/// Mass of the balayage of a unit charge at distance z_dist onto the sphere of radius r in R^n
/// (alpha = 2): (r / z_dist)^(n - 2).
ReferenceValue newtonian_ball_sweep_mass(double r, double z_dist, int n);

/// Density of the swept unit charge at z on the sphere |x - center| = r in R^3 (alpha = 2).
double newtonian_sweep_density(double r, std::span<const double> center, std::span<const double> z,
                               std::span<const double> x);
/// Equilibrium density of the sphere of radius r in R^3 for the kernel 1/|x - y|: 1 / (4 pi r).
double newtonian_equilibrium_density(double r);

/// First-order Richardson extrapolation in h = 1/resolution from the last two of at least
/// three (resolution, value) pairs; uncertainty is the last difference. A non-monotone input
/// returns the last value with uncertainty ten times the spread.
ReferenceValue refinement_extrapolate(std::span<const std::pair<double, double>> values, std::string name = {});

/// CSV rows name,value,method,uncertainty.
std::string reference_csv(std::span<const ReferenceValue> values);

}  // namespace balayage
