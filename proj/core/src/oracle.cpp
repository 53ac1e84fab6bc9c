#include "balayage/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "balayage/error.hpp"
#include "detail/vec.hpp"

namespace balayage {

std::string method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::closed_form: return "closed_form";
    case OracleMethod::brute_force: return "brute_force";
    case OracleMethod::refinement_extrapolation: return "refinement_extrapolation";
  }
  return "unknown";
}

ReferenceValue newtonian_ball_sweep_mass(double r, double z_dist, int n) {
  if (n < 3) throw ValidationError("newtonian_ball_sweep_mass: needs n >= 3");
  if (!(r > 0.0)) throw ValidationError("newtonian_ball_sweep_mass: radius must be positive");
  if (!(z_dist > r)) throw ValidationError("newtonian_ball_sweep_mass: the charge must lie outside the ball");
  ReferenceValue v;
  v.name = "newtonian_ball_sweep_mass";
  v.value = std::pow(r / z_dist, n - 2);
  v.method = OracleMethod::closed_form;
  v.uncertainty = 4.0 * std::numeric_limits<double>::epsilon() * std::max(v.value, 1e-300);
  return v;
}

double newtonian_sweep_density(double r, std::span<const double> center, std::span<const double> z,
                               std::span<const double> x) {
  const double zc2 = detail::distance2(z, center);
  const double d = detail::distance(x, z);
  return (zc2 - r * r) / (4.0 * std::numbers::pi * r * d * d * d);
}

double newtonian_equilibrium_density(double r) { return 1.0 / (4.0 * std::numbers::pi * r); }

ReferenceValue refinement_extrapolate(std::span<const std::pair<double, double>> values, std::string name) {
  if (values.size() < 3) throw ValidationError("refinement_extrapolate: needs at least three resolutions");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k].first > values[k - 1].first)) {
      throw ValidationError("refinement_extrapolate: resolutions must increase");
    }
  }
  ReferenceValue v;
  v.name = name.empty() ? "refinement_extrapolation" : std::move(name);
  v.method = OracleMethod::refinement_extrapolation;
  double lo = values.front().second;
  double hi = lo;
  for (const auto& p : values) {
    lo = std::min(lo, p.second);
    hi = std::max(hi, p.second);
  }
  const double floor = std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(values.back().second));
  bool up = true;
  bool down = true;
  for (std::size_t k = 1; k < values.size(); ++k) {
    up = up && values[k].second >= values[k - 1].second;
    down = down && values[k].second <= values[k - 1].second;
  }
  if (!up && !down) {
    v.value = values.back().second;
    v.uncertainty = std::max(10.0 * (hi - lo), floor);
    return v;
  }
  const auto& [r1, v1] = values[values.size() - 2];
  const auto& [r2, v2] = values.back();
  // v(h) = v0 + C h with h = 1 / resolution
  v.value = (r2 * v2 - r1 * v1) / (r2 - r1);
  v.uncertainty = std::max(std::abs(v2 - v1), floor);
  if (hi == lo) v.uncertainty = floor;
  return v;
}

std::string reference_csv(std::span<const ReferenceValue> values) {
  std::ostringstream os;
  os << "name,value,method,uncertainty\n";
  char buf[64];
  for (const auto& v : values) {
    os << v.name << ",";
    std::snprintf(buf, sizeof buf, "%.17g", v.value);
    os << buf << "," << method_name(v.method) << ",";
    std::snprintf(buf, sizeof buf, "%.17g", v.uncertainty);
    os << buf << "\n";
  }
  return os.str();
}

}  // namespace balayage
