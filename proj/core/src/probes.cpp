#include "balayage/probes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "balayage/error.hpp"
#include "detail/vec.hpp"

namespace balayage {

std::vector<Point> sphere_directions(int dim, std::size_t count) {
  std::vector<Point> out;
  out.reserve(count);
  if (dim == 2) {
    // half-step offset keeps probes off the axes where segment targets usually live
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  if (dim != 3) throw ValidationError("probes: only dimensions 2 and 3 are supported");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(k);
    out.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

std::vector<Point> probe_points(const DiscreteSet& set, const Source& omega, std::size_t per_shell) {
  const int n = set.dim();
  const Point c = set.centroid();
  const double rad = std::max(set.circumradius(), 1e-3);
  const auto dirs = sphere_directions(n, per_shell);
  std::vector<Point> out;
  for (double f : kProbeShellFactors) {
    for (const auto& d : dirs) {
      Point p(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) p[a] = c[a] + f * rad * d[a];
      out.push_back(std::move(p));
    }
  }
  std::vector<Point> charges;
  if (const auto* q = std::get_if<std::vector<PointCharge>>(&omega)) {
    for (const auto& pc : *q) charges.push_back(pc.location);
  }
  for (const auto& z : charges) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double d2 = detail::distance2(z, set.node(i));
      if (d2 < best) {
        best = d2;
        arg = i;
      }
    }
    Point m(static_cast<std::size_t>(n));
    const auto nd = set.node(arg);
    for (int a = 0; a < n; ++a) m[a] = 0.5 * (z[a] + nd[a]);
    out.push_back(std::move(m));
  }
  std::vector<Point> kept;
  kept.reserve(out.size());
  for (auto& p : out) {
    bool near = false;
    for (const auto& z : charges) near = near || detail::distance(p, z) < 1e-9;
    if (!near) kept.push_back(std::move(p));
  }
  return kept;
}

}  // namespace balayage
