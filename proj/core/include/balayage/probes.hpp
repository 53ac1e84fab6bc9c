#pragma once

// Deterministic off-set probe points for global potential comparisons.

#include <cstddef>
#include <vector>

#include "balayage/geometry.hpp"
#include "balayage/measure.hpp"

namespace balayage {

/// Radii of the probe shells as multiples of the set's circumradius.
inline constexpr double kProbeShellFactors[3] = {1.5, 2.0, 4.0};

/// Shells at 1.5x, 2x and 4x the circumradius around the node centroid (`per_shell` points
/// each), plus, for every point charge, the midpoint between the charge and its nearest node.
/// Points closer than 1e-9 to a charge are dropped.
std::vector<Point> probe_points(const DiscreteSet& set, const Source& omega, std::size_t per_shell = 48);

/// Quasi-uniform points on the unit sphere of R^n (n = 2 or 3).
std::vector<Point> sphere_directions(int dim, std::size_t count);

}  // namespace balayage
