#pragma once

// Positive discrete measures on panel sets and off-set point charges.

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "balayage/geometry.hpp"

namespace balayage {

class KernelMatrix;

struct DiscreteMeasure {
  std::shared_ptr<const DiscreteSet> set;
  std::vector<double> masses;

  DiscreteMeasure() = default;
  /// Throws ValidationError on size mismatch, negative or non-finite masses.
  DiscreteMeasure(std::shared_ptr<const DiscreteSet> s, std::vector<double> m);

  std::size_t size() const { return masses.size(); }
};

struct PointCharge {
  Point location;
  double mass = 1.0;
};

/// External source ω: a list of point charges or a measure carried by some panel set.
using Source = std::variant<std::vector<PointCharge>, DiscreteMeasure>;

void validate(const PointCharge& q);
void validate(const Source& src);
int dimension(const Source& src);
double source_mass(const Source& src);
Source scaled(const Source& src, double factor);

/// Uniform measure with total mass `mass` (masses proportional to cell measures).
DiscreteMeasure uniform_measure(std::shared_ptr<const DiscreteSet> set, double mass = 1.0);

double total_mass(const DiscreteMeasure& mu);
/// Energy-norm distance sqrt((w - v)^T K (w - v)). Both measures must live on K's set.
double norm_distance(const KernelMatrix& K, const DiscreteMeasure& mu, const DiscreteMeasure& nu);
double energy_norm(const KernelMatrix& K, const DiscreteMeasure& mu);
/// Masses kept on `indices`, zero elsewhere. Indices out of range throw.
DiscreteMeasure restrict_measure(const DiscreteMeasure& mu, std::span<const std::size_t> indices);
/// Zero-padded copy of a measure on a subset, placed in the index space of `outer`.
DiscreteMeasure embed_measure(const DiscreteMeasure& mu, std::shared_ptr<const DiscreteSet> outer,
                              std::span<const std::size_t> index_in_outer);

/// CSV: '# set_fingerprint=<hex>' header, then columns x0..x{n-1},mass.
std::string measure_csv(const DiscreteMeasure& mu);
/// Parse a CSV written by measure_csv onto `set`; the fingerprint must match when present.
DiscreteMeasure read_measure_csv(const std::string& text, std::shared_ptr<const DiscreteSet> set);

}  // namespace balayage
