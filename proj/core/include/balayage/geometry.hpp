#pragma once

// Panel discretizations of compact subsets of R^n.
//
// A DiscreteSet is a list of panels. Each panel carries a node (the projected
// centroid), its cell measure (length, area or volume), its circumradius and a
// small sub-quadrature used for near-field kernel integrals. Panels of straight
// segments also record their endpoints so that collinear interactions can be
// integrated in closed form.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace balayage {

using Point = std::vector<double>;

struct SetSpec;

struct Sphere {
  Point center;
  double radius = 1.0;
};
struct Ball {
  Point center;
  double radius = 1.0;
};
struct Segment {
  Point a;
  Point b;
};
struct Annulus {
  Point center;
  double r_in = 0.5;
  double r_out = 1.0;
};
struct Box {
  Point lo;
  Point hi;
};
/// Closed half-space {x : (x - point) . normal >= 0}. Only valid as a restriction predicate.
struct HalfSpace {
  Point point;
  Point normal;
};
struct PointsFile {
  std::string path;
  int dim = 3;
};
struct Union {
  std::vector<SetSpec> parts;
};

struct SetSpec {
  std::variant<Sphere, Ball, Segment, Annulus, Box, HalfSpace, PointsFile, Union> shape;
};

/// Half-line origin + t * direction, t >= 0. Only reachable through exhaustion().
struct Ray {
  Point origin;
  Point direction;
};

int dimension(const SetSpec& spec);
/// Throws ValidationError listing the first violated invariant.
void validate(const SetSpec& spec);
bool is_bounded(const SetSpec& spec);
/// Membership test with absolute slack `eps`.
bool contains(const SetSpec& spec, std::span<const double> x, double eps = 1e-9);
std::string shape_name(const SetSpec& spec);

enum class PanelKind : std::uint8_t {
  segment,  ///< straight 1-D panel
  arc,      ///< curved 1-D panel (circle in R^2)
  surface,  ///< 2-D panel in R^3
  area,     ///< 2-D panel in R^2
  volume,   ///< 3-D panel in R^3
  point,    ///< panel read from a points file; only node, measure and radius are known
};

/// Intrinsic dimension of a panel kind; `point` panels report the ambient dimension.
int intrinsic_dim(PanelKind kind, int ambient_dim);

class DiscreteSet {
public:
  DiscreteSet(int dim, SetSpec spec, int resolution);

  int dim() const { return dim_; }
  std::size_t size() const { return measures_.size(); }
  bool empty() const { return measures_.empty(); }
  const SetSpec& spec() const { return spec_; }
  int resolution() const { return resolution_; }

  std::span<const double> node(std::size_t i) const {
    return {nodes_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double cell_measure(std::size_t i) const { return measures_[i]; }
  double cell_radius(std::size_t i) const { return radii_[i]; }
  PanelKind kind(std::size_t i) const { return kinds_[i]; }

  std::size_t sub_count(std::size_t i) const { return sub_offsets_[i + 1] - sub_offsets_[i]; }
  std::span<const double> sub_point(std::size_t i, std::size_t k) const {
    const std::size_t idx = sub_offsets_[i] + k;
    return {sub_points_.data() + idx * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double sub_weight(std::size_t i, std::size_t k) const { return sub_weights_[sub_offsets_[i] + k]; }

  /// Endpoints of a straight segment panel (empty spans for other kinds).
  std::span<const double> segment_start(std::size_t i) const;
  std::span<const double> segment_end(std::size_t i) const;
  /// Corners (3 * dim values) of a triangular surface panel; empty for other panels.
  std::span<const double> triangle(std::size_t i) const;

  const std::vector<double>& cell_measures() const { return measures_; }
  const std::vector<double>& cell_radii() const { return radii_; }
  std::vector<Point> nodes() const;
  double total_measure() const;

  /// Centroid of the nodes and the largest node distance from it.
  Point centroid() const;
  double circumradius() const;

  /// 64-bit FNV-1a digest of node coordinates and cell data; equal sets have equal fingerprints.
  std::uint64_t fingerprint() const;

  /// Panels `indices` (in the given order), spec replaced by `spec`.
  DiscreteSet subset(std::span<const std::size_t> indices, SetSpec spec) const;

  struct PanelData {
    std::vector<double> node;
    double measure = 0.0;
    double radius = 0.0;
    PanelKind kind = PanelKind::point;
    std::vector<double> sub_points;  ///< flattened, dim per point
    std::vector<double> sub_weights;
    std::vector<double> seg_a;
    std::vector<double> seg_b;
    std::vector<double> corners;  ///< 3 * dim for triangular panels
  };
  void add_panel(const PanelData& panel);
  void append(const DiscreteSet& other);

private:
  int dim_;
  SetSpec spec_;
  int resolution_;
  std::vector<double> nodes_;
  std::vector<double> measures_;
  std::vector<double> radii_;
  std::vector<PanelKind> kinds_;
  std::vector<std::size_t> sub_offsets_{0};
  std::vector<double> sub_points_;
  std::vector<double> sub_weights_;
  std::vector<double> seg_ends_;  ///< 2*dim per panel, NaN unless kind == segment
  std::vector<double> corners_;   ///< 3*dim per panel, NaN unless the panel is a triangle
  std::vector<bool> has_tri_;
};

/// Panelize `spec`. Resolution semantics per shape:
///  - segment, circle (sphere in R^2), annulus/ball in R^2, box: panels per unit length;
///  - sphere in R^3: geodesic frequency per unit radius (20 * nu^2 triangles, nu = round(res * radius));
///  - ball/annulus in R^3: radial layers per unit length, each layer a geodesic shell;
///  - points file: ignored.
/// Supported ambient dimensions are 2 and 3.
DiscreteSet discretize(const SetSpec& spec, int resolution);

/// Nested truncations spec ∩ B(0, R) for each radius; node sets are nested.
std::vector<DiscreteSet> exhaustion(const Ray& ray, std::span<const double> radii, int resolution);
std::vector<DiscreteSet> exhaustion(const SetSpec& spec, std::span<const double> radii, int resolution);

/// Keep the panels of `set` whose nodes lie in `sub`.
DiscreteSet restrict(const DiscreteSet& set, const SetSpec& sub);
/// Indices of the panels of `set` whose nodes lie in `sub`.
std::vector<std::size_t> restrict_indices(const DiscreteSet& set, const SetSpec& sub);

/// Index of each node of `inner` inside `outer`; nullopt if some node is missing.
std::optional<std::vector<std::size_t>> embed_indices(const DiscreteSet& inner, const DiscreteSet& outer);

/// Points file: one panel per line, `n` coordinates then cell measure then cell radius; '#' comments.
DiscreteSet read_points_file(const std::string& path, int dim);

}  // namespace balayage
