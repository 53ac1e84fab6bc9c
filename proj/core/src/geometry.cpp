#include "balayage/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "balayage/error.hpp"
#include "detail/fnv.hpp"
#include "detail/vec.hpp"

namespace balayage {

namespace {

using detail::Vec3;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Sub-quadrature orders. Triangles are split q*q times, polar and box cells q per axis.
constexpr int kTriangleSub = 6;
constexpr int kShellAngularSub = 3;
constexpr int kShellRadialSub = 2;
constexpr int kPolarSub = 3;
constexpr int kSegmentSub = 8;
constexpr int kBoxSub2 = 4;
constexpr int kBoxSub3 = 3;

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

void require_dim(const Point& p, int dim, const char* what) {
  if (static_cast<int>(p.size()) != dim) {
    fail(std::string("set spec: ") + what + " has dimension " + std::to_string(p.size()) + ", expected " +
         std::to_string(dim));
  }
}

void require_finite(const Point& p, const char* what) {
  for (double v : p) {
    if (!std::isfinite(v)) fail(std::string("set spec: ") + what + " has a non-finite coordinate");
  }
}

// ---------------------------------------------------------------------------
// Icosahedral geodesic triangles on the unit sphere.

struct UnitTriangle {
  Vec3 a, b, c;
};

const std::array<Vec3, 12>& icosahedron_vertices() {
  static const std::array<Vec3, 12> verts = [] {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::array<Vec3, 12> v{{{-1, t, 0},
                            {1, t, 0},
                            {-1, -t, 0},
                            {1, -t, 0},
                            {0, -1, t},
                            {0, 1, t},
                            {0, -1, -t},
                            {0, 1, -t},
                            {t, 0, -1},
                            {t, 0, 1},
                            {-t, 0, -1},
                            {-t, 0, 1}}};
    for (auto& p : v) p = detail::normalized(p);
    return v;
  }();
  return verts;
}

constexpr std::array<std::array<int, 3>, 20> kIcosahedronFaces{{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10},
                                                                 {0, 10, 11}, {1, 5, 9},  {5, 11, 4},  {11, 10, 2},
                                                                 {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
                                                                 {3, 2, 6},   {3, 6, 8},  {3, 8, 9},   {4, 9, 5},
                                                                 {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}}};

// Split the flat triangle (a, b, c) into freq^2 sub-triangles and project to the unit sphere.
template <class Fn>
void for_each_subtriangle(const Vec3& a, const Vec3& b, const Vec3& c, int freq, Fn&& fn) {
  auto grid = [&](int i, int j) {
    const double u = static_cast<double>(i) / freq;
    const double v = static_cast<double>(j) / freq;
    return detail::normalized(a + (b - a) * u + (c - a) * v);
  };
  for (int i = 0; i < freq; ++i) {
    for (int j = 0; j < freq - i; ++j) {
      fn(UnitTriangle{grid(i, j), grid(i + 1, j), grid(i, j + 1)});
      if (i + j < freq - 1) fn(UnitTriangle{grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)});
    }
  }
}

std::vector<UnitTriangle> geodesic_triangles(int freq) {
  std::vector<UnitTriangle> out;
  out.reserve(20 * static_cast<std::size_t>(freq) * freq);
  const auto& v = icosahedron_vertices();
  for (const auto& f : kIcosahedronFaces) {
    for_each_subtriangle(v[f[0]], v[f[1]], v[f[2]], freq, [&](const UnitTriangle& t) { out.push_back(t); });
  }
  return out;
}

double spherical_area(const UnitTriangle& t) {
  const double num = std::abs(detail::dot(t.a, detail::cross(t.b, t.c)));
  const double den = 1.0 + detail::dot(t.a, t.b) + detail::dot(t.b, t.c) + detail::dot(t.c, t.a);
  return 2.0 * std::atan2(num, den);
}

Vec3 unit_centroid(const UnitTriangle& t) { return detail::normalized(t.a + t.b + t.c); }

Vec3 to_vec3(const Point& p) { return {p[0], p[1], p[2]}; }

void push3(std::vector<double>& out, const Vec3& v) {
  out.push_back(v.x);
  out.push_back(v.y);
  out.push_back(v.z);
}

// ---------------------------------------------------------------------------
// Shape panelizers.

DiscreteSet segment_set(const Segment& s, int res, const SetSpec& spec) {
  const int dim = static_cast<int>(s.a.size());
  const double len = detail::distance(s.a, s.b);
  const int count = std::max(1, static_cast<int>(std::lround(res * len)));
  DiscreteSet out(dim, spec, res);
  auto at = [&](double t) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) p[d] = s.a[d] + (s.b[d] - s.a[d]) * t;
    return p;
  };
  const double h = len / count;
  for (int k = 0; k < count; ++k) {
    DiscreteSet::PanelData pd;
    pd.node = at((k + 0.5) / count);
    pd.measure = h;
    pd.radius = h / 2.0;
    pd.kind = PanelKind::segment;
    pd.seg_a = at(static_cast<double>(k) / count);
    pd.seg_b = at(static_cast<double>(k + 1) / count);
    for (int q = 0; q < kSegmentSub; ++q) {
      const Point p = at((k + (q + 0.5) / kSegmentSub) / count);
      pd.sub_points.insert(pd.sub_points.end(), p.begin(), p.end());
      pd.sub_weights.push_back(h / kSegmentSub);
    }
    out.add_panel(pd);
  }
  return out;
}

DiscreteSet circle_set(const Sphere& s, int res, const SetSpec& spec) {
  const double r = s.radius;
  const int count = std::max(8, static_cast<int>(std::lround(res * 2.0 * std::numbers::pi * r)));
  const double dtheta = 2.0 * std::numbers::pi / count;
  DiscreteSet out(2, spec, res);
  auto at = [&](double theta) { return Point{s.center[0] + r * std::cos(theta), s.center[1] + r * std::sin(theta)}; };
  for (int k = 0; k < count; ++k) {
    DiscreteSet::PanelData pd;
    pd.node = at((k + 0.5) * dtheta);
    pd.measure = r * dtheta;
    pd.radius = 2.0 * r * std::sin(dtheta / 4.0);
    pd.kind = PanelKind::arc;
    for (int q = 0; q < kSegmentSub; ++q) {
      const Point p = at((k + (q + 0.5) / kSegmentSub) * dtheta);
      pd.sub_points.insert(pd.sub_points.end(), p.begin(), p.end());
      pd.sub_weights.push_back(r * dtheta / kSegmentSub);
    }
    out.add_panel(pd);
  }
  return out;
}

DiscreteSet sphere3_set(const Sphere& s, int res, const SetSpec& spec) {
  const int freq = std::max(1, static_cast<int>(std::lround(res * s.radius)));
  const Vec3 c = to_vec3(s.center);
  const double r = s.radius;
  DiscreteSet out(3, spec, res);
  for (const auto& tri : geodesic_triangles(freq)) {
    DiscreteSet::PanelData pd;
    const Vec3 node = c + unit_centroid(tri) * r;
    pd.node = {node.x, node.y, node.z};
    pd.kind = PanelKind::surface;
    double total = 0.0;
    for_each_subtriangle(tri.a, tri.b, tri.c, kTriangleSub, [&](const UnitTriangle& sub) {
      const double w = spherical_area(sub) * r * r;
      push3(pd.sub_points, c + unit_centroid(sub) * r);
      pd.sub_weights.push_back(w);
      total += w;
    });
    pd.measure = total;
    pd.radius = std::max({detail::norm(c + tri.a * r - node), detail::norm(c + tri.b * r - node),
                          detail::norm(c + tri.c * r - node)});
    for (const Vec3& u : {tri.a, tri.b, tri.c}) push3(pd.corners, c + u * r);
    out.add_panel(pd);
  }
  return out;
}

// Radially layered shell in R^3 between r_in and r_out (r_in may be zero).
DiscreteSet shell3_set(const Point& center, double r_in, double r_out, int res, const SetSpec& spec) {
  const int layers = std::max(1, static_cast<int>(std::lround(res * (r_out - r_in))));
  const double dr = (r_out - r_in) / layers;
  const Vec3 c = to_vec3(center);
  DiscreteSet out(3, spec, res);
  auto radial_centroid = [](double a, double b) {
    return 0.75 * (std::pow(b, 4) - std::pow(a, 4)) / (b * b * b - a * a * a);
  };
  for (int k = 0; k < layers; ++k) {
    const double ra = r_in + k * dr;
    const double rb = (k + 1 == layers) ? r_out : r_in + (k + 1) * dr;
    const int freq = std::max(1, static_cast<int>(std::lround(res * 0.5 * (ra + rb))));
    const double rho = radial_centroid(ra, rb);
    for (const auto& tri : geodesic_triangles(freq)) {
      DiscreteSet::PanelData pd;
      const Vec3 node = c + unit_centroid(tri) * rho;
      pd.node = {node.x, node.y, node.z};
      pd.kind = PanelKind::volume;
      double total = 0.0;
      for_each_subtriangle(tri.a, tri.b, tri.c, kShellAngularSub, [&](const UnitTriangle& sub) {
        const double area = spherical_area(sub);
        const Vec3 dir = unit_centroid(sub);
        for (int q = 0; q < kShellRadialSub; ++q) {
          const double sa = ra + (rb - ra) * q / kShellRadialSub;
          const double sb = ra + (rb - ra) * (q + 1) / kShellRadialSub;
          const double w = area * (sb * sb * sb - sa * sa * sa) / 3.0;
          push3(pd.sub_points, c + dir * radial_centroid(sa, sb));
          pd.sub_weights.push_back(w);
          total += w;
        }
      });
      pd.measure = total;
      double rad = 0.0;
      for (const Vec3& u : {tri.a, tri.b, tri.c}) {
        rad = std::max({rad, detail::norm(c + u * ra - node), detail::norm(c + u * rb - node)});
      }
      pd.radius = rad;
      out.add_panel(pd);
    }
  }
  return out;
}

// Polar layers in R^2 between r_in and r_out.
DiscreteSet ring2_set(const Point& center, double r_in, double r_out, int res, const SetSpec& spec) {
  const int layers = std::max(1, static_cast<int>(std::lround(res * (r_out - r_in))));
  const double dr = (r_out - r_in) / layers;
  DiscreteSet out(2, spec, res);
  auto radial_centroid = [](double a, double b) { return (2.0 / 3.0) * (b * b * b - a * a * a) / (b * b - a * a); };
  auto polar = [&](double rho, double theta) {
    return Point{center[0] + rho * std::cos(theta), center[1] + rho * std::sin(theta)};
  };
  for (int k = 0; k < layers; ++k) {
    const double ra = r_in + k * dr;
    const double rb = (k + 1 == layers) ? r_out : r_in + (k + 1) * dr;
    const int sectors = std::max(3, static_cast<int>(std::lround(2.0 * std::numbers::pi * 0.5 * (ra + rb) * res)));
    const double dth = 2.0 * std::numbers::pi / sectors;
    for (int j = 0; j < sectors; ++j) {
      DiscreteSet::PanelData pd;
      pd.node = polar(radial_centroid(ra, rb), (j + 0.5) * dth);
      pd.kind = PanelKind::area;
      double total = 0.0;
      for (int qr = 0; qr < kPolarSub; ++qr) {
        const double sa = ra + (rb - ra) * qr / kPolarSub;
        const double sb = ra + (rb - ra) * (qr + 1) / kPolarSub;
        for (int qt = 0; qt < kPolarSub; ++qt) {
          const double w = 0.5 * (dth / kPolarSub) * (sb * sb - sa * sa);
          const Point p = polar(radial_centroid(sa, sb), (j + (qt + 0.5) / kPolarSub) * dth);
          pd.sub_points.insert(pd.sub_points.end(), p.begin(), p.end());
          pd.sub_weights.push_back(w);
          total += w;
        }
      }
      pd.measure = total;
      double rad = 0.0;
      for (double rr : {ra, rb}) {
        for (double th : {j * dth, (j + 1) * dth}) rad = std::max(rad, detail::distance(pd.node, polar(rr, th)));
      }
      pd.radius = rad;
      out.add_panel(pd);
    }
  }
  return out;
}

DiscreteSet box_set(const Box& b, int res, const SetSpec& spec) {
  const int dim = static_cast<int>(b.lo.size());
  std::vector<int> counts(dim);
  std::vector<double> h(dim);
  std::size_t total_cells = 1;
  for (int d = 0; d < dim; ++d) {
    const double len = b.hi[d] - b.lo[d];
    counts[d] = std::max(1, static_cast<int>(std::lround(res * len)));
    h[d] = len / counts[d];
    total_cells *= static_cast<std::size_t>(counts[d]);
  }
  const int q = dim == 2 ? kBoxSub2 : kBoxSub3;
  std::size_t sub_total = 1;
  for (int d = 0; d < dim; ++d) sub_total *= static_cast<std::size_t>(q);
  double cell_measure = 1.0;
  double diag2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    cell_measure *= h[d];
    diag2 += h[d] * h[d];
  }
  DiscreteSet out(dim, spec, res);
  std::vector<int> idx(dim, 0);
  for (std::size_t cell = 0; cell < total_cells; ++cell) {
    std::size_t rem = cell;
    for (int d = dim - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rem % static_cast<std::size_t>(counts[d]));
      rem /= static_cast<std::size_t>(counts[d]);
    }
    DiscreteSet::PanelData pd;
    pd.node.resize(dim);
    for (int d = 0; d < dim; ++d) pd.node[d] = b.lo[d] + (idx[d] + 0.5) * h[d];
    pd.measure = cell_measure;
    pd.radius = 0.5 * std::sqrt(diag2);
    pd.kind = dim == 2 ? PanelKind::area : PanelKind::volume;
    for (std::size_t s = 0; s < sub_total; ++s) {
      std::size_t r = s;
      for (int d = dim - 1; d >= 0; --d) {
        const int k = static_cast<int>(r % static_cast<std::size_t>(q));
        r /= static_cast<std::size_t>(q);
        // filled back to front; reorder below
        pd.sub_points.push_back(b.lo[d] + (idx[d] + (k + 0.5) / q) * h[d]);
      }
      std::reverse(pd.sub_points.end() - dim, pd.sub_points.end());
      pd.sub_weights.push_back(cell_measure / static_cast<double>(sub_total));
    }
    out.add_panel(pd);
  }
  return out;
}

void check_distinct_nodes(const DiscreteSet& set) {
  std::vector<std::size_t> order(set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto less = [&](std::size_t i, std::size_t j) {
    const auto a = set.node(i);
    const auto b = set.node(j);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto a = set.node(order[k - 1]);
    const auto b = set.node(order[k]);
    if (std::equal(a.begin(), a.end(), b.begin())) fail("discretize: two panels share the same node");
  }
}

double point_segment_distance(std::span<const double> x, const Point& a, const Point& b) {
  double ab2 = 0.0;
  double t = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double ab = b[d] - a[d];
    ab2 += ab * ab;
    t += (x[d] - a[d]) * ab;
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double p = a[d] + t * (b[d] - a[d]) - x[d];
    d2 += p * p;
  }
  return std::sqrt(d2);
}

}  // namespace

// ---------------------------------------------------------------------------

int intrinsic_dim(PanelKind kind, int ambient_dim) {
  switch (kind) {
    case PanelKind::segment:
    case PanelKind::arc:
      return 1;
    case PanelKind::surface:
    case PanelKind::area:
      return 2;
    case PanelKind::volume:
      return 3;
    case PanelKind::point:
      return ambient_dim;
  }
  return ambient_dim;
}

int dimension(const SetSpec& spec) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Ball> || std::is_same_v<T, Annulus>) {
          return static_cast<int>(s.center.size());
        } else if constexpr (std::is_same_v<T, Segment>) {
          return static_cast<int>(s.a.size());
        } else if constexpr (std::is_same_v<T, Box>) {
          return static_cast<int>(s.lo.size());
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return static_cast<int>(s.point.size());
        } else if constexpr (std::is_same_v<T, PointsFile>) {
          return s.dim;
        } else {
          return s.parts.empty() ? 0 : dimension(s.parts.front());
        }
      },
      spec.shape);
}

std::string shape_name(const SetSpec& spec) {
  static constexpr std::array<const char*, 8> names{"sphere", "ball",      "segment",     "annulus",
                                                    "box",    "halfspace", "points_file", "union"};
  return names[spec.shape.index()];
}

void validate(const SetSpec& spec) {
  const int dim = dimension(spec);
  if (dim < 2) fail("set spec: dimension must be at least 2, got " + std::to_string(dim));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Ball>) {
          require_finite(s.center, "center");
          if (!(s.radius > 0.0) || !std::isfinite(s.radius)) fail("set spec: radius must be positive and finite");
        } else if constexpr (std::is_same_v<T, Segment>) {
          require_dim(s.b, dim, "segment end b");
          require_finite(s.a, "segment end a");
          require_finite(s.b, "segment end b");
          if (s.a == s.b) fail("set spec: segment endpoints coincide");
        } else if constexpr (std::is_same_v<T, Annulus>) {
          require_finite(s.center, "center");
          if (!(s.r_in >= 0.0) || !(s.r_in < s.r_out) || !std::isfinite(s.r_out)) {
            fail("set spec: annulus requires 0 <= r_in < r_out");
          }
        } else if constexpr (std::is_same_v<T, Box>) {
          require_dim(s.hi, dim, "box corner_hi");
          require_finite(s.lo, "box corner_lo");
          require_finite(s.hi, "box corner_hi");
          for (int d = 0; d < dim; ++d) {
            if (!(s.lo[d] < s.hi[d])) fail("set spec: box requires corner_lo < corner_hi componentwise");
          }
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          require_dim(s.normal, dim, "halfspace normal");
          if (detail::norm(s.normal) == 0.0) fail("set spec: halfspace normal is zero");
        } else if constexpr (std::is_same_v<T, PointsFile>) {
          if (s.path.empty()) fail("set spec: points_file path is empty");
        } else {
          if (s.parts.empty()) fail("set spec: union has no parts");
          for (const auto& part : s.parts) {
            validate(part);
            if (dimension(part) != dim) fail("set spec: union parts have different dimensions");
          }
        }
      },
      spec.shape);
}

bool is_bounded(const SetSpec& spec) {
  if (std::holds_alternative<HalfSpace>(spec.shape)) return false;
  if (const auto* u = std::get_if<Union>(&spec.shape)) {
    return std::all_of(u->parts.begin(), u->parts.end(), [](const SetSpec& p) { return is_bounded(p); });
  }
  return true;
}

bool contains(const SetSpec& spec, std::span<const double> x, double eps) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return std::abs(detail::distance(x, s.center) - s.radius) <= eps;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return detail::distance(x, s.center) <= s.radius + eps;
        } else if constexpr (std::is_same_v<T, Segment>) {
          return point_segment_distance(x, s.a, s.b) <= eps;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          const double r = detail::distance(x, s.center);
          return r >= s.r_in - eps && r <= s.r_out + eps;
        } else if constexpr (std::is_same_v<T, Box>) {
          for (std::size_t d = 0; d < x.size(); ++d) {
            if (x[d] < s.lo[d] - eps || x[d] > s.hi[d] + eps) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          double v = 0.0;
          for (std::size_t d = 0; d < x.size(); ++d) v += (x[d] - s.point[d]) * s.normal[d];
          return v >= -eps;
        } else if constexpr (std::is_same_v<T, PointsFile>) {
          const DiscreteSet pts = read_points_file(s.path, s.dim);
          for (std::size_t i = 0; i < pts.size(); ++i) {
            if (detail::distance(x, pts.node(i)) <= eps) return true;
          }
          return false;
        } else {
          return std::any_of(s.parts.begin(), s.parts.end(), [&](const SetSpec& p) { return contains(p, x, eps); });
        }
      },
      spec.shape);
}

// ---------------------------------------------------------------------------

DiscreteSet::DiscreteSet(int dim, SetSpec spec, int resolution)
    : dim_(dim), spec_(std::move(spec)), resolution_(resolution) {}

std::span<const double> DiscreteSet::segment_start(std::size_t i) const {
  if (kinds_[i] != PanelKind::segment) return {};
  return {seg_ends_.data() + i * 2 * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
}

std::span<const double> DiscreteSet::triangle(std::size_t i) const {
  if (!has_tri_[i]) return {};
  return {corners_.data() + i * 3 * static_cast<std::size_t>(dim_), 3 * static_cast<std::size_t>(dim_)};
}

std::span<const double> DiscreteSet::segment_end(std::size_t i) const {
  if (kinds_[i] != PanelKind::segment) return {};
  return {seg_ends_.data() + (i * 2 + 1) * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
}

std::vector<Point> DiscreteSet::nodes() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto n = node(i);
    out.emplace_back(n.begin(), n.end());
  }
  return out;
}

double DiscreteSet::total_measure() const {
  double s = 0.0;
  for (double m : measures_) s += m;
  return s;
}

Point DiscreteSet::centroid() const {
  Point c(dim_, 0.0);
  if (empty()) return c;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto n = node(i);
    for (int d = 0; d < dim_; ++d) c[d] += n[d];
  }
  for (double& v : c) v /= static_cast<double>(size());
  return c;
}

double DiscreteSet::circumradius() const {
  const Point c = centroid();
  double r = 0.0;
  for (std::size_t i = 0; i < size(); ++i) r = std::max(r, detail::distance(node(i), c) + radii_[i]);
  return r;
}

std::uint64_t DiscreteSet::fingerprint() const {
  detail::Fnv1a h;
  h.add(static_cast<std::int64_t>(dim_));
  h.add(static_cast<std::uint64_t>(size()));
  for (double v : nodes_) h.add(v);
  for (double v : measures_) h.add(v);
  for (double v : radii_) h.add(v);
  return h.value();
}

void DiscreteSet::add_panel(const PanelData& p) {
  if (static_cast<int>(p.node.size()) != dim_) fail("panel node has the wrong dimension");
  if (!(p.measure > 0.0) || !std::isfinite(p.measure)) fail("panel cell measure must be positive and finite");
  if (!(p.radius > 0.0) || !std::isfinite(p.radius)) fail("panel cell radius must be positive and finite");
  nodes_.insert(nodes_.end(), p.node.begin(), p.node.end());
  measures_.push_back(p.measure);
  radii_.push_back(p.radius);
  kinds_.push_back(p.kind);
  if (p.sub_weights.empty()) {
    sub_points_.insert(sub_points_.end(), p.node.begin(), p.node.end());
    sub_weights_.push_back(p.measure);
  } else {
    sub_points_.insert(sub_points_.end(), p.sub_points.begin(), p.sub_points.end());
    sub_weights_.insert(sub_weights_.end(), p.sub_weights.begin(), p.sub_weights.end());
  }
  sub_offsets_.push_back(sub_weights_.size());
  if (p.kind == PanelKind::segment) {
    seg_ends_.insert(seg_ends_.end(), p.seg_a.begin(), p.seg_a.end());
    seg_ends_.insert(seg_ends_.end(), p.seg_b.begin(), p.seg_b.end());
  } else {
    seg_ends_.insert(seg_ends_.end(), 2 * static_cast<std::size_t>(dim_), kNaN);
  }
  if (p.corners.size() == 3 * static_cast<std::size_t>(dim_)) {
    corners_.insert(corners_.end(), p.corners.begin(), p.corners.end());
    has_tri_.push_back(true);
  } else {
    corners_.insert(corners_.end(), 3 * static_cast<std::size_t>(dim_), kNaN);
    has_tri_.push_back(false);
  }
}

void DiscreteSet::append(const DiscreteSet& other) {
  std::vector<std::size_t> all(other.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const DiscreteSet copy = other.subset(all, other.spec());
  for (std::size_t i = 0; i < copy.size(); ++i) {
    PanelData pd;
    const auto n = copy.node(i);
    pd.node.assign(n.begin(), n.end());
    pd.measure = copy.measures_[i];
    pd.radius = copy.radii_[i];
    pd.kind = copy.kinds_[i];
    for (std::size_t k = 0; k < copy.sub_count(i); ++k) {
      const auto sp = copy.sub_point(i, k);
      pd.sub_points.insert(pd.sub_points.end(), sp.begin(), sp.end());
      pd.sub_weights.push_back(copy.sub_weight(i, k));
    }
    if (pd.kind == PanelKind::segment) {
      const auto a = copy.segment_start(i);
      const auto b = copy.segment_end(i);
      pd.seg_a.assign(a.begin(), a.end());
      pd.seg_b.assign(b.begin(), b.end());
    }
    const auto t = copy.triangle(i);
    pd.corners.assign(t.begin(), t.end());
    add_panel(pd);
  }
}

DiscreteSet DiscreteSet::subset(std::span<const std::size_t> indices, SetSpec spec) const {
  DiscreteSet out(dim_, std::move(spec), resolution_);
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t i : indices) {
    if (i >= size()) fail("subset index out of range");
    out.nodes_.insert(out.nodes_.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(i * d),
                      nodes_.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    out.measures_.push_back(measures_[i]);
    out.radii_.push_back(radii_[i]);
    out.kinds_.push_back(kinds_[i]);
    out.sub_points_.insert(out.sub_points_.end(), sub_points_.begin() + static_cast<std::ptrdiff_t>(sub_offsets_[i] * d),
                           sub_points_.begin() + static_cast<std::ptrdiff_t>(sub_offsets_[i + 1] * d));
    out.sub_weights_.insert(out.sub_weights_.end(), sub_weights_.begin() + static_cast<std::ptrdiff_t>(sub_offsets_[i]),
                            sub_weights_.begin() + static_cast<std::ptrdiff_t>(sub_offsets_[i + 1]));
    out.sub_offsets_.push_back(out.sub_weights_.size());
    out.seg_ends_.insert(out.seg_ends_.end(), seg_ends_.begin() + static_cast<std::ptrdiff_t>(i * 2 * d),
                         seg_ends_.begin() + static_cast<std::ptrdiff_t>((i + 1) * 2 * d));
    out.corners_.insert(out.corners_.end(), corners_.begin() + static_cast<std::ptrdiff_t>(i * 3 * d),
                        corners_.begin() + static_cast<std::ptrdiff_t>((i + 1) * 3 * d));
    out.has_tri_.push_back(has_tri_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

DiscreteSet discretize(const SetSpec& spec, int resolution) {
  validate(spec);
  if (resolution < 1) fail("discretize: resolution must be >= 1");
  const int dim = dimension(spec);
  const bool needs_23 = !std::holds_alternative<PointsFile>(spec.shape) && !std::holds_alternative<Union>(spec.shape);
  if (needs_23 && dim != 2 && dim != 3) {
    fail("discretize: unsupported combination " + shape_name(spec) + " in dimension " + std::to_string(dim) +
         " (supported dimensions are 2 and 3)");
  }
  DiscreteSet out = std::visit(
      [&](const auto& s) -> DiscreteSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return dim == 2 ? circle_set(s, resolution, spec) : sphere3_set(s, resolution, spec);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return dim == 2 ? ring2_set(s.center, 0.0, s.radius, resolution, spec)
                          : shell3_set(s.center, 0.0, s.radius, resolution, spec);
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return dim == 2 ? ring2_set(s.center, s.r_in, s.r_out, resolution, spec)
                          : shell3_set(s.center, s.r_in, s.r_out, resolution, spec);
        } else if constexpr (std::is_same_v<T, Segment>) {
          return segment_set(s, resolution, spec);
        } else if constexpr (std::is_same_v<T, Box>) {
          return box_set(s, resolution, spec);
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          fail("discretize: a half-space is unbounded; use it only as a restriction predicate");
        } else if constexpr (std::is_same_v<T, PointsFile>) {
          return read_points_file(s.path, s.dim);
        } else {
          DiscreteSet all(dim, spec, resolution);
          for (const auto& part : s.parts) all.append(discretize(part, resolution));
          return all;
        }
      },
      spec.shape);
  check_distinct_nodes(out);
  return out;
}

std::vector<DiscreteSet> exhaustion(const Ray& ray, std::span<const double> radii, int resolution) {
  const int dim = static_cast<int>(ray.origin.size());
  if (dim != 2 && dim != 3) fail("exhaustion: supported dimensions are 2 and 3");
  if (static_cast<int>(ray.direction.size()) != dim) fail("exhaustion: ray direction has the wrong dimension");
  if (resolution < 1) fail("exhaustion: resolution must be >= 1");
  const double dn = detail::norm(ray.direction);
  if (!(dn > 0.0)) fail("exhaustion: ray direction is zero");
  if (radii.empty()) fail("exhaustion: no radii given");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) fail("exhaustion: radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) fail("exhaustion: radii must be strictly increasing");
  }
  Point dir(dim);
  for (int d = 0; d < dim; ++d) dir[d] = ray.direction[d] / dn;
  const double od = detail::dot(ray.origin, dir);
  const double oo = detail::dot(ray.origin, ray.origin);
  const double h = 1.0 / resolution;
  auto at = [&](double t) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) p[d] = ray.origin[d] + t * dir[d];
    return p;
  };
  std::vector<DiscreteSet> stages;
  for (double R : radii) {
    const double disc = od * od - oo + R * R;
    const double tmax = disc >= 0.0 ? -od + std::sqrt(disc) : -1.0;
    const int count = tmax > 0.0 ? static_cast<int>(std::floor(tmax * resolution + 1e-9)) : 0;
    if (count < 1) fail("exhaustion: truncation at radius " + std::to_string(R) + " contains no panel");
    SetSpec stage_spec{Segment{ray.origin, at(count * h)}};
    DiscreteSet stage(dim, stage_spec, resolution);
    for (int k = 0; k < count; ++k) {
      DiscreteSet::PanelData pd;
      pd.node = at((k + 0.5) * h);
      pd.measure = h;
      pd.radius = h / 2.0;
      pd.kind = PanelKind::segment;
      pd.seg_a = at(k * h);
      pd.seg_b = at((k + 1) * h);
      for (int q = 0; q < kSegmentSub; ++q) {
        const Point p = at((k + (q + 0.5) / kSegmentSub) * h);
        pd.sub_points.insert(pd.sub_points.end(), p.begin(), p.end());
        pd.sub_weights.push_back(h / kSegmentSub);
      }
      stage.add_panel(pd);
    }
    stages.push_back(std::move(stage));
  }
  return stages;
}

std::vector<DiscreteSet> exhaustion(const SetSpec& spec, std::span<const double> radii, int resolution) {
  if (radii.empty()) fail("exhaustion: no radii given");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) fail("exhaustion: radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) fail("exhaustion: radii must be strictly increasing");
  }
  const DiscreteSet full = discretize(spec, resolution);
  std::vector<DiscreteSet> stages;
  for (double R : radii) {
    const SetSpec ball{Ball{Point(static_cast<std::size_t>(full.dim()), 0.0), R}};
    const auto idx = restrict_indices(full, ball);
    if (idx.empty()) fail("exhaustion: truncation at radius " + std::to_string(R) + " contains no panel");
    stages.push_back(full.subset(idx, spec));
  }
  return stages;
}

std::vector<std::size_t> restrict_indices(const DiscreteSet& set, const SetSpec& sub) {
  validate(sub);
  if (dimension(sub) != set.dim()) fail("restrict: dimension mismatch between set and sub-spec");
  const double eps = 1e-9 * std::max(1.0, set.circumradius());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (contains(sub, set.node(i), eps)) idx.push_back(i);
  }
  return idx;
}

DiscreteSet restrict(const DiscreteSet& set, const SetSpec& sub) {
  const auto idx = restrict_indices(set, sub);
  if (idx.empty()) fail("restrict: no node of the set lies in the sub-spec");
  if (idx.size() == set.size()) return set.subset(idx, set.spec());
  return set.subset(idx, sub);
}

std::optional<std::vector<std::size_t>> embed_indices(const DiscreteSet& inner, const DiscreteSet& outer) {
  if (inner.dim() != outer.dim()) return std::nullopt;
  std::map<std::vector<double>, std::size_t> where;
  for (std::size_t j = 0; j < outer.size(); ++j) {
    const auto n = outer.node(j);
    where.emplace(std::vector<double>(n.begin(), n.end()), j);
  }
  std::vector<std::size_t> out;
  out.reserve(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const auto n = inner.node(i);
    const auto it = where.find(std::vector<double>(n.begin(), n.end()));
    if (it == where.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

DiscreteSet read_points_file(const std::string& path, int dim) {
  if (dim < 2) fail("points file: dimension must be at least 2");
  std::ifstream in(path);
  if (!in) fail("points file: cannot read '" + path + "'");
  DiscreteSet out(dim, SetSpec{PointsFile{path, dim}}, 1);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> vals;
    double v = 0.0;
    while (ss >> v) vals.push_back(v);
    if (!ss.eof()) fail("points file: unparsable value on line " + std::to_string(lineno));
    if (static_cast<int>(vals.size()) != dim + 2) {
      fail("points file: line " + std::to_string(lineno) + " has " + std::to_string(vals.size()) +
           " values, expected " + std::to_string(dim + 2));
    }
    DiscreteSet::PanelData pd;
    pd.node.assign(vals.begin(), vals.begin() + dim);
    pd.measure = vals[static_cast<std::size_t>(dim)];
    pd.radius = vals[static_cast<std::size_t>(dim) + 1];
    pd.kind = PanelKind::point;
    for (double c : pd.node) {
      if (!std::isfinite(c)) fail("points file: non-finite coordinate on line " + std::to_string(lineno));
    }
    if (!(pd.measure > 0.0) || !(pd.radius > 0.0) || !std::isfinite(pd.measure) || !std::isfinite(pd.radius)) {
      fail("points file: cell measure and radius must be positive on line " + std::to_string(lineno));
    }
    out.add_panel(pd);
  }
  if (out.empty()) fail("points file: '" + path + "' contains no panels");
  return out;
}

}  // namespace balayage
