#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "balayage/error.hpp"
#include "balayage/kernel.hpp"

namespace balayage {

namespace {

double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double segment_self_energy(double s, double length) {
  if (!(s > -1.0)) throw ValidationError("segment self-energy diverges for exponent <= -1");
  return 2.0 * std::pow(length, s) / ((s + 1.0) * (s + 2.0));
}

double disc_self_energy(double s, double radius) {
  if (!(s > -2.0)) throw ValidationError("disc self-energy diverges for exponent <= -2");
  // distance density of two uniform points in the unit disc; q = 2 - r keeps precision near r = 2
  auto f = [s](double r, double q) {
    if (r <= 0.0 || q <= 0.0) return 0.0;
    const double acos_half = 2.0 * std::asin(std::sqrt(q / 4.0));
    const double dens = (4.0 * r / std::numbers::pi) * acos_half - (r * r / std::numbers::pi) * std::sqrt(q * (2.0 + r));
    return std::pow(r, s) * dens;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double unit = integrator.integrate(
      [&](double r, double rc) { return f(r, r > 1.0 ? rc : 2.0 - r); }, 0.0, 2.0);
  return unit * std::pow(radius, s);
}

double ball3_self_energy(double s, double radius) {
  if (!(s > -3.0)) throw ValidationError("ball self-energy diverges for exponent <= -3");
  const double unit = std::pow(2.0, s + 2.0) * (6.0 / (s + 3.0) - 9.0 / (s + 4.0) + 3.0 / (s + 6.0));
  return unit * std::pow(radius, s);
}

double ball_self_energy(int n, double s, double radius) {
  if (n == 2) return disc_self_energy(s, radius);
  if (n == 3) return ball3_self_energy(s, radius);
  throw ValidationError("ball self-energy is implemented for dimensions 2 and 3 only");
}

// The overlap area of a triangle T with its translate T + r e is A (1 - r beta(e))^2 for
// r < 1 / beta(e), where beta(e) = -sum_k c_k min(0, n_k . e) / (2A) over edges with
// lengths c_k and outward normals n_k. Integrating |z|^s against the overlap in polar
// coordinates leaves a Beta factor times an angular integral of beta^-(s+2).
double triangle_self_energy(double s, std::span<const double> corners, int dim) {
  if (!(s > -2.0)) throw ValidationError("triangle self-energy diverges for exponent <= -2");
  if (corners.size() != 3 * static_cast<std::size_t>(dim) || (dim != 2 && dim != 3)) {
    throw ValidationError("triangle self-energy: expected 3 corners in dimension 2 or 3");
  }
  std::array<std::array<double, 2>, 3> q{};
  if (dim == 2) {
    for (int k = 0; k < 3; ++k) q[k] = {corners[2 * k] - corners[0], corners[2 * k + 1] - corners[1]};
  } else {
    std::array<double, 3> e1{}, e2{};
    for (int d = 0; d < 3; ++d) {
      e1[d] = corners[3 + d] - corners[d];
      e2[d] = corners[6 + d] - corners[d];
    }
    const std::array<double, 3> nrm{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
                                    e1[0] * e2[1] - e1[1] * e2[0]};
    const double l1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    std::array<double, 3> u{e1[0] / l1, e1[1] / l1, e1[2] / l1};
    std::array<double, 3> v{nrm[1] * u[2] - nrm[2] * u[1], nrm[2] * u[0] - nrm[0] * u[2],
                            nrm[0] * u[1] - nrm[1] * u[0]};
    const double lv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (double& x : v) x /= lv;
    q[0] = {0.0, 0.0};
    q[1] = {l1, 0.0};
    q[2] = {e2[0] * u[0] + e2[1] * u[1] + e2[2] * u[2], e2[0] * v[0] + e2[1] * v[1] + e2[2] * v[2]};
  }
  const double area = 0.5 * std::abs((q[1][0] - q[0][0]) * (q[2][1] - q[0][1]) - (q[1][1] - q[0][1]) * (q[2][0] - q[0][0]));
  if (!(area > 0.0)) throw ValidationError("triangle self-energy: degenerate triangle");
  const double cx = (q[0][0] + q[1][0] + q[2][0]) / 3.0;
  const double cy = (q[0][1] + q[1][1] + q[2][1]) / 3.0;
  std::array<std::array<double, 2>, 3> n{};
  std::array<double, 3> c{};
  std::vector<double> breaks;
  for (int k = 0; k < 3; ++k) {
    const auto& a = q[k];
    const auto& b = q[(k + 1) % 3];
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    c[k] = std::hypot(dx, dy);
    n[k] = {dy / c[k], -dx / c[k]};
    if (n[k][0] * (cx - a[0]) + n[k][1] * (cy - a[1]) > 0.0) n[k] = {-n[k][0], -n[k][1]};
    const double th = std::atan2(n[k][1], n[k][0]);
    for (double b2 : {th + 0.5 * std::numbers::pi, th - 0.5 * std::numbers::pi}) {
      breaks.push_back(std::fmod(b2 + 4.0 * std::numbers::pi, 2.0 * std::numbers::pi));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(breaks.front() + 2.0 * std::numbers::pi);
  auto integrand = [&](double th) {
    const double ex = std::cos(th);
    const double ey = std::sin(th);
    double beta = 0.0;
    for (int k = 0; k < 3; ++k) beta -= c[k] * std::min(0.0, n[k][0] * ex + n[k][1] * ey);
    beta /= 2.0 * area;
    return std::pow(beta, -(s + 2.0));
  };
  double angular = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] - breaks[k] <= 0.0) continue;
    angular += boost::math::quadrature::gauss<double, 30>::integrate(integrand, breaks[k], breaks[k + 1]);
  }
  const double beta_fn = 2.0 / ((s + 2.0) * (s + 3.0) * (s + 4.0));
  return beta_fn * angular / area;
}

double collinear_pair_energy(double s, double a, double b, double c, double d) {
  auto F = [s](double u) {
    if (u <= 0.0) return 0.0;
    if (s == -1.0) return u * std::log(u) - u;
    return std::pow(u, s + 2.0) / ((s + 1.0) * (s + 2.0));
  };
  const double raw = F(d - a) - F(d - b) - F(c - a) + F(c - b);
  return raw / ((b - a) * (d - c));
}

double monte_carlo_self_energy(double s, int idim, double measure, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw ValidationError("monte_carlo diagonal mode needs at least one sample");
  std::mt19937_64 rng(seed);
  auto in_ball = [&](int d, double rad, double* out) {
    for (;;) {
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        out[k] = 2.0 * uniform53(rng) - 1.0;
        r2 += out[k] * out[k];
      }
      if (r2 <= 1.0) break;
    }
    for (int k = 0; k < d; ++k) out[k] *= rad;
  };
  double sum = 0.0;
  std::uint64_t used = 0;
  for (std::uint64_t it = 0; it < samples; ++it) {
    double dist = 0.0;
    if (idim == 1) {
      dist = std::abs(uniform53(rng) - uniform53(rng)) * measure;
    } else {
      const double rad = idim == 2 ? std::sqrt(measure / std::numbers::pi)
                                   : std::cbrt(3.0 * measure / (4.0 * std::numbers::pi));
      double x[3];
      double y[3];
      in_ball(idim, rad, x);
      in_ball(idim, rad, y);
      double d2 = 0.0;
      for (int k = 0; k < idim; ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
      dist = std::sqrt(d2);
    }
    if (dist == 0.0) continue;
    sum += std::pow(dist, s);
    ++used;
  }
  return sum / static_cast<double>(used);
}

}  // namespace balayage

namespace balayage {

// Sum over edges of signed wedge integrals around the projection of x onto the plane.
double triangle_potential(double s, std::span<const double> corners, std::span<const double> x) {
  if (corners.size() != 9 || x.size() != 3) throw ValidationError("triangle potential: expected R^3 input");
  if (!(s > -2.0)) throw ValidationError("triangle potential diverges for exponent <= -2");
  using V = std::array<double, 3>;
  auto at = [&](int k) { return V{corners[3 * k], corners[3 * k + 1], corners[3 * k + 2]}; };
  auto sub = [](V a, V b) { return V{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
  auto dot = [](V a, V b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  auto cross = [](V a, V b) {
    return V{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  const V p[3] = {at(0), at(1), at(2)};
  V n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
  const double nn = std::sqrt(dot(n, n));
  if (!(nn > 0.0)) throw ValidationError("triangle potential: degenerate triangle");
  for (double& v : n) v /= nn;
  const V xv{x[0], x[1], x[2]};
  const double d = dot(sub(xv, p[0]), n);
  const double ad = std::abs(d);
  const V xp{xv[0] - d * n[0], xv[1] - d * n[1], xv[2] - d * n[2]};
  const V cen{(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0,
              (p[0][2] + p[1][2] + p[2][2]) / 3.0};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const V& a = p[k];
    const V& b = p[(k + 1) % 3];
    V tau = sub(b, a);
    const double len = std::sqrt(dot(tau, tau));
    for (double& v : tau) v /= len;
    V nu = cross(tau, n);
    if (dot(sub(cen, a), nu) > 0.0) nu = V{-nu[0], -nu[1], -nu[2]};
    const double h = dot(sub(a, xp), nu);
    if (h == 0.0) continue;
    const double lm = dot(sub(a, xp), tau);
    const double lp = dot(sub(b, xp), tau);
    const double r02 = h * h + d * d;
    if (s == -1.0) {
      const double rm = std::sqrt(r02 + lm * lm);
      const double rp = std::sqrt(r02 + lp * lp);
      const double lg = (lm < 0.0 && lp < 0.0) ? std::log((rm - lm) / (rp - lp)) : std::log((rp + lp) / (rm + lm));
      total += h * lg - ad * (std::atan(h * lp / (r02 + ad * rp)) - std::atan(h * lm / (r02 + ad * rm)));
      continue;
    }
    const double cap = std::pow(ad, s + 2.0);
    auto g = [&](double t) {
      const double q = h * h + t * t;
      return (std::pow(q + d * d, 0.5 * s + 1.0) - cap) / ((s + 2.0) * q);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double part = 0.0;
    if (lm < 0.0 && lp > 0.0) {
      part = ts.integrate(g, lm, 0.0) + ts.integrate(g, 0.0, lp);
    } else if (lm != lp) {
      part = ts.integrate(g, lm, lp);
    }
    total += h * part;
  }
  return total;
}

}  // namespace balayage
