#include "balayage/balayage.hpp"

#include <algorithm>
#include <cmath>

#include "balayage/error.hpp"
#include "balayage/probes.hpp"
#include "detail/rng.hpp"
#include "detail/vec.hpp"

namespace balayage {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Largest relative excess of `upper` over `lower` ((upper - lower)_+ / |lower|).
double relative_excess(std::span<const double> upper, std::span<const double> lower) {
  double e = 0.0;
  for (std::size_t k = 0; k < upper.size(); ++k) {
    const double d = upper[k] - lower[k];
    if (d > 0.0) e = std::max(e, d / std::max(std::abs(lower[k]), 1e-300));
  }
  return e;
}

// Random point charges on shells between 1.5 and 3 circumradii around the set.
std::vector<PointCharge> random_charges(const DiscreteSet& set, detail::Rng& rng, std::size_t count) {
  const int n = set.dim();
  const Point c = set.centroid();
  const double rad = std::max(set.circumradius(), 1e-3);
  std::vector<PointCharge> out;
  for (std::size_t k = 0; k < count; ++k) {
    Point dir(static_cast<std::size_t>(n));
    double len = 0.0;
    do {
      len = 0.0;
      for (int a = 0; a < n; ++a) {
        dir[a] = rng.uniform(-1.0, 1.0);
        len += dir[a] * dir[a];
      }
    } while (len > 1.0 || len < 1e-6);
    len = std::sqrt(len);
    const double r = rad * rng.uniform(1.5, 3.0);
    Point p(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) p[a] = c[a] + r * dir[a] / len;
    out.push_back({std::move(p), rng.uniform(0.2, 1.0)});
  }
  return out;
}

}  // namespace

double potential_match(std::span<const double> kw, std::span<const double> b, std::span<const double> w) {
  const double wmax = max_abs(w);
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double g = kw[i] - b[i];
    if (w[i] > kSupportThreshold * wmax) {
      r = std::max(r, std::abs(g));
    } else {
      r = std::max(r, -g);
    }
  }
  return r / std::max(1.0, max_abs(b));
}

BalayageResult sweep(const Source& omega, const Workspace& ws, const QPOptions& opt) {
  BalayageResult r;
  r.b = ws.linear_term(omega);
  r.qp = solve_cone(ws.matrix(), r.b, opt);
  if (!r.qp.converged) throw SolverError("sweep: cone QP did not converge (" + r.qp.status + ")");
  r.swept = ws.measure(r.qp.w);
  r.source_mass = source_mass(omega);
  r.swept_mass = sum(r.qp.w);
  const auto kw = ws.matrix().apply(r.qp.w);
  for (std::size_t i = 0; i < kw.size(); ++i) {
    r.energy_swept += r.qp.w[i] * kw[i];
    r.mutual_energy_source += r.qp.w[i] * r.b[i];
  }
  r.gauss_value = r.qp.objective;
  r.potential_match_residual = potential_match(kw, r.b, r.qp.w);
  r.probes = probe_points(ws.set(), omega);
  const auto u_swept = ws.potential(r.qp.w, r.probes);
  const auto u_src = source_potential(ws.spec(), omega, r.probes);
  r.domination_residual = relative_excess(u_swept, u_src);
  return r;
}

BalayageResult sweep(const Source& omega, std::shared_ptr<const DiscreteSet> target, const KernelSpec& spec,
                     const QPOptions& opt) {
  const Workspace ws(spec, std::move(target));
  return sweep(omega, ws, opt);
}

std::vector<std::vector<double>> sample_dominating_class(const Workspace& ws, std::span<const double> base,
                                                         std::span<const double> b, double level,
                                                         std::uint64_t rng_seed, std::size_t count) {
  const std::size_t n = ws.size();
  detail::Rng rng(rng_seed);
  const auto uni = uniform_measure(ws.set_ptr(), 1.0).masses;
  const auto k_uni = ws.matrix().apply(uni);
  const double k_uni_min = *std::min_element(k_uni.begin(), k_uni.end());
  const double bmax = std::max(1.0, max_abs(b));
  std::vector<std::vector<double>> out;
  for (std::size_t m = 0; m < count; ++m) {
    std::vector<double> nu(base.begin(), base.end());
    if (m == 1) {
      // a small multiple of the uniform measure: strictly more mass and energy
      for (std::size_t i = 0; i < n; ++i) nu[i] += 0.05 * sum(base) * uni[i];
    } else if (m >= 2) {
      const double spread = rng.uniform(0.1, 0.6);
      for (std::size_t i = 0; i < n; ++i) nu[i] *= 1.0 + rng.uniform(-spread, 2.0 * spread);
      const std::size_t bumps = 1 + rng.next() % 4;
      for (std::size_t k = 0; k < bumps; ++k) nu[rng.next() % n] += rng.uniform(0.0, 0.05) * sum(base);
    }
    const auto knu = ws.matrix().apply(nu);
    double deficit = 0.0;
    for (std::size_t i = 0; i < n; ++i) deficit = std::max(deficit, b[i] + level - knu[i]);
    if (m >= 1 && deficit > 0.0) {
      const double t = deficit / k_uni_min * (1.0 + 1e-9) + 1e-12 * bmax / k_uni_min;
      for (std::size_t i = 0; i < n; ++i) nu[i] += t * uni[i];
    }
    out.push_back(std::move(nu));
  }
  return out;
}

Report verify_characterizations(const BalayageResult& result, const Workspace& ws, const Source& omega,
                                std::uint64_t rng_seed, const QPOptions& opt) {
  Report rep;
  rep.title = "balayage";
  const auto& w = result.qp.w;
  const double scale = result.qp.scale;
  const double slack = opt.tol * scale;
  rep.expect("converged", result.qp.converged, static_cast<double>(result.qp.iterations));
  rep.expect_at_most("potential_match", result.potential_match_residual, 1e-2, "(i) on target nodes");

  detail::Rng rng(rng_seed);
  double sym = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto charges = random_charges(ws.set(), rng, 3);
    std::vector<Point> at;
    for (const auto& q : charges) at.push_back(q.location);
    const auto u = ws.potential(w, at);
    double lhs = 0.0;
    for (std::size_t a = 0; a < charges.size(); ++a) lhs += charges[a].mass * u[a];
    const auto sigma_a = sweep(Source{charges}, ws, opt);
    double rhs = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) rhs += sigma_a.qp.w[i] * result.b[i];
    sym = std::max(sym, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
  }
  rep.expect_at_most("symmetry", sym, 1e-2, "I(omega^A, sigma) = I(omega, sigma^A) for 5 seeded sigma");

  double gauss_gap = 0.0;
  for (int k = 0; k < 10; ++k) {
    std::vector<double> mu(w.size());
    const double spread = rng.uniform(0.0, 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      mu[i] = std::max(0.0, w[i] * (1.0 + rng.uniform(-spread, spread)) + rng.uniform(0.0, 0.1) * result.swept_mass /
                                                                              static_cast<double>(w.size()));
    }
    const auto kmu = ws.matrix().apply(mu);
    double val = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) val += mu[i] * kmu[i] - 2.0 * result.b[i] * mu[i];
    gauss_gap = std::max(gauss_gap, result.gauss_value - val);
  }
  rep.expect_at_most("gauss_minimality", gauss_gap, slack, "(iv) objective <= I_f(mu) for 10 random mu");

  const auto members = sample_dominating_class(ws, w, result.b, 0.0, rng.next(), 6);
  const auto u_swept = ws.potential(w, result.probes);
  const double energy = result.energy_swept;
  double pot_excess = 0.0;
  double energy_gap = 0.0;
  for (std::size_t m = 1; m < members.size(); ++m) {
    const auto u_nu = ws.potential(members[m], result.probes);
    pot_excess = std::max(pot_excess, relative_excess(u_swept, u_nu));
    energy_gap = std::max(energy_gap, energy - ws.matrix().quad(members[m], members[m]));
  }
  rep.expect_at_most("minimum_potential", pot_excess, 1e-3, "(v) U^{omega^A} <= U^nu at probes, 5 members of Gamma");
  rep.expect_at_most("minimum_energy", energy_gap, slack, "(vi) I(omega^A) <= I(nu), same members");

  rep.expect_at_most("domination", result.domination_residual, 1e-3, "U^{omega^A} <= U^omega at off-set probes");
  const double ident = std::abs(result.energy_swept - result.mutual_energy_source) /
                       std::max(std::abs(result.energy_swept), 1e-300);
  rep.expect_at_most("energy_identity", ident, 1e-6, "I(omega^A) = I(omega^A, omega)");
  rep.expect_at_most("mass_bound", result.swept_mass - source_mass(omega) * (1.0 + 1e-6), 0.0,
                     "omega^A(X) <= M omega(X), M = 1");
  return rep;
}

RestReport sweep_with_rest(const Source& omega, const Workspace& outer, const Workspace& inner, const QPOptions& opt) {
  if (!embed_indices(inner.set(), outer.set())) {
    throw ValidationError("sweep_with_rest: the inner set is not a subset of the outer set");
  }
  RestReport r;
  const auto a = sweep(omega, outer, opt);
  const auto direct = sweep(omega, inner, opt);
  const auto two = sweep(Source{a.swept}, inner, opt);
  r.direct = direct.swept;
  r.two_step = two.swept;
  r.mass_outer = a.swept_mass;
  r.mass_direct = direct.swept_mass;
  r.mass_two_step = two.swept_mass;
  r.relative_distance = norm_distance(inner.matrix(), r.direct, r.two_step) /
                        std::max(energy_norm(inner.matrix(), r.direct), 1e-300);
  const auto probes = probe_points(outer.set(), omega);
  const auto u_in = inner.potential(direct.qp.w, probes);
  const auto u_out = outer.potential(a.qp.w, probes);
  r.potential_excess = relative_excess(u_in, u_out);
  r.report.title = "rest";
  r.report.expect_at_most("relative_distance", r.relative_distance, 1e-3, "omega^{A'} = (omega^A)^{A'}");
  r.report.expect_at_most("potential_excess", r.potential_excess, 1e-3, "U^{omega^{A'}} <= U^{omega^A}");
  r.report.expect_at_most("mass_order", r.mass_direct - r.mass_outer, opt.tol * std::max(1.0, r.mass_outer),
                          "omega^{A'}(X) <= omega^A(X)");
  return r;
}

Report minimum_mass_check(const BalayageResult& result, const Workspace& ws, std::uint64_t rng_seed,
                          std::size_t count, const QPOptions& opt) {
  Report rep;
  rep.title = "minimum_mass";
  const auto members = sample_dominating_class(ws, result.qp.w, result.b, 0.0, rng_seed, count);
  const double slack = opt.tol * std::max(1.0, result.swept_mass);
  const double scale = result.qp.scale;
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto kn = ws.matrix().apply(members[m]);
    double deficit = 0.0;
    for (std::size_t i = 0; i < kn.size(); ++i) deficit = std::max(deficit, result.b[i] - kn[i]);
    const std::string tag = "member" + std::to_string(m);
    rep.expect_at_most(tag + ".membership", deficit / scale, opt.tol, "U^nu >= U^omega on every node");
    rep.expect_at_most(tag + ".mass", result.swept_mass - sum(members[m]), slack, "omega^A(X) <= nu(X)");
  }
  rep.expect(
      "uniqueness_not_asserted", true, 0.0,
      "minimum-mass measures in the class need not be unique; only the inequality is checked");
  return rep;
}

}  // namespace balayage
