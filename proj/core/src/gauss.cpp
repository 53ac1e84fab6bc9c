#include "balayage/gauss.hpp"

#include <algorithm>
#include <cmath>

#include "balayage/error.hpp"
#include "balayage/probes.hpp"
#include "detail/vec.hpp"

namespace balayage {

namespace {

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

GaussResult solve_gauss(const Source& omega, const Workspace& ws, const QPOptions& opt) {
  GaussResult g;
  g.companion = sweep(omega, ws, opt);
  g.b = g.companion.b;
  g.qp = solve_simplex(ws.matrix(), g.b, opt);
  if (!g.qp.converged) throw SolverError("gauss: simplex QP did not converge (" + g.qp.status + ")");
  g.lambda = ws.measure(g.qp.w);
  g.c_weighted = g.qp.multiplier_c;
  g.w_value = g.qp.objective;
  g.swept_mass = g.companion.swept_mass;
  g.cone_value = g.companion.gauss_value;
  // a single compact discretization always has finite capacity, which suffices for existence
  g.solvable = true;
  const auto kw = ws.matrix().apply(g.qp.w);
  double wmax = 0.0;
  for (double x : g.qp.w) wmax = std::max(wmax, x);
  for (std::size_t i = 0; i < kw.size(); ++i) {
    const double uf = kw[i] - g.b[i];
    if (g.qp.w[i] > kSupportThreshold * wmax) {
      g.weighted_potential_residual = std::max(g.weighted_potential_residual, std::abs(uf - g.c_weighted));
    }
    g.lower_bound_residual = std::max(g.lower_bound_residual, g.c_weighted - uf);
  }
  g.weighted_potential_residual /= g.qp.scale;
  g.lower_bound_residual = std::max(0.0, g.lower_bound_residual) / g.qp.scale;
  return g;
}

RepresentationReport representation_check(const GaussResult& g, const BalayageResult& b, const EquilibriumResult& e,
                                          const Workspace& ws, double tol) {
  RepresentationReport r;
  r.report.title = "representation";
  r.applicable = b.swept_mass <= 1.0 + tol;
  if (!r.applicable) {
    r.report.expect("applicable", true, b.swept_mass, "not applicable: swept mass exceeds 1");
    return r;
  }
  const std::size_t n = ws.size();
  std::vector<double> rep(n);
  for (std::size_t i = 0; i < n; ++i) rep[i] = b.qp.w[i] + g.c_weighted * e.qp.w[i];
  // rep may dip below zero when c < 0; the energy norm is defined for signed vectors anyway
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = g.qp.w[i] - rep[i];
  const double dist2 = ws.matrix().quad(diff, diff);
  const double lam2 = ws.matrix().quad(g.qp.w, g.qp.w);
  r.relative_distance = std::sqrt(std::max(0.0, dist2) / lam2);
  r.c_formula = (1.0 - b.swept_mass) / e.capacity;
  r.c_gap = std::abs(g.c_weighted - r.c_formula) /
            std::max({std::abs(r.c_formula), std::abs(g.c_weighted), 1e-12});
  r.report.expect_at_most("relative_distance", r.relative_distance, tol, "lambda = omega^A + c gamma");
  r.report.expect_at_most("c_gap", r.c_gap, tol, "c = (1 - omega^A(X)) / c(A)");
  return r;
}

Report lambda_class_extremality(const GaussResult& g, const Workspace& ws, std::uint64_t rng_seed, std::size_t count,
                                const QPOptions& opt) {
  Report rep;
  rep.title = "lambda_class";
  const auto& lam = g.qp.w;
  const double slack = opt.tol * g.qp.scale;
  const auto members = sample_dominating_class(ws, lam, g.b, g.c_weighted, rng_seed, count);
  const auto probes = probe_points(ws.set(), Source{std::vector<PointCharge>{}});
  const auto u_lam = ws.potential(lam, probes);
  const double norm_lam = std::sqrt(ws.matrix().quad(lam, lam));
  const double mass_lam = sum(lam);
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto& mu = members[m];
    const std::string tag = "member" + std::to_string(m);
    const auto kmu = ws.matrix().apply(mu);
    double deficit = 0.0;
    for (std::size_t i = 0; i < kmu.size(); ++i) deficit = std::max(deficit, g.c_weighted - (kmu[i] - g.b[i]));
    rep.expect_at_most(tag + ".membership", deficit, slack, "U_f^mu >= c on every node");
    const auto u_mu = ws.potential(mu, probes);
    double excess = 0.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      excess = std::max(excess, (u_lam[k] - u_mu[k]) / std::max(std::abs(u_mu[k]), 1e-300));
    }
    rep.expect_at_most(tag + ".potential", excess, 1e-3, "U^lambda <= U^mu at probes");
    rep.expect_at_most(tag + ".norm", norm_lam - std::sqrt(ws.matrix().quad(mu, mu)), slack, "||lambda|| <= ||mu||");
    rep.expect_at_most(tag + ".mass", mass_lam - sum(mu), slack, "lambda(X) <= mu(X)");
  }
  rep.expect("uniqueness_not_asserted", true, 0.0, "the class need not have a unique minimum-mass member");
  return rep;
}

SupportProbeReport support_compactness_probe(const Source& omega,
                                             const std::vector<std::shared_ptr<const DiscreteSet>>& stages,
                                             const KernelSpec& spec, double shell_radius, const QPOptions& opt) {
  SupportProbeReport r;
  for (const auto& st : stages) {
    const Workspace ws(spec, st);
    const auto g = solve_gauss(omega, ws, opt);
    double outer = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (detail::norm(st->node(i)) > shell_radius) outer += g.qp.w[i];
    }
    r.outer_fraction.push_back(outer / sum(g.qp.w));
    r.swept_mass.push_back(g.swept_mass);
    r.c_weighted.push_back(g.c_weighted);
  }
  r.decreasing = r.outer_fraction.size() >= 2;
  for (std::size_t k = 1; k < r.outer_fraction.size(); ++k) {
    r.decreasing = r.decreasing && r.outer_fraction[k] <= r.outer_fraction[k - 1] + opt.tol;
  }
  if (r.decreasing) r.decreasing = r.outer_fraction.back() < r.outer_fraction.front();
  return r;
}

}  // namespace balayage
