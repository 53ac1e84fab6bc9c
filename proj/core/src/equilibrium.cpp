#include "balayage/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "balayage/error.hpp"
#include "balayage/probes.hpp"

namespace balayage {

EquilibriumResult equilibrium_measure(const Workspace& ws, const QPOptions& opt) {
  if (ws.size() == 0) throw ValidationError("equilibrium: empty target");
  EquilibriumResult r;
  const std::vector<double> one(ws.size(), 1.0);
  r.qp = solve_cone(ws.matrix(), one, opt);
  if (!r.qp.converged) throw SolverError("equilibrium: cone QP did not converge (" + r.qp.status + ")");
  const auto& w = r.qp.w;
  r.gamma = ws.measure(w);
  const auto kw = ws.matrix().apply(w);
  double wmax = 0.0;
  for (double x : w) wmax = std::max(wmax, x);
  double dmin = INFINITY;
  double dmax = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r.capacity += w[i];
    r.energy += w[i] * kw[i];
    if (w[i] > kSupportThreshold * wmax) r.potential_residual = std::max(r.potential_residual, std::abs(kw[i] - 1.0));
    r.frostman_excess = std::max(r.frostman_excess, kw[i] - 1.0);
    const double dens = w[i] / ws.set().cell_measure(i);
    dmin = std::min(dmin, dens);
    dmax = std::max(dmax, dens);
  }
  r.density_ratio = dmin > 0.0 ? dmax / dmin : INFINITY;
  r.probes = probe_points(ws.set(), Source{std::vector<PointCharge>{}});
  for (double u : ws.potential(w, r.probes)) r.frostman_excess = std::max(r.frostman_excess, u - 1.0);
  r.frostman_excess = std::max(0.0, r.frostman_excess);
  return r;
}

double capacity(const Workspace& ws, const QPOptions& opt) { return equilibrium_measure(ws, opt).capacity; }

double capacity(std::shared_ptr<const DiscreteSet> target, const KernelSpec& spec, const QPOptions& opt) {
  return capacity(Workspace(spec, std::move(target)), opt);
}

MassIdentityReport equilibrium_mass_identity(const Source& omega, const Workspace& ws, const QPOptions& opt) {
  MassIdentityReport r;
  const auto s = sweep(omega, ws, opt);
  const auto e = equilibrium_measure(ws, opt);
  r.swept_mass = s.swept_mass;
  for (std::size_t i = 0; i < ws.size(); ++i) r.integral += e.qp.w[i] * s.b[i];
  r.relative_difference = std::abs(r.swept_mass - r.integral) / std::max(std::abs(r.integral), 1e-300);
  return r;
}

}  // namespace balayage
