#pragma once

// Equilibrium measure gamma with U^gamma = 1 on the set, and capacity = gamma(X).

#include "balayage/balayage.hpp"
#include "balayage/measure.hpp"
#include "balayage/qp.hpp"
#include "balayage/workspace.hpp"

namespace balayage {

struct EquilibriumResult {
  DiscreteMeasure gamma;
  double capacity = 0.0;
  double energy = 0.0;              ///< gamma^T K gamma; equals capacity at the optimum
  double potential_residual = 0.0;  ///< max |U^gamma - 1| over support nodes
  double frostman_excess = 0.0;     ///< max (U^gamma - 1)_+ over nodes and off-set probes
  /// Max / min of mass per unit cell measure over the nodes.
  double density_ratio = 0.0;
  std::vector<Point> probes;
  QPSolution qp;
};

EquilibriumResult equilibrium_measure(const Workspace& ws, const QPOptions& opt = {});
double capacity(const Workspace& ws, const QPOptions& opt = {});
double capacity(std::shared_ptr<const DiscreteSet> target, const KernelSpec& spec, const QPOptions& opt = {});

struct MassIdentityReport {
  double swept_mass = 0.0;        ///< omega^A(X) from the sweep
  double integral = 0.0;          ///< integral of U^omega against gamma_A
  double relative_difference = 0.0;
};

/// omega^A(X) against the integral of U^omega d gamma_A, both computed independently.
MassIdentityReport equilibrium_mass_identity(const Source& omega, const Workspace& ws, const QPOptions& opt = {});

}  // namespace balayage
