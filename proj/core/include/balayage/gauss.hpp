#pragma once

// The inner Gauss variational problem: minimize the f-weighted energy, f = -U^omega, over
// probability measures on the set.

#include <cstdint>
#include <memory>
#include <vector>

#include "balayage/balayage.hpp"
#include "balayage/equilibrium.hpp"
#include "balayage/report.hpp"

namespace balayage {

struct GaussResult {
  DiscreteMeasure lambda;
  double c_weighted = 0.0;  ///< lambda^T (K lambda - b)
  double w_value = 0.0;     ///< simplex QP objective
  /// Max over support nodes of |U_f^lambda - c| relative to max(1, max |b|).
  double weighted_potential_residual = 0.0;
  /// Max over nodes of (c - U_f^lambda)_+ relative to max(1, max |b|).
  double lower_bound_residual = 0.0;
  double swept_mass = 0.0;  ///< omega^A(X) from the companion sweep
  double cone_value = 0.0;  ///< companion sweep objective; never above w_value
  bool solvable = true;
  std::vector<double> b;
  QPSolution qp;
  BalayageResult companion;
};

GaussResult solve_gauss(const Source& omega, const Workspace& ws, const QPOptions& opt = {});

struct RepresentationReport {
  bool applicable = false;  ///< swept mass <= 1 + tol
  /// ||lambda - (omega^A + c gamma)|| / ||lambda||.
  double relative_distance = 0.0;
  double c_formula = 0.0;  ///< (1 - omega^A(X)) / c(A)
  /// |c - c_formula| / max(|c_formula|, |c|, tol).
  double c_gap = 0.0;
  Report report;
};

RepresentationReport representation_check(const GaussResult& g, const BalayageResult& b, const EquilibriumResult& e,
                                          const Workspace& ws, double tol = 0.05);

/// Compares lambda with `count` verified members of the class {U_f^mu >= c on every node}.
Report lambda_class_extremality(const GaussResult& g, const Workspace& ws, std::uint64_t rng_seed,
                                std::size_t count = 10, const QPOptions& opt = {});

struct SupportProbeReport {
  std::vector<double> outer_fraction;  ///< lambda mass beyond shell_radius, per stage
  std::vector<double> swept_mass;
  std::vector<double> c_weighted;
  bool decreasing = false;  ///< outer fraction non-increasing and strictly lower at the end
};

/// Per stage of an increasing exhaustion: fraction of lambda_{K_j,f} beyond |x| = shell_radius.
SupportProbeReport support_compactness_probe(const Source& omega,
                                             const std::vector<std::shared_ptr<const DiscreteSet>>& stages,
                                             const KernelSpec& spec, double shell_radius, const QPOptions& opt = {});

}  // namespace balayage
