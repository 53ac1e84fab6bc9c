#pragma once

// min w^T K w - 2 b^T w over the nonnegative cone or the probability simplex.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "balayage/kernel.hpp"

namespace balayage {

enum class Constraint : std::uint8_t { nonneg_cone, simplex };

struct QPOptions {
  double tol = 1e-8;
  std::size_t max_iter = 200000;
  /// Start from this point (projected onto the feasible set) instead of 0 / uniform.
  std::optional<std::vector<double>> start;
  /// Record the objective after every iteration.
  bool keep_trace = false;
};

struct QPSolution {
  std::vector<double> w;
  double objective = 0.0;
  double kkt_stationarity = 0.0;
  double kkt_complementarity = 0.0;
  /// ||w - P(w - g)||_inf / scale, P the projection onto the feasible set.
  double natural_residual = 0.0;
  /// w^T (K w - b); meaningful for the simplex problem, NaN for the cone.
  double multiplier_c = 0.0;
  double scale = 1.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> trace;
};

/// KKT residuals of a given point; fills every field except iterations/trace.
QPSolution kkt_report(const KernelMatrix& K, std::span<const double> b, std::span<const double> w, Constraint c);

QPSolution solve_cone(const KernelMatrix& K, std::span<const double> b, const QPOptions& opt = {});
QPSolution solve_simplex(const KernelMatrix& K, std::span<const double> b, const QPOptions& opt = {});
QPSolution solve(const KernelMatrix& K, std::span<const double> b, Constraint c, const QPOptions& opt = {});

/// Exhaustive support enumeration; N <= 12.
QPSolution brute_force(const KernelMatrix& K, std::span<const double> b, Constraint c);

/// Euclidean projection onto {w >= 0, sum w = 1}.
std::vector<double> project_simplex(std::span<const double> v);

}  // namespace balayage
