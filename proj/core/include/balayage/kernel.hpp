#pragma once

// Riesz kernels |x - y|^(alpha - n), panel self-energies and the discrete energy matrix.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "balayage/geometry.hpp"
#include "balayage/measure.hpp"

namespace balayage {

enum class DiagMode : std::uint8_t { analytic_segment, equivalent_disc, monte_carlo };

struct KernelSpec {
  double alpha = 2.0;
  int dim = 3;
  double max_principle_constant = 1.0;  // M; exposed but fixed to 1 for the Riesz family
  DiagMode diag_mode = DiagMode::equivalent_disc;
  std::uint64_t mc_samples = 100000;
  std::uint64_t mc_seed = 0x9e3779b97f4a7c15ULL;
  /// Panel pairs closer than near_factor * (r_i + r_j) are integrated with sub-quadrature.
  double near_factor = 3.0;

  double exponent() const { return alpha - dim; }
};

/// Throws ValidationError unless 0 < alpha <= 2, alpha < dim, dim >= 2 and M == 1.
void validate(const KernelSpec& spec);

std::string diag_mode_name(DiagMode m);
DiagMode parse_diag_mode(const std::string& s);
nlohmann::json to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

/// |x - y|^(alpha - n); +inf when x == y.
double evaluate(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

// Normalized self-energies: energy of a unit mass spread uniformly over the body.
double segment_self_energy(double s, double length);
double disc_self_energy(double s, double radius);
double ball3_self_energy(double s, double radius);
/// Self-energy of a ball of the given radius in R^n, n in {2, 3}.
double ball_self_energy(int n, double s, double radius);
/// Self-energy of a flat triangle; `corners` holds 3 points of dimension `dim` (2 or 3).
double triangle_self_energy(double s, std::span<const double> corners, int dim);
/// Integral of |x - y|^s over the flat triangle (3 corners in R^3) with respect to area.
double triangle_potential(double s, std::span<const double> corners, std::span<const double> x);
/// Energy of unit masses spread uniformly over the collinear intervals [a,b] and [c,d] (b <= c).
double collinear_pair_energy(double s, double a, double b, double c, double d);
/// Monte-Carlo mean of |x - y|^s over pairs drawn uniformly in a segment (idim 1), disc (2) or ball (3).
double monte_carlo_self_energy(double s, int idim, double measure, std::uint64_t samples, std::uint64_t seed);

/// Pairwise panel interactions for one set. Entry (i, j) is the mutual energy of unit
/// masses spread over panels i and j (the self-energy when i == j).
class PanelKernel {
public:
  /// Subdivision frequency of the flat quadrature on triangular panels (kFlatSub^2 points).
  static constexpr int kFlatSub = 6;

  PanelKernel(KernelSpec spec, std::shared_ptr<const DiscreteSet> set);

  const KernelSpec& spec() const { return spec_; }
  const DiscreteSet& set() const { return *set_; }
  const std::shared_ptr<const DiscreteSet>& set_ptr() const { return set_; }
  /// True when panel self-energies diverge for the set's intrinsic dimension; then every
  /// panel is modelled as a ball of radius cell_radius and off-diagonals are point values.
  bool ball_model() const { return ball_model_; }
  const std::string& diag_note() const { return diag_note_; }

  double self_energy(std::size_t i) const { return diag_[i]; }
  double entry(std::size_t i, std::size_t j) const;
  /// Potential at `x` of a unit mass spread over panel j.
  double probe_entry(std::span<const double> x, std::size_t j) const;
  /// Mean over panel i of the potential of a unit point charge at z.
  double charge_entry(std::span<const double> z, std::size_t i) const;
  /// Mutual energy of panel i of this set and panel j of `other` (same kernel).
  double cross_entry(std::size_t i, const PanelKernel& other, std::size_t j) const;

  /// Quadrature of panel i used for near-field integrals. Triangular panels are treated as flat
  /// triangles through their corners; other panels use the set's sub-points.
  std::size_t quad_count(std::size_t i) const { return q_off_[i + 1] - q_off_[i]; }
  std::span<const double> quad_point(std::size_t i, std::size_t k) const {
    const auto n = static_cast<std::size_t>(spec_.dim);
    return {q_pts_.data() + (q_off_[i] + k) * n, n};
  }
  double quad_weight(std::size_t i, std::size_t k) const { return q_w_[q_off_[i] + k]; }

  /// Mean offset of panel i from its node and second moment about the node.
  std::span<const double> first_moment(std::size_t i) const;
  std::span<const double> second_moment(std::size_t i) const;

private:
  double near_pair(std::size_t i, const PanelKernel& other, std::size_t j) const;
  double far_pair(std::size_t i, const PanelKernel& other, std::size_t j) const;
  double far_probe(std::span<const double> x, std::size_t j) const;

  KernelSpec spec_;
  std::shared_ptr<const DiscreteSet> set_;
  bool ball_model_ = false;
  std::string diag_note_;
  std::vector<double> diag_;
  std::vector<double> m1_;
  std::vector<double> m2_;
  std::vector<double> flat_area_;
  std::vector<std::size_t> q_off_;
  std::vector<double> q_pts_;
  std::vector<double> q_w_;
};

class KernelMatrix {
public:
  KernelMatrix() = default;
  KernelMatrix(std::size_t n, std::vector<double> entries, KernelSpec spec, std::shared_ptr<const DiscreteSet> set,
               std::string diag_note);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const { return a_; }
  const KernelSpec& spec() const { return spec_; }
  const std::shared_ptr<const DiscreteSet>& set_ptr() const { return set_; }
  const std::string& diag_note() const { return diag_note_; }

  /// K w with a fixed ascending summation order per row.
  std::vector<double> apply(std::span<const double> w) const;
  /// w^T K v.
  double quad(std::span<const double> w, std::span<const double> v) const;
  /// Principal submatrix on `indices`, bound to `subset` (which must be those panels).
  KernelMatrix submatrix(std::span<const std::size_t> indices, std::shared_ptr<const DiscreteSet> subset) const;

  /// Raw matrix without a set; used for algebraic QP instances.
  static KernelMatrix from_dense(std::size_t n, std::vector<double> entries);

private:
  std::size_t n_ = 0;
  std::vector<double> a_;
  KernelSpec spec_;
  std::shared_ptr<const DiscreteSet> set_;
  std::string diag_note_;
};

KernelMatrix assemble_matrix(const KernelSpec& spec, std::shared_ptr<const DiscreteSet> set);
KernelMatrix assemble_matrix(const PanelKernel& pk);

/// w^T K v; throws ValidationError on size mismatch.
double mutual_energy(const KernelMatrix& K, std::span<const double> w, std::span<const double> v);

/// U^mu at each probe. A probe equal to a node of mu's set returns the matching entry of K w.
std::vector<double> potential(const KernelSpec& spec, const DiscreteMeasure& mu, std::span<const Point> probes);
std::vector<double> potential(const PanelKernel& pk, std::span<const double> masses, std::span<const Point> probes);
/// U^omega of an external source at the probes (point values; +inf on a charge).
std::vector<double> source_potential(const KernelSpec& spec, const Source& src, std::span<const Point> probes);
/// Panel-averaged U^omega on every panel of pk's set: the linear term of the QPs.
std::vector<double> source_on_panels(const PanelKernel& pk, const Source& src);

/// Smallest and largest eigenvalue of the symmetric matrix (dense solver).
std::pair<double, double> eigen_range(const KernelMatrix& K);

}  // namespace balayage
