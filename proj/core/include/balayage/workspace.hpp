#pragma once

// A panel set together with its kernel and assembled energy matrix.

#include <memory>
#include <span>
#include <vector>

#include "balayage/kernel.hpp"
#include "balayage/measure.hpp"

namespace balayage {

class Workspace {
public:
  Workspace(const KernelSpec& spec, std::shared_ptr<const DiscreteSet> set);

  const KernelSpec& spec() const { return kernel_.spec(); }
  const DiscreteSet& set() const { return kernel_.set(); }
  const std::shared_ptr<const DiscreteSet>& set_ptr() const { return kernel_.set_ptr(); }
  const PanelKernel& kernel() const { return kernel_; }
  const KernelMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return matrix_.size(); }

  /// Panel-averaged U^omega on every panel (the linear term b of the QPs).
  std::vector<double> linear_term(const Source& omega) const;
  /// U^mu at arbitrary points for masses on this set.
  std::vector<double> potential(std::span<const double> masses, std::span<const Point> probes) const;
  DiscreteMeasure measure(std::vector<double> masses) const { return {set_ptr(), std::move(masses)}; }

private:
  PanelKernel kernel_;
  KernelMatrix matrix_;
};

}  // namespace balayage
