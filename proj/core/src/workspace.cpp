#include "balayage/workspace.hpp"

#include "balayage/error.hpp"

namespace balayage {

Workspace::Workspace(const KernelSpec& spec, std::shared_ptr<const DiscreteSet> set)
    : kernel_(spec, std::move(set)), matrix_(assemble_matrix(kernel_)) {}

std::vector<double> Workspace::linear_term(const Source& omega) const {
  validate(omega);
  if (dimension(omega) != set().dim()) throw ValidationError("source dimension does not match the target set");
  if (const auto* mu = std::get_if<DiscreteMeasure>(&omega)) {
    if (mu->set == set_ptr() || mu->set->fingerprint() == set().fingerprint()) return matrix_.apply(mu->masses);
    // target panels taken from the source's set: reuse the source set's rows so both sides share entries
    if (const auto idx = embed_indices(set(), *mu->set)) {
      bool same_cells = true;
      for (std::size_t i = 0; i < idx->size(); ++i) {
        const std::size_t j = (*idx)[i];
        same_cells = same_cells && set().cell_measure(i) == mu->set->cell_measure(j) &&
                     set().cell_radius(i) == mu->set->cell_radius(j) && set().kind(i) == mu->set->kind(j);
      }
      if (same_cells) {
        const PanelKernel src(spec(), mu->set);
        std::vector<double> b(idx->size(), 0.0);
        for (std::size_t i = 0; i < idx->size(); ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < mu->size(); ++j) s += src.entry((*idx)[i], j) * mu->masses[j];
          b[i] = s;
        }
        return b;
      }
    }
  }
  return source_on_panels(kernel_, omega);
}

std::vector<double> Workspace::potential(std::span<const double> masses, std::span<const Point> probes) const {
  return balayage::potential(kernel_, masses, probes);
}

}  // namespace balayage
