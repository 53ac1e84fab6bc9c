#include "balayage/measure.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "balayage/error.hpp"
#include "balayage/kernel.hpp"

namespace balayage {

DiscreteMeasure::DiscreteMeasure(std::shared_ptr<const DiscreteSet> s, std::vector<double> m)
    : set(std::move(s)), masses(std::move(m)) {
  if (!set) throw ValidationError("measure: null set");
  if (masses.size() != set->size()) throw ValidationError("measure: mass vector does not match the set size");
  for (double v : masses) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("measure: masses must be finite and nonnegative");
  }
}

void validate(const PointCharge& q) {
  for (double v : q.location) {
    if (!std::isfinite(v)) throw ValidationError("source: charge location must be finite");
  }
  if (!(q.mass > 0.0) || !std::isfinite(q.mass)) throw ValidationError("source: charge mass must be positive");
}

void validate(const Source& src) {
  if (const auto* charges = std::get_if<std::vector<PointCharge>>(&src)) {
    if (charges->empty()) throw ValidationError("source: omega must be nonzero (no charges given)");
    const std::size_t d = charges->front().location.size();
    for (const auto& q : *charges) {
      validate(q);
      if (q.location.size() != d) throw ValidationError("source: charges have different dimensions");
    }
    return;
  }
  const auto& mu = std::get<DiscreteMeasure>(src);
  if (!mu.set || mu.masses.size() != mu.set->size()) throw ValidationError("source: malformed measure");
  if (!(total_mass(mu) > 0.0)) throw ValidationError("source: omega must be nonzero");
}

int dimension(const Source& src) {
  if (const auto* charges = std::get_if<std::vector<PointCharge>>(&src)) {
    return charges->empty() ? 0 : static_cast<int>(charges->front().location.size());
  }
  const auto& mu = std::get<DiscreteMeasure>(src);
  return mu.set ? mu.set->dim() : 0;
}

double source_mass(const Source& src) {
  if (const auto* charges = std::get_if<std::vector<PointCharge>>(&src)) {
    double m = 0.0;
    for (const auto& q : *charges) m += q.mass;
    return m;
  }
  return total_mass(std::get<DiscreteMeasure>(src));
}

Source scaled(const Source& src, double factor) {
  if (!(factor > 0.0)) throw ValidationError("source: scale factor must be positive");
  if (const auto* charges = std::get_if<std::vector<PointCharge>>(&src)) {
    auto out = *charges;
    for (auto& q : out) q.mass *= factor;
    return out;
  }
  DiscreteMeasure mu = std::get<DiscreteMeasure>(src);
  for (double& v : mu.masses) v *= factor;
  return mu;
}

DiscreteMeasure uniform_measure(std::shared_ptr<const DiscreteSet> set, double mass) {
  if (!set || set->empty()) throw ValidationError("measure: uniform measure needs a nonempty set");
  const double total = set->total_measure();
  std::vector<double> m(set->size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = mass * set->cell_measure(i) / total;
  return DiscreteMeasure(std::move(set), std::move(m));
}

double total_mass(const DiscreteMeasure& mu) {
  double s = 0.0;
  for (double v : mu.masses) s += v;
  return s;
}

double norm_distance(const KernelMatrix& K, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.size() != K.size() || nu.size() != K.size()) {
    throw ValidationError("norm_distance: measures do not live on the matrix's set");
  }
  if (K.set_ptr() && ((mu.set && mu.set->fingerprint() != K.set_ptr()->fingerprint()) ||
                      (nu.set && nu.set->fingerprint() != K.set_ptr()->fingerprint()))) {
    throw ValidationError("norm_distance: measures do not live on the matrix's set");
  }
  std::vector<double> d(K.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = mu.masses[i] - nu.masses[i];
  return std::sqrt(std::max(0.0, K.quad(d, d)));
}

double energy_norm(const KernelMatrix& K, const DiscreteMeasure& mu) {
  if (mu.size() != K.size()) throw ValidationError("energy_norm: measure does not live on the matrix's set");
  return std::sqrt(std::max(0.0, K.quad(mu.masses, mu.masses)));
}

DiscreteMeasure restrict_measure(const DiscreteMeasure& mu, std::span<const std::size_t> indices) {
  std::vector<double> m(mu.size(), 0.0);
  for (std::size_t i : indices) {
    if (i >= mu.size()) throw ValidationError("restrict_measure: index out of range");
    m[i] = mu.masses[i];
  }
  DiscreteMeasure out;
  out.set = mu.set;
  out.masses = std::move(m);
  return out;
}

DiscreteMeasure embed_measure(const DiscreteMeasure& mu, std::shared_ptr<const DiscreteSet> outer,
                              std::span<const std::size_t> index_in_outer) {
  if (!outer) throw ValidationError("embed_measure: null set");
  if (index_in_outer.size() != mu.size()) throw ValidationError("embed_measure: index map does not match measure");
  std::vector<double> m(outer->size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (index_in_outer[i] >= m.size()) throw ValidationError("embed_measure: index out of range");
    m[index_in_outer[i]] = mu.masses[i];
  }
  return DiscreteMeasure(std::move(outer), std::move(m));
}

std::string measure_csv(const DiscreteMeasure& mu) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mu.set ? mu.set->fingerprint() : 0ULL));
  os << "# set_fingerprint=" << buf << "\n";
  const int dim = mu.set ? mu.set->dim() : 0;
  for (int d = 0; d < dim; ++d) os << "x" << d << ",";
  os << "mass\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto nd = mu.set->node(i);
    for (double v : nd) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", mu.masses[i]);
    os << buf;
  }
  return os.str();
}

DiscreteMeasure read_measure_csv(const std::string& text, std::shared_ptr<const DiscreteSet> set) {
  if (!set) throw ValidationError("measure csv: null set");
  std::istringstream in(text);
  std::string line;
  std::vector<double> masses;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("set_fingerprint=");
      if (pos != std::string::npos) {
        const auto fp = std::stoull(line.substr(pos + 16), nullptr, 16);
        if (fp != set->fingerprint()) throw ValidationError("measure csv: set fingerprint does not match");
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto comma = line.rfind(',');
    const std::string last = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      masses.push_back(std::stod(last));
    } catch (const std::exception&) {
      throw ValidationError("measure csv: bad mass on line " + std::to_string(lineno));
    }
  }
  return DiscreteMeasure(std::move(set), std::move(masses));
}

}  // namespace balayage
