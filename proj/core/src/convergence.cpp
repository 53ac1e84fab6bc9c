#include "balayage/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "balayage/balayage.hpp"
#include "balayage/error.hpp"
#include "balayage/gauss.hpp"
#include "balayage/probes.hpp"
#include "balayage/workspace.hpp"
#include "detail/vec.hpp"

namespace balayage {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string stage_label(const DiscreteSet& s, std::size_t k) {
  std::ostringstream os;
  os << "K" << k << ":" << shape_name(s.spec()) << ":N=" << s.size();
  return os.str();
}

std::vector<Point> union_probes(const StageList& stages, const Source& omega) {
  // shells around the largest stage, so every stage sees the same probe points
  const auto& big = *std::max_element(stages.begin(), stages.end(),
                                      [](const auto& a, const auto& b) { return a->size() < b->size(); });
  return probe_points(*big, omega);
}

struct StageSolution {
  std::vector<double> w;
  double mass = 0.0;
  double energy = 0.0;
  double gauss_value = 0.0;
  double c = kNaN;
  std::vector<double> u;
};

ConvergenceReport run(const Source& omega, const StageList& stages, const KernelSpec& spec, const QPOptions& opt,
                      bool increasing, bool gauss) {
  if (stages.empty()) throw ValidationError("convergence: no stages");
  check_nested(stages, increasing);
  ConvergenceReport r;
  r.kind = increasing ? "increasing" : "decreasing";
  r.probes = union_probes(stages, omega);
  const auto bumps = vague_bumps(*stages.front());
  std::vector<StageSolution> sols;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const Workspace ws(spec, stages[k]);
    StageSolution s;
    if (gauss) {
      const auto g = solve_gauss(omega, ws, opt);
      s.w = g.qp.w;
      s.gauss_value = g.w_value;
      s.c = g.c_weighted;
    } else {
      const auto b = sweep(omega, ws, opt);
      s.w = b.qp.w;
      s.gauss_value = b.gauss_value;
    }
    for (double x : s.w) s.mass += x;
    s.energy = ws.matrix().quad(s.w, s.w);
    s.u = ws.potential(s.w, r.probes);
    const DiscreteMeasure mu = ws.measure(s.w);
    std::array<double, kBumpCount> v{};
    for (std::size_t j = 0; j < kBumpCount; ++j) v[j] = integrate(bumps[j], mu);
    r.vague.push_back(v);
    r.measures.push_back(mu);
    r.stage_labels.push_back(stage_label(*stages[k], k));
    r.panels.push_back(stages[k]->size());
    r.masses.push_back(s.mass);
    r.energies.push_back(s.energy);
    r.gauss_values.push_back(s.gauss_value);
    r.constants_c.push_back(s.c);
    sols.push_back(std::move(s));
  }
  // strong distances in the finest stage's matrix
  const std::size_t fine = increasing ? stages.size() - 1 : 0;
  if (stages.size() > 1) {
    const Workspace ws(spec, stages[fine]);
    auto padded = [&](std::size_t k) {
      const auto idx = embed_indices(*stages[k], *stages[fine]);
      std::vector<double> out(ws.size(), 0.0);
      for (std::size_t i = 0; i < idx->size(); ++i) out[(*idx)[i]] = sols[k].w[i];
      return out;
    };
    std::vector<double> prev = padded(0);
    for (std::size_t k = 1; k < stages.size(); ++k) {
      auto cur = padded(k);
      std::vector<double> d(cur.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = cur[i] - prev[i];
      r.distances.push_back(std::sqrt(std::max(0.0, ws.matrix().quad(d, d))));
      prev = std::move(cur);
    }
  }
  r.potential_violations.push_back(0.0);
  for (std::size_t k = 1; k < sols.size(); ++k) {
    double umax = 1.0;
    double worst = 0.0;
    for (std::size_t p = 0; p < r.probes.size(); ++p) {
      umax = std::max({umax, std::abs(sols[k].u[p]), std::abs(sols[k - 1].u[p])});
      const double inc = sols[k].u[p] - sols[k - 1].u[p];
      worst = std::max(worst, increasing ? -inc : inc);
    }
    r.potential_violations.push_back(worst / umax);
  }
  r.vague_mass_estimate = r.vague.back()[kBumpCount - 1];
  r.note = "monotone-net statements are sampled along this one declared sequence of stages";
  return r;
}

}  // namespace

double Bump::operator()(std::span<const double> x) const {
  const double t = detail::distance(x, center) / radius;
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  // smooth transition between the plateau and the edge
  const double u = (t - 0.5) / 0.5;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

std::array<Bump, kBumpCount> vague_bumps(const DiscreteSet& first_stage) {
  const Point c = first_stage.centroid();
  const double base = 2.0 * std::max(first_stage.circumradius(), 1e-3);
  std::array<Bump, kBumpCount> out;
  for (std::size_t k = 0; k < kBumpCount; ++k) out[k] = Bump{c, base * std::ldexp(1.0, static_cast<int>(k))};
  return out;
}

double integrate(const Bump& f, const DiscreteMeasure& mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.masses[i] != 0.0) s += mu.masses[i] * f(mu.set->node(i));
  }
  return s;
}

bool ConvergenceReport::energies_monotone(double slack) const {
  for (std::size_t k = 1; k < energies.size(); ++k) {
    const double step = energies[k] - energies[k - 1];
    if (kind == "increasing" ? step < -slack : step > slack) return false;
  }
  return true;
}

bool ConvergenceReport::distances_strictly_decreasing() const {
  for (std::size_t k = 1; k < distances.size(); ++k) {
    if (!(distances[k] < distances[k - 1])) return false;
  }
  return true;
}

double ConvergenceReport::max_potential_violation() const {
  double m = 0.0;
  for (double v : potential_violations) m = std::max(m, v);
  return m;
}

void check_nested(const StageList& stages, bool increasing) {
  for (const auto& s : stages) {
    if (!s || s->empty()) throw ValidationError("convergence: empty stage");
  }
  for (std::size_t k = 1; k < stages.size(); ++k) {
    const auto& small = increasing ? stages[k - 1] : stages[k];
    const auto& large = increasing ? stages[k] : stages[k - 1];
    if (!embed_indices(*small, *large)) {
      throw ValidationError("convergence: stages are not nested (stage " + std::to_string(k) + ")");
    }
  }
}

ConvergenceReport sweep_exhaustion(const Source& omega, const StageList& stages, const KernelSpec& spec,
                                   const QPOptions& opt) {
  return run(omega, stages, spec, opt, true, false);
}

ConvergenceReport sweep_decreasing(const Source& omega, const StageList& stages, const KernelSpec& spec,
                                   const QPOptions& opt, std::shared_ptr<const DiscreteSet> limit) {
  auto r = run(omega, stages, spec, opt, false, false);
  if (limit) {
    const Workspace lw(spec, limit);
    const auto direct = sweep(omega, lw, opt);
    const DiscreteMeasure& last = r.measures.back();
    const Workspace last_ws(spec, last.set);
    const double bb = direct.energy_swept;
    if (const auto idx = embed_indices(*limit, *last.set)) {
      std::vector<double> d = last.masses;
      for (std::size_t j = 0; j < idx->size(); ++j) d[(*idx)[j]] -= direct.qp.w[j];
      r.limit_distance = std::sqrt(std::max(0.0, last_ws.matrix().quad(d, d))) / std::sqrt(bb);
      r.limit_energy_gap = std::sqrt(std::max(0.0, r.energies.back() - bb) / bb);
    } else {
      // ||a - b||^2 = a^T K_aa a - 2 a^T K_ab b + b^T K_bb b with cross panel-pair energies
      double cross = 0.0;
      for (std::size_t i = 0; i < last.size(); ++i) {
        if (last.masses[i] == 0.0) continue;
        for (std::size_t j = 0; j < lw.size(); ++j) {
          if (direct.qp.w[j] != 0.0) {
            cross += last.masses[i] * last_ws.kernel().cross_entry(i, lw.kernel(), j) * direct.qp.w[j];
          }
        }
      }
      const double aa = last_ws.matrix().quad(last.masses, last.masses);
      r.limit_distance = std::sqrt(std::max(0.0, aa - 2.0 * cross + bb)) / std::sqrt(bb);
    }
  }
  return r;
}

ConvergenceReport gauss_exhaustion(const Source& omega, const StageList& stages, const KernelSpec& spec,
                                   const QPOptions& opt) {
  return run(omega, stages, spec, opt, true, true);
}

std::string tidy_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "stage,label,panels,mass,energy,gauss_value,c,distance_to_next,potential_violation";
  for (std::size_t j = 0; j < kBumpCount; ++j) os << ",bump" << j;
  os << "\n";
  for (std::size_t k = 0; k < r.masses.size(); ++k) {
    os << k << "," << r.stage_labels[k] << "," << r.panels[k] << "," << fmt(r.masses[k]) << "," << fmt(r.energies[k])
       << "," << fmt(r.gauss_values[k]) << "," << fmt(r.constants_c[k]) << ","
       << (k < r.distances.size() ? fmt(r.distances[k]) : std::string("nan")) << ","
       << fmt(r.potential_violations[k]);
    for (double v : r.vague[k]) os << "," << fmt(v);
    os << "\n";
  }
  return os.str();
}

}  // namespace balayage
