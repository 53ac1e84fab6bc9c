// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
//
//   balayage_acceptance [--only 2,7]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "balayage/balayage.hpp"
#include "balayage/convergence.hpp"
#include "balayage/equilibrium.hpp"
#include "balayage/gauss.hpp"
#include "balayage/geometry.hpp"
#include "balayage/kernel.hpp"
#include "balayage/oracle.hpp"
#include "balayage/qp.hpp"
#include "balayage/workspace.hpp"

using namespace balayage;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

KernelSpec riesz(double alpha, int dim) {
  KernelSpec k;
  k.alpha = alpha;
  k.dim = dim;
  k.diag_mode = DiagMode::equivalent_disc;
  return k;
}

std::shared_ptr<const DiscreteSet> unit_sphere(int res) {
  return std::make_shared<const DiscreteSet>(discretize(SetSpec{Sphere{{0.0, 0.0, 0.0}, 1.0}}, res));
}

Source charge(Point at, double mass) { return Source{std::vector<PointCharge>{{std::move(at), mass}}}; }

const Point kZ{0.0, 0.0, 2.0};

// 1. cone and simplex solvers against support enumeration
Outcome c1() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const QPOptions opt;
  double worst_obj = 0.0;
  double worst_sol = 0.0;
  int converged = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<double> a(n * n);
    for (double& x : a) x = u(rng);
    std::vector<double> k(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = i == j ? 0.1 : 0.0;
        for (std::size_t m = 0; m < n; ++m) s += a[i * n + m] * a[j * n + m];
        k[i * n + j] = s;
      }
    const auto K = KernelMatrix::from_dense(n, k);
    std::vector<double> b(n);
    for (double& x : b) x = u(rng);
    for (Constraint c : {Constraint::nonneg_cone, Constraint::simplex}) {
      const auto s = solve(K, b, c, opt);
      const auto ref = brute_force(K, b, c);
      converged += s.converged ? 1 : 0;
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d2 += (s.w[i] - ref.w[i]) * (s.w[i] - ref.w[i]);
      worst_obj = std::max(worst_obj, std::abs(s.objective - ref.objective));
      worst_sol = std::max(worst_sol, std::sqrt(d2));
    }
  }
  o.detail << "200 solves, converged " << converged << ", max objective gap " << g(worst_obj) << " (<= " << g(10 * opt.tol)
           << "), max solution gap " << g(worst_sol) << " (<= " << g(100 * opt.tol) << ")";
  o.require(converged == 200, "convergence");
  o.require(worst_obj <= 10 * opt.tol, "objective gap");
  o.require(worst_sol <= 100 * opt.tol, "solution gap");
  return o;
}

// 2. swept mass of a unit charge at distance 2 onto the unit sphere
Outcome c2() {
  Outcome o;
  const auto ref = newtonian_ball_sweep_mass(1.0, 2.0, 3);
  std::vector<std::pair<double, double>> series;
  std::size_t n500 = 0;
  double m500 = 0.0;
  for (int res : {3, 5, 10}) {
    const auto s = sweep(charge(kZ, 1.0), unit_sphere(res), riesz(2.0, 3));
    series.emplace_back(res, s.swept_mass);
    if (res == 5) {
      n500 = s.swept.size();
      m500 = s.swept_mass;
    }
    o.detail << "N=" << s.swept.size() << " mass " << g(s.swept_mass) << "; ";
  }
  const auto ex = refinement_extrapolate(series, "swept_mass");
  const double rel = std::abs(m500 - ref.value) / ref.value;
  o.detail << "relative error at N=" << n500 << " " << g(rel) << ", extrapolated " << g(ex.value) << " +- "
           << g(ex.uncertainty) << " vs " << g(ref.value);
  o.require(n500 >= 500 && rel <= 0.02, "2% at >= 500 panels");
  o.require(std::abs(ex.value - ref.value) <= ex.uncertainty, "extrapolation within its uncertainty");
  return o;
}

// 3. capacity, equilibrium density and Frostman bound of the unit sphere
Outcome c3() {
  Outcome o;
  const Workspace ws(riesz(2.0, 3), unit_sphere(8));
  const auto e = equilibrium_measure(ws);
  o.detail << "N=" << ws.size() << " capacity " << g(e.capacity) << ", density max/min " << g(e.density_ratio)
           << ", Frostman excess " << g(e.frostman_excess);
  o.require(ws.size() >= 500 && std::abs(e.capacity - 1.0) <= 0.02, "capacity");
  o.require(e.density_ratio < 1.02, "density uniformity");
  o.require(e.frostman_excess <= 1e-3, "Frostman excess");
  return o;
}

// 4. characterizations on spheres and segments for alpha 1 and 2
Outcome c4() {
  Outcome o;
  struct Case {
    std::string name;
    SetSpec spec;
    int res;
    double alpha;
    Point z;
  };
  const std::vector<Case> cases = {
      {"sphere a=2", SetSpec{Sphere{{0, 0, 0}, 1.0}}, 5, 2.0, kZ},
      {"sphere a=1", SetSpec{Sphere{{0, 0, 0}, 1.0}}, 5, 1.0, kZ},
      {"segment a=2", SetSpec{Segment{{0, 0, 0}, {1, 0, 0}}}, 64, 2.0, {0.5, 0.5, 0.0}},
      {"segment a=1", SetSpec{Segment{{0, 0, 0}, {1, 0, 0}}}, 64, 1.0, {0.5, 0.5, 0.0}},
  };
  const char* rows[] = {"potential_match", "domination", "energy_identity", "symmetry", "mass_bound"};
  std::uint64_t seed = 7;
  for (const auto& c : cases) {
    const Workspace ws(riesz(c.alpha, 3), std::make_shared<const DiscreteSet>(discretize(c.spec, c.res)));
    const Source omega = charge(c.z, 1.0);
    const auto r = sweep(omega, ws);
    const auto rep = verify_characterizations(r, ws, omega, seed++);
    o.detail << c.name << " (N=" << ws.size() << "):";
    for (const char* row : rows) {
      const Check* ck = rep.find(row);
      o.detail << " " << row << "=" << g(ck->value);
      o.require(ck->passed, c.name + " " + row);
    }
    o.detail << "; ";
  }
  return o;
}

// 5. balayage with a rest on the upper hemisphere
Outcome c5() {
  Outcome o;
  const auto sphere = unit_sphere(5);
  const auto half = std::make_shared<const DiscreteSet>(restrict(*sphere, SetSpec{HalfSpace{{0, 0, 0}, {0, 0, 1}}}));
  const Workspace outer(riesz(2.0, 3), sphere);
  const Workspace inner(riesz(2.0, 3), half);
  const auto r = sweep_with_rest(charge(kZ, 1.0), outer, inner);
  o.detail << "N=" << outer.size() << "/" << inner.size() << " relative distance " << g(r.relative_distance)
           << ", masses direct " << g(r.mass_direct) << " two-step " << g(r.mass_two_step);
  o.require(r.relative_distance <= 1e-3, "relative distance");
  return o;
}

// 6. sign of the weighted equilibrium constant for swept masses 0.5, 1, 1.5
Outcome c6() {
  Outcome o;
  const Workspace ws(riesz(2.0, 3), unit_sphere(5));
  double c_pos = 0.0;
  double c_zero = 0.0;
  for (double q : {1.0, 2.0, 3.0}) {
    const auto gr = solve_gauss(charge(kZ, q), ws);
    const double closed = q * 0.5;
    o.detail << "closed-form swept mass " << g(closed) << ": discrete " << g(gr.swept_mass) << ", c " << g(gr.c_weighted)
             << "; ";
    if (closed < 1.0) {
      c_pos = gr.c_weighted;
      o.require(gr.c_weighted > 0.0 && gr.swept_mass < 1.0, "positive case");
    } else if (closed > 1.0) {
      o.require(gr.c_weighted < 0.0 && gr.swept_mass > 1.0, "negative case");
    } else {
      c_zero = gr.c_weighted;
      const double sm = gr.swept_mass;
      o.require(std::abs(sm - 1.0) < 1e-9 || (gr.c_weighted > 0.0) == (sm < 1.0), "zero case sign");
    }
  }
  o.detail << "|c_zero| / c_pos = " << g(std::abs(c_zero) / c_pos);
  o.require(std::abs(c_zero) <= 0.05 * c_pos, "zero case within 5%");
  return o;
}

// 7. representation formula, and its distance to the closed forms at two resolutions
Outcome c7() {
  Outcome o;
  std::vector<double> closed_err;
  for (int res : {5, 10}) {
    const Workspace ws(riesz(2.0, 3), unit_sphere(res));
    const Source omega = charge(kZ, 1.0);
    const auto gr = solve_gauss(omega, ws);
    const auto e = equilibrium_measure(ws);
    const auto rep = representation_check(gr, gr.companion, e, ws, 0.05);
    // closed form: c = (1 - 1/2) / 1, density (|z|^2 - 1) / (4 pi |x - z|^3) + c / (4 pi)
    const Point center{0, 0, 0};
    double l1 = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const double dens = newtonian_sweep_density(1.0, center, kZ, ws.set().node(i)) + 0.5 * newtonian_equilibrium_density(1.0);
      l1 += std::abs(gr.qp.w[i] - dens * ws.set().cell_measure(i));
    }
    const double c_err = std::abs(gr.c_weighted - 0.5) / 0.5;
    closed_err.push_back(std::max(l1, c_err));
    o.detail << "N=" << ws.size() << ": distance " << g(rep.relative_distance) << " c_gap " << g(rep.c_gap)
             << " closed-form c error " << g(c_err) << " density L1 error " << g(l1) << "; ";
    o.require(rep.applicable && rep.relative_distance <= 0.05 && rep.c_gap <= 0.05, "representation at N=" + std::to_string(ws.size()));
    o.require(c_err <= 0.05, "closed-form c at N=" + std::to_string(ws.size()));
  }
  o.detail << "residual ratio " << g(closed_err[0] / closed_err[1]);
  o.require(closed_err[1] <= 0.5 * closed_err[0], "halving under refinement");
  return o;
}

// 8. lambda against seeded members of its class
Outcome c8() {
  Outcome o;
  const Workspace ws(riesz(2.0, 3), unit_sphere(5));
  const auto gr = solve_gauss(charge(kZ, 1.0), ws);
  const auto rep = lambda_class_extremality(gr, ws, 11);
  std::size_t members = 0;
  std::size_t failed = 0;
  for (const auto& c : rep.checks) {
    if (c.name.rfind("member", 0) == 0 && c.name.find(".mass") != std::string::npos) ++members;
    if (!c.passed) {
      ++failed;
      o.detail << c.name << "=" << g(c.value) << " ";
    }
  }
  o.detail << members << " members, " << failed << " failed rows";
  o.require(members == 10 && rep.passed(), "extremality rows");
  return o;
}

// Half-line x >= 1 on the first axis of R^2, truncated at doubling radii.
StageList half_line_stages(std::vector<double> radii, int res) {
  const auto sets = exhaustion(Ray{{1.0, 0.0}, {1.0, 0.0}}, radii, res);
  StageList out;
  for (const auto& s : sets) out.push_back(std::make_shared<const DiscreteSet>(s));
  return out;
}

const std::vector<double> kRadii{2.0, 4.0, 8.0, 16.0, 32.0};
constexpr int kLineRes = 8;
constexpr double kLineAlpha = 1.5;
constexpr double kPotentialTol = 1e-3;

// 9. increasing exhaustion of a half-line
Outcome c9() {
  Outcome o;
  const auto stages = half_line_stages(kRadii, kLineRes);
  const auto spec = riesz(kLineAlpha, 2);
  const auto r = sweep_exhaustion(charge({0.0, 0.0}, 1.0), stages, spec);
  o.detail << "masses";
  for (double m : r.masses) o.detail << " " << g(m);
  o.detail << "; distances";
  for (double d : r.distances) o.detail << " " << g(d);
  o.detail << "; max potential decrease " << g(r.max_potential_violation());
  o.require(r.masses.size() >= 4, ">= 4 stages");
  o.require(r.max_potential_violation() <= kPotentialTol, "potential increments");
  o.require(r.energies_monotone(1e-8), "energies non-decreasing");
  o.require(r.distances_strictly_decreasing(), "distances strictly decreasing");
  const auto gr = gauss_exhaustion(charge({0.0, 0.0}, 0.5), stages, spec);
  bool hyp = true;
  for (const auto& m : sweep_exhaustion(charge({0.0, 0.0}, 0.5), stages, spec).masses) hyp = hyp && m <= 1.0;
  bool mono = true;
  for (std::size_t k = 1; k < gr.constants_c.size(); ++k) mono = mono && gr.constants_c[k] <= gr.constants_c[k - 1] + 1e-8;
  o.detail << "; c";
  for (double c : gr.constants_c) o.detail << " " << g(c);
  o.require(hyp && mono, "c non-increasing under swept mass <= 1");
  return o;
}

// 10. the unit sphere plus a cap of a larger sphere that shrinks away, on the side opposite the charge
Outcome c10() {
  Outcome o;
  const std::vector<double> cuts{0.0, 0.6, 0.9, 1.0, 1.05, 1.08};
  const int res = 5;
  const SetSpec unit{Sphere{{0, 0, 0}, 1.0}};
  const DiscreteSet full = discretize(SetSpec{Union{{unit, SetSpec{Sphere{{0, 0, 0}, 1.1}}}}}, res);
  StageList stages;
  for (double t : cuts) {
    const SetSpec ps{Union{{unit, SetSpec{HalfSpace{{0, 0, -t}, {0, 0, -1}}}}}};
    stages.push_back(std::make_shared<const DiscreteSet>(full.subset(restrict_indices(full, ps), ps)));
  }
  const auto limit = unit_sphere(res);
  const auto r = sweep_decreasing(charge(kZ, 1.0), stages, riesz(2.0, 3), {}, limit);
  o.detail << "panels";
  for (auto n : r.panels) o.detail << " " << n;
  o.detail << "; masses";
  for (double m : r.masses) o.detail << " " << g(m);
  o.detail << "; max potential increase " << g(r.max_potential_violation()) << "; limit distance "
           << g(r.limit_distance.value_or(NAN)) << " (energy gap " << g(r.limit_energy_gap.value_or(NAN)) << ")";
  o.require(r.max_potential_violation() <= kPotentialTol, "potentials non-increasing");
  o.require(r.panels.back() > limit->size(), "final stage differs from the limit");
  o.require(r.limit_distance && *r.limit_distance <= 1e-2, "limit distance");
  o.require(r.limit_energy_gap && *r.limit_energy_gap <= 1e-2, "energy-gap distance");
  return o;
}

// 11. mass escape along an exhaustion of infinite capacity with swept mass below 1
Outcome c11() {
  Outcome o;
  const auto stages = half_line_stages({2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}, 4);
  const auto r = gauss_exhaustion(charge({0.0, 0.0}, 0.5), stages, riesz(kLineAlpha, 2));
  const auto s = sweep_exhaustion(charge({0.0, 0.0}, 0.5), stages, riesz(kLineAlpha, 2));
  o.detail << "final swept mass " << g(s.masses.back()) << "; largest-bump integrals";
  for (const auto& v : r.vague) o.detail << " " << g(v.back());
  o.detail << "; estimate " << g(r.vague_mass_estimate);
  o.require(s.masses.back() < 1.0, "swept mass below 1");
  o.require(r.vague_mass_estimate < 1.0 - 1e-2, "vague mass estimate");
  return o;
}

// 12. outer mass beyond a fixed shell for swept mass above 1, against the unit contrast.
// Stages [1 + 2^-k, 2^(k+2)] fill in toward the charge while extending outward; one-sided
// truncations [1, R] freeze lambda as soon as they contain its support.
Outcome c12() {
  Outcome o;
  const auto full = exhaustion(Ray{{1.0, 0.0}, {1.0, 0.0}}, std::vector<double>{128.0}, kLineRes).front();
  StageList stages;
  for (int k = 1; k <= 5; ++k) {
    const SetSpec box{Box{{1.0 + std::ldexp(1.0, -k), -0.1}, {std::ldexp(1.0, k + 2), 0.1}}};
    stages.push_back(std::make_shared<const DiscreteSet>(full.subset(restrict_indices(full, box), box)));
  }
  const double shell = 6.0;
  const auto heavy = support_compactness_probe(charge({0.0, 0.0}, 3.0), stages, riesz(kLineAlpha, 2), shell);
  const auto unit = support_compactness_probe(charge({0.0, 0.0}, 1.0), stages, riesz(kLineAlpha, 2), shell);
  o.detail << "shell " << g(shell) << "; outer fraction (mass 3)";
  for (double f : heavy.outer_fraction) o.detail << " " << g(f);
  o.detail << "; (mass 1)";
  for (double f : unit.outer_fraction) o.detail << " " << g(f);
  o.require(heavy.swept_mass.back() > 1.0, "swept mass above 1");
  o.require(heavy.decreasing, "heavy run decreasing");
  o.require(!unit.decreasing, "contrast run not decreasing");
  return o;
}

// 13. repeated command-line runs write byte-identical artifacts
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome c13() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> runs{{"discretize", "sphere_sweep"},
                                                              {"sweep", "sphere_sweep"},
                                                              {"equilibrium", "sphere_sweep"},
                                                              {"gauss", "sphere_sweep"},
                                                              {"verify", "trichotomy"},
                                                              {"converge-up", "half_line_exhaustion"},
                                                              {"converge-down", "decreasing_cap"}};
  const fs::path root = fs::temp_directory_path() / "balayage-determinism";
  fs::remove_all(root);
  std::size_t files = 0;
  for (const auto& [cmd, scenario] : runs) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (cmd + "-" + std::to_string(rep));
      const std::string line = std::string("\"") + BALAYAGE_CLI + "\" " + cmd + " --quiet --config \"" +
                               BALAYAGE_SCENARIOS + "/" + scenario + ".json\" --out \"" + dir.string() + "\"";
      const int rc = std::system(line.c_str());
      o.require(rc == 0, cmd + " exit status");
      dirs.push_back(dir);
    }
    std::set<std::string> names;
    for (const auto& d : dirs) {
      if (!fs::exists(d)) continue;
      for (const auto& e : fs::directory_iterator(d)) names.insert(e.path().filename().string());
    }
    o.require(!names.empty(), cmd + " wrote artifacts");
    for (const auto& n : names) {
      ++files;
      o.require(fs::exists(dirs[0] / n) && fs::exists(dirs[1] / n) && slurp(dirs[0] / n) == slurp(dirs[1] / n),
                cmd + "/" + n + " identical");
    }
  }
  o.detail << runs.size() << " commands, " << files << " artifacts compared byte for byte";
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int a = 1; a + 1 < argc; ++a) {
    if (std::string(argv[a]) == "--only") {
      std::stringstream ss(argv[a + 1]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"solver-oracle equivalence", c1},   {"Newtonian sweep mass", c2},      {"Newtonian capacity", c3},
      {"characterization suite", c4},      {"balayage with a rest", c5},      {"trichotomy", c6},
      {"representation formula", c7},      {"class extremality", c8},         {"monotone exhaustion", c9},
      {"decreasing sequence", c10},        {"non-existence exhibit", c11},    {"compact-support probe", c12},
      {"determinism", c13},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[k].first << ": " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
