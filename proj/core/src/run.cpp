#include "balayage/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "balayage/balayage.hpp"
#include "balayage/convergence.hpp"
#include "balayage/equilibrium.hpp"
#include "balayage/gauss.hpp"
#include "balayage/oracle.hpp"
#include "balayage/workspace.hpp"
#include "detail/json_num.hpp"
#include "detail/vec.hpp"

#ifndef BALAYAGE_VERSION_STRING
#define BALAYAGE_VERSION_STRING "0.0.0"
#endif

namespace balayage {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using detail::json_number;

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::discretize, "discretize"},   {Command::sweep, "sweep"},
    {Command::equilibrium, "equilibrium"}, {Command::gauss, "gauss"},
    {Command::converge_up, "converge-up"}, {Command::converge_down, "converge-down"},
    {Command::verify, "verify"},
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json number_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

json qp_json(const QPSolution& s) {
  return {{"objective", json_number(s.objective)},
          {"kkt_stationarity", json_number(s.kkt_stationarity)},
          {"kkt_complementarity", json_number(s.kkt_complementarity)},
          {"natural_residual", json_number(s.natural_residual)},
          {"multiplier_c", json_number(s.multiplier_c)},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"status", s.status}};
}

json set_json(const DiscreteSet& set) {
  return {{"shape", shape_name(set.spec())},
          {"spec", to_json(set.spec())},
          {"dim", set.dim()},
          {"resolution", set.resolution()},
          {"panels", set.size()},
          {"total_measure", set.total_measure()},
          {"fingerprint", hex(set.fingerprint())}};
}

json balayage_json(const BalayageResult& r) {
  return {{"source_mass", json_number(r.source_mass)},
          {"swept_mass", json_number(r.swept_mass)},
          {"energy_swept", json_number(r.energy_swept)},
          {"mutual_energy_source", json_number(r.mutual_energy_source)},
          {"potential_match_residual", json_number(r.potential_match_residual)},
          {"domination_residual", json_number(r.domination_residual)},
          {"gauss_value", json_number(r.gauss_value)},
          {"probes", r.probes.size()},
          {"set_fingerprint", hex(r.swept.set->fingerprint())},
          {"qp", qp_json(r.qp)}};
}

json equilibrium_json(const EquilibriumResult& e) {
  return {{"capacity", json_number(e.capacity)},
          {"energy", json_number(e.energy)},
          {"potential_residual", json_number(e.potential_residual)},
          {"frostman_excess", json_number(e.frostman_excess)},
          {"density_ratio", json_number(e.density_ratio)},
          {"probes", e.probes.size()},
          {"qp", qp_json(e.qp)}};
}

json gauss_json(const GaussResult& g) {
  return {{"c_weighted", json_number(g.c_weighted)},
          {"w_value", json_number(g.w_value)},
          {"weighted_potential_residual", json_number(g.weighted_potential_residual)},
          {"lower_bound_residual", json_number(g.lower_bound_residual)},
          {"swept_mass", json_number(g.swept_mass)},
          {"cone_value", json_number(g.cone_value)},
          {"solvable", g.solvable},
          {"lambda_mass", json_number(total_mass(g.lambda))},
          {"qp", qp_json(g.qp)},
          {"companion",
           {{"command", "sweep"},
            {"set_fingerprint", hex(g.companion.swept.set->fingerprint())},
            {"swept_mass", json_number(g.companion.swept_mass)},
            {"gauss_value", json_number(g.companion.gauss_value)},
            {"qp_status", g.companion.qp.status}}}};
}

json convergence_json(const ConvergenceReport& r) {
  json vague = json::array();
  for (const auto& v : r.vague) vague.push_back(number_list({v.begin(), v.end()}));
  json j{{"kind", r.kind},
         {"stage_labels", r.stage_labels},
         {"panels", r.panels},
         {"masses", number_list(r.masses)},
         {"energies", number_list(r.energies)},
         {"gauss_values", number_list(r.gauss_values)},
         {"constants_c", number_list(r.constants_c)},
         {"distances", number_list(r.distances)},
         {"potential_violations", number_list(r.potential_violations)},
         {"vague", vague},
         {"vague_mass_estimate", json_number(r.vague_mass_estimate)},
         {"probes", r.probes.size()},
         {"note", r.note}};
  j["limit_distance"] = r.limit_distance ? json_number(*r.limit_distance) : json(nullptr);
  j["limit_energy_gap"] = r.limit_energy_gap ? json_number(*r.limit_energy_gap) : json(nullptr);
  j["limit_set_fingerprint"] = hex(r.measures.back().set->fingerprint());
  return j;
}

std::string checks_csv(const Report& r) {
  std::ostringstream os;
  os << "name,value,threshold,passed\n";
  for (const auto& c : r.checks) {
    os << c.name << "," << fmt(c.value) << "," << fmt(c.threshold) << "," << (c.passed ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string panels_txt(const DiscreteSet& set) {
  std::ostringstream os;
  os << "# set_fingerprint=" << hex(set.fingerprint()) << "\n# ";
  for (int d = 0; d < set.dim(); ++d) os << "x" << d << " ";
  os << "cell_measure cell_radius\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (double x : set.node(i)) os << fmt(x) << " ";
    os << fmt(set.cell_measure(i)) << " " << fmt(set.cell_radius(i)) << "\n";
  }
  return os.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Artifacts {
public:
  explicit Artifacts(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
  }
  void write(const std::string& name, const std::string& text) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + (dir_ / name).string() + "'");
    out << text;
    files_.push_back(name);
  }
  void write(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  const std::vector<std::string>& files() const { return files_; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const RunConfig& cfg;
  QPOptions opt;
  json header;
};

std::shared_ptr<const DiscreteSet> target_set(const RunConfig& cfg) {
  if (!cfg.geometry) throw ValidationError("geometry: required by this command");
  return std::make_shared<const DiscreteSet>(discretize(*cfg.geometry, cfg.resolution));
}

Source make_source(const RunConfig& cfg) {
  const auto& s = cfg.source;
  if (s.measure_file) {
    auto set = std::make_shared<const DiscreteSet>(discretize(*s.measure_geometry, s.measure_resolution));
    return Source{read_measure_csv(slurp(*s.measure_file), set)};
  }
  if (s.charges.empty()) throw ValidationError("source: required by this command");
  return Source{s.charges};
}

StageList increasing_stages(const RunConfig& cfg) {
  if (!cfg.exhaustion) throw ValidationError("exhaustion: required by converge-up");
  const auto& e = *cfg.exhaustion;
  const int res = e.resolution > 0 ? e.resolution : cfg.resolution;
  StageList out;
  if (e.stages.empty()) {
    std::vector<DiscreteSet> sets;
    if (e.ray) {
      sets = exhaustion(*e.ray, e.radii, res);
    } else {
      if (!cfg.geometry) throw ValidationError("exhaustion: needs a ray or the top-level geometry");
      sets = exhaustion(*cfg.geometry, e.radii, res);
    }
    for (auto& s : sets) out.push_back(std::make_shared<const DiscreteSet>(std::move(s)));
    return out;
  }
  DiscreteSet base = [&] {
    if (e.ray) return exhaustion(*e.ray, std::vector<double>{e.radii.back()}, res).front();
    if (!cfg.geometry) throw ValidationError("exhaustion.stages: need a ray or the top-level geometry");
    return discretize(*cfg.geometry, res);
  }();
  for (const auto& st : e.stages) {
    const auto idx = restrict_indices(base, st);
    if (idx.empty()) throw ValidationError("exhaustion.stages: a stage contains no panel");
    out.push_back(std::make_shared<const DiscreteSet>(base.subset(idx, st)));
  }
  return out;
}

Report convergence_checks(const ConvergenceReport& r, double slack) {
  Report rep;
  rep.title = r.kind;
  rep.expect_at_most("potential_monotonicity", r.max_potential_violation(), 1e-3,
                     r.kind == "increasing" ? "U increments >= 0 at probes" : "U increments <= 0 at probes");
  if (r.kind == "increasing") {
    rep.expect("energies_monotone", r.energies_monotone(slack), 0.0, "energies non-decreasing");
    rep.expect("distances_decreasing", r.distances_strictly_decreasing(), 0.0, "consecutive strong distances");
  } else {
    rep.expect("energies_monotone", r.energies_monotone(slack), 0.0, "energies non-increasing");
  }
  if (r.limit_distance) rep.expect_at_most("limit_distance", *r.limit_distance, 1e-2, "final stage vs direct sweep");
  if (r.limit_energy_gap) rep.expect_at_most("limit_energy_gap", *r.limit_energy_gap, 1e-2, "energy-gap form");
  return rep;
}

RunOutcome cmd_discretize(Context& ctx, Artifacts& out) {
  const auto set = target_set(ctx.cfg);
  json j = ctx.header;
  j["set"] = set_json(*set);
  out.write("result.json", j);
  out.write("panels.txt", panels_txt(*set));
  RunOutcome o;
  o.summary = "discretize: " + std::to_string(set->size()) + " panels, total measure " + fmt(set->total_measure());
  return o;
}

RunOutcome cmd_sweep(Context& ctx, Artifacts& out) {
  const auto set = target_set(ctx.cfg);
  const Source omega = make_source(ctx.cfg);
  const Workspace ws(ctx.cfg.kernel, set);
  const auto r = sweep(omega, ws, ctx.opt);
  json j = ctx.header;
  j["set"] = set_json(*set);
  j["diag_note"] = ws.matrix().diag_note();
  j["balayage"] = balayage_json(r);
  out.write("result.json", j);
  out.write("measure.csv", measure_csv(r.swept));
  RunOutcome o;
  o.summary = "sweep: " + std::to_string(set->size()) + " panels, swept mass " + fmt(r.swept_mass);
  return o;
}

RunOutcome cmd_equilibrium(Context& ctx, Artifacts& out) {
  const auto set = target_set(ctx.cfg);
  const Workspace ws(ctx.cfg.kernel, set);
  const auto e = equilibrium_measure(ws, ctx.opt);
  json j = ctx.header;
  j["set"] = set_json(*set);
  j["equilibrium"] = equilibrium_json(e);
  out.write("result.json", j);
  out.write("measure.csv", measure_csv(e.gamma));
  RunOutcome o;
  o.summary = "equilibrium: " + std::to_string(set->size()) + " panels, capacity " + fmt(e.capacity);
  return o;
}

RunOutcome cmd_gauss(Context& ctx, Artifacts& out) {
  const auto set = target_set(ctx.cfg);
  const Source omega = make_source(ctx.cfg);
  const Workspace ws(ctx.cfg.kernel, set);
  const auto g = solve_gauss(omega, ws, ctx.opt);
  json j = ctx.header;
  j["set"] = set_json(*set);
  j["gauss"] = gauss_json(g);
  out.write("result.json", j);
  out.write("measure.csv", measure_csv(g.lambda));
  out.write("swept.csv", measure_csv(g.companion.swept));
  RunOutcome o;
  o.summary = "gauss: c = " + fmt(g.c_weighted) + ", swept mass " + fmt(g.swept_mass);
  return o;
}

RunOutcome cmd_converge_up(Context& ctx, Artifacts& out) {
  const Source omega = make_source(ctx.cfg);
  const auto stages = increasing_stages(ctx.cfg);
  const auto& spec = ctx.cfg.kernel;
  const auto r = sweep_exhaustion(omega, stages, spec, ctx.opt);
  Report checks = convergence_checks(r, ctx.opt.tol);
  json j = ctx.header;
  j["sweep"] = convergence_json(r);
  out.write("stages.csv", tidy_csv(r));
  if (ctx.cfg.gauss_stages) {
    const auto g = gauss_exhaustion(omega, stages, spec, ctx.opt);
    j["gauss"] = convergence_json(g);
    bool below_one = true;
    for (double m : r.masses) below_one = below_one && m <= 1.0;
    if (below_one) {
      bool mono = true;
      for (std::size_t k = 1; k < g.constants_c.size(); ++k) {
        mono = mono && g.constants_c[k] <= g.constants_c[k - 1] + ctx.opt.tol;
      }
      checks.expect("c_non_increasing", mono, 0.0, "every stage has swept mass <= 1");
    }
    out.write("gauss_stages.csv", tidy_csv(g));
  }
  if (ctx.cfg.shell_radius) {
    const auto p = support_compactness_probe(omega, stages, spec, *ctx.cfg.shell_radius, ctx.opt);
    j["support_probe"] = {{"shell_radius", *ctx.cfg.shell_radius},
                          {"outer_fraction", number_list(p.outer_fraction)},
                          {"swept_mass", number_list(p.swept_mass)},
                          {"c_weighted", number_list(p.c_weighted)},
                          {"decreasing", p.decreasing}};
  }
  j["checks"] = to_json(checks);
  out.write("result.json", j);
  out.write("measure.csv", measure_csv(r.measures.back()));
  RunOutcome o;
  o.exit_code = checks.passed() ? kExitOk : kExitVerification;
  o.summary = "converge-up: " + std::to_string(stages.size()) + " stages, final swept mass " + fmt(r.masses.back()) +
              (checks.passed() ? "" : " (checks failed)");
  return o;
}

RunOutcome cmd_converge_down(Context& ctx, Artifacts& out) {
  const auto& cfg = ctx.cfg;
  if (!cfg.decreasing) throw ValidationError("decreasing: required by converge-down");
  if (!cfg.geometry) throw ValidationError("geometry: converge-down restricts the top-level geometry");
  const Source omega = make_source(cfg);
  const DiscreteSet base = discretize(*cfg.geometry, cfg.resolution);
  StageList stages;
  for (const auto& st : cfg.decreasing->stages) {
    const auto idx = restrict_indices(base, st);
    if (idx.empty()) throw ValidationError("decreasing.stages: a stage contains no panel");
    stages.push_back(std::make_shared<const DiscreteSet>(base.subset(idx, st)));
  }
  std::shared_ptr<const DiscreteSet> limit;
  if (cfg.decreasing->limit) limit = std::make_shared<const DiscreteSet>(discretize(*cfg.decreasing->limit, cfg.resolution));
  const auto r = sweep_decreasing(omega, stages, cfg.kernel, ctx.opt, limit);
  const Report checks = convergence_checks(r, ctx.opt.tol);
  json j = ctx.header;
  j["sweep"] = convergence_json(r);
  j["checks"] = to_json(checks);
  out.write("result.json", j);
  out.write("stages.csv", tidy_csv(r));
  out.write("measure.csv", measure_csv(r.measures.back()));
  RunOutcome o;
  o.exit_code = checks.passed() ? kExitOk : kExitVerification;
  o.summary = "converge-down: " + std::to_string(stages.size()) + " stages, final swept mass " + fmt(r.masses.back()) +
              (checks.passed() ? "" : " (checks failed)");
  return o;
}

// closed forms apply to a unit-kernel Newtonian sphere in R^3 with one external charge
std::vector<ReferenceValue> references(const RunConfig& cfg, const Source& omega) {
  std::vector<ReferenceValue> out;
  if (cfg.kernel.alpha != 2.0 || cfg.kernel.dim != 3 || !cfg.geometry) return out;
  const auto* sph = std::get_if<Sphere>(&cfg.geometry->shape);
  const auto* charges = std::get_if<std::vector<PointCharge>>(&omega);
  if (!sph) return out;
  ReferenceValue cap{"capacity", sph->radius, OracleMethod::closed_form, 4.0 * 2.220446049250313e-16 * sph->radius};
  out.push_back(cap);
  if (charges && charges->size() == 1) {
    const double d = detail::distance(charges->front().location, sph->center);
    if (d > sph->radius) {
      auto m = newtonian_ball_sweep_mass(sph->radius, d, 3);
      m.value *= charges->front().mass;
      m.name = "swept_mass";
      out.push_back(m);
    }
  }
  return out;
}

RunOutcome cmd_verify(Context& ctx, Artifacts& out) {
  const auto& cfg = ctx.cfg;
  const auto set = target_set(cfg);
  const Source omega = make_source(cfg);
  const Workspace ws(cfg.kernel, set);
  Report all;
  all.title = "verify";

  const auto b = sweep(omega, ws, ctx.opt);
  all.merge(verify_characterizations(b, ws, omega, cfg.rng_seed, ctx.opt));
  all.merge(minimum_mass_check(b, ws, cfg.rng_seed + 1, 10, ctx.opt));

  const auto e = equilibrium_measure(ws, ctx.opt);
  Report eq;
  eq.title = "equilibrium";
  eq.expect_at_most("frostman_excess", e.frostman_excess, 1e-3, "U^gamma <= 1 at nodes and probes");
  eq.expect_at_most("potential_residual", e.potential_residual / e.qp.scale, 1e-2, "U^gamma = 1 on the support");
  eq.expect_at_most("capacity_energy", std::abs(e.capacity - e.energy) / e.capacity, 1e-6, "gamma(X) = I(gamma)");
  const auto mi = equilibrium_mass_identity(omega, ws, ctx.opt);
  eq.expect_at_most("mass_identity", mi.relative_difference, 0.02, "omega^A(X) = integral of U^omega d gamma");
  all.merge(eq);

  const auto g = solve_gauss(omega, ws, ctx.opt);
  Report gs;
  gs.title = "gauss";
  gs.expect_at_most("weighted_flatness", g.weighted_potential_residual, 10.0 * ctx.opt.tol, "U_f^lambda = c on support");
  gs.expect_at_most("lower_bound", g.lower_bound_residual, 10.0 * ctx.opt.tol, "U_f^lambda >= c on nodes");
  gs.expect_at_most("cone_below_simplex", g.cone_value - g.w_value, ctx.opt.tol * g.qp.scale,
                    "cone optimum <= simplex optimum");
  const double one_minus = 1.0 - g.swept_mass;
  gs.expect("trichotomy", one_minus == 0.0 || (g.c_weighted > 0.0) == (one_minus > 0.0), g.c_weighted,
            "sign(c) = sign(1 - omega^A(X))");
  all.merge(gs);
  const auto rep = representation_check(g, b, e, ws, 0.05);
  all.merge(rep.report);
  if (rep.applicable) all.merge(lambda_class_extremality(g, ws, cfg.rng_seed + 2, 10, ctx.opt));

  json j = ctx.header;
  j["set"] = set_json(*set);
  j["balayage"] = balayage_json(b);
  j["equilibrium"] = equilibrium_json(e);
  j["gauss"] = gauss_json(g);
  j["representation"] = {{"applicable", rep.applicable},
                         {"relative_distance", json_number(rep.relative_distance)},
                         {"c_formula", json_number(rep.c_formula)},
                         {"c_gap", json_number(rep.c_gap)}};

  if (cfg.subset) {
    const auto idx = restrict_indices(*set, *cfg.subset);
    if (idx.empty()) throw ValidationError("subset: contains no panel of the geometry");
    const Workspace inner(cfg.kernel, std::make_shared<const DiscreteSet>(set->subset(idx, *cfg.subset)));
    const auto rest = sweep_with_rest(omega, ws, inner, ctx.opt);
    all.merge(rest.report);
    j["rest"] = {{"relative_distance", json_number(rest.relative_distance)},
                 {"potential_excess", json_number(rest.potential_excess)},
                 {"mass_direct", json_number(rest.mass_direct)},
                 {"mass_two_step", json_number(rest.mass_two_step)},
                 {"mass_outer", json_number(rest.mass_outer)},
                 {"panels", inner.size()}};
  }

  const auto refs = references(cfg, omega);
  Report oracle;
  oracle.title = "oracle";
  for (const auto& r : refs) {
    const double got = r.name == "capacity" ? e.capacity : b.swept_mass;
    oracle.expect_at_most(r.name, std::abs(got - r.value) / r.value, 0.02, "closed form, " + method_name(r.method));
  }
  if (!refs.empty()) {
    all.merge(oracle);
    out.write("references.csv", reference_csv(refs));
  }

  j["report"] = to_json(all);
  out.write("result.json", j);
  out.write("measure.csv", measure_csv(b.swept));
  out.write("checks.csv", checks_csv(all));
  std::size_t failed = 0;
  for (const auto& c : all.checks) failed += c.passed ? 0 : 1;
  RunOutcome o;
  o.exit_code = failed == 0 ? kExitOk : kExitVerification;
  o.summary = "verify: " + std::to_string(all.checks.size() - failed) + "/" + std::to_string(all.checks.size()) +
              " checks passed";
  return o;
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommands) {
    if (name == n) return c;
  }
  return std::nullopt;
}

std::string command_name(Command c) {
  for (const auto& [cc, n] : kCommands) {
    if (cc == c) return n;
  }
  return "?";
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& kc : kCommands) out.emplace_back(kc.second);
  return out;
}

std::string version() { return BALAYAGE_VERSION_STRING; }

json error_json(const std::string& kind, const std::vector<std::string>& messages) {
  return {{"schema", 1}, {"error", kind}, {"violations", messages}};
}

RunOutcome run(Command command, const RunConfig& cfg) {
  RunOutcome o;
  std::optional<Artifacts> out;
  auto fail = [&](int code, const std::string& kind, const std::vector<std::string>& msgs) {
    o = RunOutcome{};
    o.exit_code = code;
    o.error = msgs.empty() ? kind : msgs.front();
    o.summary = command_name(command) + ": " + kind + " error";
    if (out) {
      json j = error_json(kind, msgs);
      j["command"] = command_name(command);
      j["config_hash"] = config_hash(cfg);
      try {
        out->write("error.json", j);
      } catch (const Error&) {
      }
      o.files = out->files();
    }
  };
  try {
    out.emplace(cfg.output_dir);
    Context ctx{cfg, {}, {}};
    ctx.opt.tol = cfg.tol;
    ctx.opt.max_iter = cfg.max_iter;
    ctx.header = {{"schema", 1},
                  {"command", command_name(command)},
                  {"version", version()},
                  {"config_hash", config_hash(cfg)},
                  {"rng_seed", cfg.rng_seed},
                  {"config", effective_config(cfg)}};
    switch (command) {
      case Command::discretize:
        o = cmd_discretize(ctx, *out);
        break;
      case Command::sweep:
        o = cmd_sweep(ctx, *out);
        break;
      case Command::equilibrium:
        o = cmd_equilibrium(ctx, *out);
        break;
      case Command::gauss:
        o = cmd_gauss(ctx, *out);
        break;
      case Command::converge_up:
        o = cmd_converge_up(ctx, *out);
        break;
      case Command::converge_down:
        o = cmd_converge_down(ctx, *out);
        break;
      case Command::verify:
        o = cmd_verify(ctx, *out);
        break;
    }
    o.files = out->files();
  } catch (const ConfigError& e) {
    fail(kExitValidation, "validation", e.violations());
  } catch (const ValidationError& e) {
    fail(kExitValidation, "validation", {e.what()});
  } catch (const SolverError& e) {
    fail(kExitSolver, "solver", {e.what()});
  }
  return o;
}

}  // namespace balayage
