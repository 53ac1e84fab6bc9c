#include "balayage/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <nlohmann/json.hpp>

#include "detail/fnv.hpp"

namespace balayage {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& v) {
  std::string s = "invalid configuration:";
  for (const auto& x : v) s += "\n  " + x;
  return s;
}

// Runs each field parser, turning every failure into one "path: reason" entry.
struct Collector {
  std::vector<std::string> violations;

  void field(const std::string& path, const std::function<void()>& f) {
    try {
      f();
    } catch (const json::exception& e) {
      violations.push_back(path + ": " + e.what());
    } catch (const Error& e) {
      std::string msg = e.what();
      const std::string head = path + ": ";
      if (msg.rfind(head, 0) == 0) msg.erase(0, head.size());
      violations.push_back(head + msg);
    }
  }
  void fail(const std::string& path, const std::string& why) { violations.push_back(path + ": " + why); }
};

Point point(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty array of numbers");
  Point p;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError("expected a non-empty array of numbers");
    p.push_back(v.get<double>());
    if (!std::isfinite(p.back())) throw ValidationError("coordinates must be finite");
  }
  return p;
}

json point_json(const Point& p) { return json(p); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  if (!j[key].is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

Ray ray_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("expected an object with origin and direction");
  return Ray{point(j.at("origin")), point(j.at("direction"))};
}

std::vector<SetSpec> spec_list(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty array of set specs");
  std::vector<SetSpec> out;
  for (const auto& s : j) out.push_back(set_spec_from_json(s));
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : ValidationError(join(violations)), violations_(std::move(violations)) {}

SetSpec set_spec_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("set spec must be an object");
  const std::string shape = j.at("shape").get<std::string>();
  SetSpec spec;
  if (shape == "sphere") {
    spec.shape = Sphere{point(j.at("center")), number(j, "radius")};
  } else if (shape == "ball") {
    spec.shape = Ball{point(j.at("center")), number(j, "radius")};
  } else if (shape == "segment") {
    spec.shape = Segment{point(j.at("a")), point(j.at("b"))};
  } else if (shape == "annulus") {
    spec.shape = Annulus{point(j.at("center")), number(j, "r_in"), number(j, "r_out")};
  } else if (shape == "box") {
    spec.shape = Box{point(j.at("lo")), point(j.at("hi"))};
  } else if (shape == "halfspace") {
    spec.shape = HalfSpace{point(j.at("point")), point(j.at("normal"))};
  } else if (shape == "points_file") {
    spec.shape = PointsFile{j.at("path").get<std::string>(), j.at("dim").get<int>()};
  } else if (shape == "union") {
    Union u;
    for (const auto& p : j.at("parts")) u.parts.push_back(set_spec_from_json(p));
    spec.shape = std::move(u);
  } else {
    throw ValidationError("unknown shape '" + shape + "'");
  }
  validate(spec);
  return spec;
}

json to_json(const SetSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{"shape", "sphere"}, {"center", point_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {{"shape", "ball"}, {"center", point_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Segment>) {
          return {{"shape", "segment"}, {"a", point_json(s.a)}, {"b", point_json(s.b)}};
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return {{"shape", "annulus"}, {"center", point_json(s.center)}, {"r_in", s.r_in}, {"r_out", s.r_out}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"shape", "box"}, {"lo", point_json(s.lo)}, {"hi", point_json(s.hi)}};
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return {{"shape", "halfspace"}, {"point", point_json(s.point)}, {"normal", point_json(s.normal)}};
        } else if constexpr (std::is_same_v<T, PointsFile>) {
          return {{"shape", "points_file"}, {"path", s.path}, {"dim", s.dim}};
        } else {
          json parts = json::array();
          for (const auto& p : s.parts) parts.push_back(to_json(p));
          return {{"shape", "union"}, {"parts", parts}};
        }
      },
      spec.shape);
}

RunConfig parse_config(const json& j) {
  Collector col;
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError({"(root): configuration must be a JSON object"});
  if (j.contains("schema")) {
    col.field("schema", [&] {
      if (j["schema"].get<int>() != 1) throw ValidationError("only schema 1 is supported");
    });
  }

  bool kernel_ok = false;
  if (!j.contains("kernel")) {
    col.fail("kernel", "missing");
  } else {
    col.field("kernel", [&] {
      cfg.kernel = kernel_spec_from_json(j["kernel"]);
      validate(cfg.kernel);
      kernel_ok = true;
    });
  }

  if (j.contains("geometry")) {
    col.field("geometry", [&] {
      cfg.geometry = set_spec_from_json(j["geometry"]);
      if (kernel_ok && dimension(*cfg.geometry) != cfg.kernel.dim) {
        throw ValidationError("dimension " + std::to_string(dimension(*cfg.geometry)) +
                              " does not match kernel.dim " + std::to_string(cfg.kernel.dim));
      }
    });
  }
  if (j.contains("resolution")) {
    col.field("resolution", [&] {
      cfg.resolution = j["resolution"].get<int>();
      if (cfg.resolution < 1) throw ValidationError("must be >= 1");
    });
  }

  if (j.contains("source")) {
    const json& s = j["source"];
    if (!s.is_object()) {
      col.fail("source", "must be an object");
    } else {
      if (s.contains("charges")) {
        if (!s["charges"].is_array() || s["charges"].empty()) col.fail("source.charges", "expected a non-empty array");
        for (std::size_t k = 0; s["charges"].is_array() && k < s["charges"].size(); ++k) {
          const std::string path = "source.charges[" + std::to_string(k) + "]";
          col.field(path, [&] {
            const json& q = s["charges"][k];
            PointCharge pc{point(q.at("location")), q.contains("mass") ? number(q, "mass") : 1.0};
            validate(pc);
            if (kernel_ok && static_cast<int>(pc.location.size()) != cfg.kernel.dim) {
              throw ValidationError("location has dimension " + std::to_string(pc.location.size()) +
                                    ", kernel.dim is " + std::to_string(cfg.kernel.dim));
            }
            cfg.source.charges.push_back(std::move(pc));
          });
        }
      }
      if (s.contains("measure_file")) {
        col.field("source.measure_file", [&] { cfg.source.measure_file = s["measure_file"].get<std::string>(); });
        if (!s.contains("geometry")) {
          col.fail("source.geometry", "required with measure_file");
        } else {
          col.field("source.geometry", [&] { cfg.source.measure_geometry = set_spec_from_json(s["geometry"]); });
        }
        if (s.contains("resolution")) {
          col.field("source.resolution", [&] {
            cfg.source.measure_resolution = s["resolution"].get<int>();
            if (cfg.source.measure_resolution < 1) throw ValidationError("must be >= 1");
          });
        }
        if (s.contains("charges")) col.fail("source", "give either charges or measure_file, not both");
      }
      if (!s.contains("charges") && !s.contains("measure_file")) col.fail("source", "needs charges or measure_file");
    }
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (s.contains("tol")) {
      col.field("solver.tol", [&] {
        cfg.tol = s["tol"].get<double>();
        if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) throw ValidationError("must be positive and finite");
      });
    }
    if (s.contains("max_iter")) {
      col.field("solver.max_iter", [&] {
        cfg.max_iter = s["max_iter"].get<std::size_t>();
        if (cfg.max_iter < 1) throw ValidationError("must be >= 1");
      });
    }
  }
  if (j.contains("rng_seed")) col.field("rng_seed", [&] { cfg.rng_seed = j["rng_seed"].get<std::uint64_t>(); });
  if (j.contains("subset")) col.field("subset", [&] { cfg.subset = set_spec_from_json(j["subset"]); });

  if (j.contains("exhaustion")) {
    const json& e = j["exhaustion"];
    ExhaustionConfig ex;
    bool ok = e.is_object();
    if (!ok) col.fail("exhaustion", "must be an object");
    if (ok && e.contains("ray")) col.field("exhaustion.ray", [&] { ex.ray = ray_from_json(e["ray"]); });
    if (ok && e.contains("radii")) {
      col.field("exhaustion.radii", [&] {
        ex.radii = e["radii"].get<std::vector<double>>();
        if (ex.radii.empty()) throw ValidationError("must not be empty");
        for (std::size_t k = 0; k < ex.radii.size(); ++k) {
          if (!(ex.radii[k] > 0.0)) throw ValidationError("radii must be positive");
          if (k > 0 && !(ex.radii[k] > ex.radii[k - 1])) throw ValidationError("radii must be strictly increasing");
        }
      });
    }
    if (ok && e.contains("stages")) col.field("exhaustion.stages", [&] { ex.stages = spec_list(e["stages"]); });
    if (ok && e.contains("resolution")) {
      col.field("exhaustion.resolution", [&] {
        ex.resolution = e["resolution"].get<int>();
        if (ex.resolution < 1) throw ValidationError("must be >= 1");
      });
    }
    if (ok && !e.contains("radii") && !e.contains("stages")) col.fail("exhaustion", "needs radii or stages");
    if (ok && e.contains("ray") && e.contains("stages") && !e.contains("radii")) {
      col.fail("exhaustion.radii", "windows along a ray need radii (the last one bounds the base set)");
    }
    cfg.exhaustion = std::move(ex);
  }
  if (j.contains("decreasing")) {
    const json& d = j["decreasing"];
    DecreasingConfig dc;
    col.field("decreasing.stages", [&] { dc.stages = spec_list(d.at("stages")); });
    if (d.contains("limit")) col.field("decreasing.limit", [&] { dc.limit = set_spec_from_json(d["limit"]); });
    cfg.decreasing = std::move(dc);
  }
  if (j.contains("gauss_stages")) col.field("gauss_stages", [&] { cfg.gauss_stages = j["gauss_stages"].get<bool>(); });
  if (j.contains("shell_radius")) {
    col.field("shell_radius", [&] {
      cfg.shell_radius = j["shell_radius"].get<double>();
      if (!(*cfg.shell_radius > 0.0)) throw ValidationError("must be positive");
    });
  }
  if (j.contains("output_dir")) col.field("output_dir", [&] { cfg.output_dir = j["output_dir"].get<std::string>(); });

  static const char* known[] = {"schema",     "kernel",     "geometry",   "resolution",   "source",
                                "solver",     "rng_seed",   "subset",     "exhaustion",   "decreasing",
                                "gauss_stages", "shell_radius", "output_dir", "description"};
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) col.fail(key, "unknown field");
  }
  if (!col.violations.empty()) throw ConfigError(col.violations);
  cfg.canonical = j.dump();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("(root): not valid JSON: ") + e.what()});
  }
  return parse_config(j);
}

json effective_config(const RunConfig& cfg) {
  json j = cfg.canonical.empty() ? json::object() : json::parse(cfg.canonical);
  // the output location does not change any artifact, so it is not part of the identity
  j.erase("output_dir");
  j["solver"]["tol"] = cfg.tol;
  j["solver"]["max_iter"] = cfg.max_iter;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  detail::Fnv1a h;
  h.add(effective_config(cfg).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

}  // namespace balayage
