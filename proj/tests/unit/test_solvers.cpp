#include <doctest.h>

#include <cmath>

#include "balayage/error.hpp"
#include "balayage/balayage.hpp"
#include "balayage/convergence.hpp"
#include "balayage/equilibrium.hpp"
#include "balayage/gauss.hpp"
#include "balayage/workspace.hpp"

using namespace balayage;

namespace {

KernelSpec riesz(double alpha, int dim) {
  KernelSpec k;
  k.alpha = alpha;
  k.dim = dim;
  return k;
}

std::shared_ptr<const DiscreteSet> sphere(double r, int res, double shift = 0.0) {
  return std::make_shared<const DiscreteSet>(discretize(SetSpec{Sphere{{shift, 0, 0}, r}}, res));
}

Source charge(double mass) { return Source{std::vector<PointCharge>{{{0, 0, 2}, mass}}}; }

// shared 500-panel Newtonian workspace on the unit sphere
const Workspace& unit_ws() {
  static const Workspace ws(riesz(2.0, 3), sphere(1.0, 5));
  return ws;
}

}  // namespace

TEST_CASE("sweep of a charge at distance 2 onto the unit sphere") {
  const auto r = sweep(charge(1.0), unit_ws());
  CHECK(r.qp.converged);
  CHECK(r.swept_mass == doctest::Approx(0.5).epsilon(0.02));
  CHECK(r.swept_mass <= r.source_mass);
  CHECK(r.potential_match_residual < 1e-2);
  CHECK(r.domination_residual < 1e-2);
  CHECK(std::abs(r.energy_swept - r.mutual_energy_source) / r.energy_swept < 1e-6);
  const auto rep = verify_characterizations(r, unit_ws(), charge(1.0), 1);
  CHECK(rep.passed());
  CHECK(minimum_mass_check(r, unit_ws(), 2, 10).passed());
}

TEST_CASE("sweep with a rest onto a hemisphere") {
  const SetSpec upper{HalfSpace{{0, 0, 0}, {0, 0, 1}}};
  const auto idx = restrict_indices(unit_ws().set(), upper);
  const Workspace inner(riesz(2.0, 3), std::make_shared<const DiscreteSet>(unit_ws().set().subset(idx, upper)));
  const auto rest = sweep_with_rest(charge(1.0), unit_ws(), inner);
  CHECK(rest.relative_distance < 1e-3);
  CHECK(rest.mass_direct <= rest.mass_outer + 1e-8);
}

TEST_CASE("equilibrium measure of spheres") {
  const auto e = equilibrium_measure(unit_ws());
  CHECK(e.capacity == doctest::Approx(1.0).epsilon(0.02));
  CHECK(e.frostman_excess < 1e-3);
  CHECK(e.capacity == doctest::Approx(e.energy).epsilon(1e-6));

  // homogeneity: capacity scales like r^(n - alpha)
  const double c2 = capacity(sphere(2.0, 5), riesz(2.0, 3));
  CHECK(c2 == doctest::Approx(2.0 * e.capacity).epsilon(0.02));
}

TEST_CASE("two distant spheres approach twice the capacity from below") {
  const double single = capacity(sphere(1.0, 2), riesz(2.0, 3));
  double prev = 0.0;
  for (double sep : {4.0, 16.0, 64.0}) {
    SetSpec two;
    two.shape = Union{{SetSpec{Sphere{{0, 0, 0}, 1.0}}, SetSpec{Sphere{{sep, 0, 0}, 1.0}}}};
    const double c = capacity(std::make_shared<const DiscreteSet>(discretize(two, 2)), riesz(2.0, 3));
    CHECK(c < 2.0 * single);
    CHECK(c > prev);
    prev = c;
  }
  CHECK(prev == doctest::Approx(2.0 * single).epsilon(0.02));
}

TEST_CASE("two-panel segment equilibrium by hand") {
  auto seg = std::make_shared<const DiscreteSet>(discretize(SetSpec{Segment{{0, 0}, {1, 0}}}, 2));
  const Workspace ws(riesz(1.5, 2), seg);
  const auto e = equilibrium_measure(ws);
  // symmetric 2x2 system: gamma_i = 1 / (K11 + K12)
  const double g = 1.0 / (ws.matrix()(0, 0) + ws.matrix()(0, 1));
  CHECK(e.gamma.masses[0] == doctest::Approx(g));
  CHECK(e.gamma.masses[1] == doctest::Approx(g));
  CHECK(e.capacity == doctest::Approx(2.0 * g));
}

TEST_CASE("equilibrium mass identity") {
  const auto mi = equilibrium_mass_identity(charge(1.0), unit_ws());
  CHECK(mi.relative_difference < 0.02);
}

TEST_CASE("sign of the Gauss constant follows 1 - swept mass") {
  const auto one = solve_gauss(charge(1.0), unit_ws());
  CHECK(one.swept_mass < 1.0);
  CHECK(one.c_weighted > 0.0);
  CHECK(one.c_weighted == doctest::Approx(0.5).epsilon(0.05));

  const auto three = solve_gauss(charge(3.0), unit_ws());
  CHECK(three.swept_mass > 1.0);
  CHECK(three.c_weighted < 0.0);

  const auto two = solve_gauss(charge(2.0), unit_ws());
  CHECK(std::abs(two.c_weighted) < 0.05);
  CHECK(norm_distance(unit_ws().matrix(), two.lambda, two.companion.swept) /
            energy_norm(unit_ws().matrix(), two.companion.swept) <
        0.05);
}

TEST_CASE("representation formula and class extremality") {
  const auto g = solve_gauss(charge(1.0), unit_ws());
  const auto b = sweep(charge(1.0), unit_ws());
  const auto e = equilibrium_measure(unit_ws());
  const auto rep = representation_check(g, b, e, unit_ws(), 0.05);
  CHECK(rep.applicable);
  CHECK(rep.report.passed());
  CHECK(lambda_class_extremality(g, unit_ws(), 3, 10).passed());
}

TEST_CASE("increasing exhaustion of a half-line") {
  const std::vector<double> radii{2, 4, 8};
  StageList stages;
  for (auto& s : exhaustion(Ray{{1, 0}, {1, 0}}, radii, 6)) stages.push_back(std::make_shared<const DiscreteSet>(s));
  const Source omega{std::vector<PointCharge>{{{0, 0}, 0.5}}};
  const auto r = sweep_exhaustion(omega, stages, riesz(1.5, 2));
  CHECK(r.max_potential_violation() <= 1e-3);
  CHECK(r.energies_monotone(1e-8));
  CHECK(r.distances_strictly_decreasing());
  for (std::size_t k = 1; k < r.masses.size(); ++k) CHECK(r.masses[k] >= r.masses[k - 1]);

  const auto g = gauss_exhaustion(omega, stages, riesz(1.5, 2));
  for (std::size_t k = 1; k < g.constants_c.size(); ++k) CHECK(g.constants_c[k] < g.constants_c[k - 1]);
  CHECK(tidy_csv(r).rfind("stage,", 0) == 0);
}

TEST_CASE("decreasing sequence: sphere plus a shrinking cap") {
  const SetSpec unit{Sphere{{0, 0, 0}, 1.0}};
  const auto base = discretize(SetSpec{Union{{unit, SetSpec{Sphere{{0, 0, 0}, 1.1}}}}}, 3);
  StageList stages;
  for (double t : {0.0, 0.9}) {
    const SetSpec ps{Union{{unit, SetSpec{HalfSpace{{0, 0, -t}, {0, 0, -1}}}}}};
    stages.push_back(std::make_shared<const DiscreteSet>(base.subset(restrict_indices(base, ps), ps)));
  }
  const auto r = sweep_decreasing(charge(1.0), stages, riesz(2.0, 3), {}, sphere(1.0, 3));
  CHECK(r.max_potential_violation() <= 1e-3);
  CHECK(r.masses[1] <= r.masses[0] + 1e-8);
  REQUIRE(r.limit_distance.has_value());
  REQUIRE(r.limit_energy_gap.has_value());
  CHECK(*r.limit_distance > 0.0);
  CHECK(*r.limit_distance == doctest::Approx(*r.limit_energy_gap).epsilon(0.05));
}

TEST_CASE("stages must be nested") {
  StageList bad{sphere(1.0, 2), sphere(1.0, 3)};
  CHECK_THROWS_AS(check_nested(bad, true), ValidationError);
}
