#include <doctest.h>

#include <cmath>
#include <numbers>

#include "balayage/error.hpp"
#include "balayage/kernel.hpp"
#include "balayage/measure.hpp"

using namespace balayage;

namespace {

KernelSpec riesz(double alpha, int dim, DiagMode mode = DiagMode::equivalent_disc) {
  KernelSpec k;
  k.alpha = alpha;
  k.dim = dim;
  k.diag_mode = mode;
  return k;
}

}  // namespace

TEST_CASE("admitted kernel range") {
  CHECK_NOTHROW(validate(riesz(2.0, 3)));
  CHECK_NOTHROW(validate(riesz(1.5, 2)));
  CHECK_THROWS_AS(validate(riesz(3.0, 3)), ValidationError);
  CHECK_THROWS_AS(validate(riesz(2.0, 2)), ValidationError);
  CHECK_THROWS_AS(validate(riesz(0.0, 3)), ValidationError);
  KernelSpec m = riesz(2.0, 3);
  m.max_principle_constant = 2.0;
  CHECK_THROWS_AS(validate(m), ValidationError);
}

TEST_CASE("kernel evaluation") {
  const auto k = riesz(2.0, 3);
  const Point x{0, 0, 0};
  const Point y{0, 0, 2};
  CHECK(evaluate(k, x, y) == doctest::Approx(0.5));
  CHECK(std::isinf(evaluate(k, x, x)));
}

TEST_CASE("segment self-energy closed form") {
  // int_0^1 int_0^1 |x - y|^s = 2 / ((s + 1)(s + 2)), scaled by h^s
  CHECK(segment_self_energy(-0.5, 1.0) == doctest::Approx(8.0 / 3.0));
  CHECK(segment_self_energy(-0.5, 0.25) == doctest::Approx(16.0 / 3.0));
  CHECK(segment_self_energy(0.0, 3.0) == doctest::Approx(1.0));
  // the 1/r energy of a segment is infinite
  CHECK_THROWS_AS(segment_self_energy(-1.0, 1.0), ValidationError);
}

TEST_CASE("Monte Carlo diagonal agrees with the analytic segment diagonal") {
  const double exact = segment_self_energy(-0.5, 0.3);
  const double mc = monte_carlo_self_energy(-0.5, 1, 0.3, 100000, 12345);
  CHECK(mc == doctest::Approx(exact).epsilon(0.01));

  auto set = std::make_shared<const DiscreteSet>(discretize(SetSpec{Segment{{0, 0}, {1, 0}}}, 8));
  const PanelKernel a(riesz(1.5, 2, DiagMode::analytic_segment), set);
  const PanelKernel m(riesz(1.5, 2, DiagMode::monte_carlo), set);
  CHECK(m.self_energy(0) == doctest::Approx(a.self_energy(0)).epsilon(0.01));
}

TEST_CASE("ball and disc self-energies") {
  // Newtonian energy of a uniform unit ball: 6/5
  CHECK(ball3_self_energy(-1.0, 1.0) == doctest::Approx(1.2));
  // uniform disc of radius 1 with kernel 1/r: 16 / (3 pi)
  CHECK(disc_self_energy(-1.0, 1.0) == doctest::Approx(16.0 / (3.0 * std::numbers::pi)).epsilon(1e-8));
}

TEST_CASE("matrix is symmetric positive definite") {
  auto set = std::make_shared<const DiscreteSet>(discretize(SetSpec{Sphere{{0, 0, 0}, 1.0}}, 2));
  const auto K = assemble_matrix(riesz(2.0, 3), set);
  for (std::size_t i = 0; i < K.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) CHECK(K(i, j) == doctest::Approx(K(j, i)));
  }
  const auto [lo, hi] = eigen_range(K);
  CHECK(lo > 0.0);
  CHECK(hi > lo);
}

TEST_CASE("uniform sphere measure has the mean-value potentials") {
  auto set = std::make_shared<const DiscreteSet>(discretize(SetSpec{Sphere{{0, 0, 0}, 1.0}}, 5));
  const auto mu = uniform_measure(set);
  const std::vector<Point> probes{{0, 0, 2}, {0, 0, 0}};
  const auto u = potential(riesz(2.0, 3), mu, probes);
  CHECK(u[0] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(u[1] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("charge on the target set is rejected") {
  auto set = std::make_shared<const DiscreteSet>(discretize(SetSpec{Segment{{0, 0, 0}, {1, 0, 0}}}, 4));
  const PanelKernel pk(riesz(1.0, 3), set);
  const Source on{std::vector<PointCharge>{{{0.5, 0, 0}, 1.0}}};
  const Source node{std::vector<PointCharge>{{{0.125, 0, 0}, 1.0}}};
  const Source off{std::vector<PointCharge>{{{0.5, 1, 0}, 1.0}}};
  CHECK_THROWS_AS(source_on_panels(pk, on), ValidationError);
  CHECK_THROWS_AS(source_on_panels(pk, node), ValidationError);
  CHECK_NOTHROW(source_on_panels(pk, off));
}
