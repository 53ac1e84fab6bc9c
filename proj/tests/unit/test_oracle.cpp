#include <doctest.h>

#include <numbers>

#include "balayage/error.hpp"
#include "balayage/oracle.hpp"

using namespace balayage;

TEST_CASE("Newtonian sweep mass of a point charge onto a sphere") {
  CHECK(newtonian_ball_sweep_mass(1.0, 2.0, 3).value == doctest::Approx(0.5));
  CHECK(newtonian_ball_sweep_mass(1.0, 4.0, 3).value == doctest::Approx(0.25));
  CHECK(newtonian_ball_sweep_mass(2.0, 4.0, 4).value == doctest::Approx(0.25));
  CHECK(newtonian_ball_sweep_mass(1.0, 2.0, 3).uncertainty > 0.0);
}

TEST_CASE("Poisson-kernel density integrates to the swept mass") {
  // (|z|^2 - r^2) / (4 pi r |x - z|^3) with r = 1, |z| = 2
  const std::vector<double> c{0, 0, 0};
  const std::vector<double> z{0, 0, 2};
  const std::vector<double> near{0, 0, 1};
  const std::vector<double> far{0, 0, -1};
  CHECK(newtonian_sweep_density(1.0, c, z, near) == doctest::Approx(3.0 / (4.0 * std::numbers::pi)));
  CHECK(newtonian_sweep_density(1.0, c, z, far) == doctest::Approx(3.0 / (4.0 * std::numbers::pi * 27.0)));
  CHECK(newtonian_equilibrium_density(1.0) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
}

TEST_CASE("refinement extrapolation is exact for first-order data") {
  const std::vector<std::pair<double, double>> v{{2, 2.0}, {4, 1.5}, {8, 1.25}};
  const auto r = refinement_extrapolate(v, "x");
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.uncertainty > 0.0);
  CHECK(r.method == OracleMethod::refinement_extrapolation);
  const std::vector<std::pair<double, double>> two{{2, 2.0}, {4, 1.5}};
  CHECK_THROWS_AS(refinement_extrapolate(two), ValidationError);
}
