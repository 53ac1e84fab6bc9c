#include <doctest.h>

#include <cmath>
#include <numbers>

#include "balayage/error.hpp"
#include "balayage/geometry.hpp"

using namespace balayage;

namespace {
const SetSpec kUnitSphere{Sphere{{0, 0, 0}, 1.0}};
}

TEST_CASE("sphere cell measures sum to the sphere area") {
  for (int res : {1, 2, 5}) {
    const auto s = discretize(kUnitSphere, res);
    CHECK(s.total_measure() == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
  }
}

TEST_CASE("ball cell measures sum to the ball volume") {
  const auto b = discretize(SetSpec{Ball{{0, 0, 0}, 1.0}}, 4);
  CHECK(b.total_measure() == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(0.01));
}

TEST_CASE("segment is split uniformly, resolution panels per unit length") {
  const auto s = discretize(SetSpec{Segment{{1, 0, 0}, {5, 0, 0}}}, 2);
  REQUIRE(s.size() == 8);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.cell_measure(i) == doctest::Approx(0.5));
  CHECK(s.node(0)[0] == doctest::Approx(1.25));
}

TEST_CASE("node count grows with resolution") {
  std::size_t prev = 0;
  for (int res = 1; res <= 6; ++res) {
    const auto s = discretize(kUnitSphere, res);
    CHECK(s.size() > prev);
    prev = s.size();
  }
  CHECK(discretize(kUnitSphere, 5).size() == 500);
}

TEST_CASE("discretization is a pure function of spec and resolution") {
  const auto a = discretize(kUnitSphere, 4);
  const auto b = discretize(kUnitSphere, 4);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.nodes() == b.nodes());
  CHECK(a.fingerprint() != discretize(kUnitSphere, 3).fingerprint());
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(discretize(SetSpec{Sphere{{0, 0, 0}, -1.0}}, 2), ValidationError);
  CHECK_THROWS_AS(discretize(SetSpec{Segment{{0, 0, 0}, {0, 0, 0}}}, 2), ValidationError);
  CHECK_THROWS_AS(discretize(kUnitSphere, 0), ValidationError);
  CHECK_FALSE(is_bounded(SetSpec{HalfSpace{{0, 0, 0}, {0, 0, 1}}}));
}

TEST_CASE("restriction keeps panels whose node lies in the window") {
  const auto s = discretize(kUnitSphere, 4);
  const SetSpec upper{HalfSpace{{0, 0, 0}, {0, 0, 1}}};
  const auto idx = restrict_indices(s, upper);
  CHECK(idx.size() > 0);
  CHECK(idx.size() < s.size());
  for (auto i : idx) CHECK(s.node(i)[2] >= -1e-9);
  const auto sub = s.subset(idx, upper);
  const auto emb = embed_indices(sub, s);
  REQUIRE(emb.has_value());
  CHECK(*emb == idx);
}

TEST_CASE("ray exhaustion is nested") {
  const std::vector<double> radii{2, 4, 8};
  const auto stages = exhaustion(Ray{{1, 0}, {1, 0}}, radii, 4);
  REQUIRE(stages.size() == 3);
  for (std::size_t k = 1; k < stages.size(); ++k) {
    CHECK(stages[k].size() > stages[k - 1].size());
    CHECK(embed_indices(stages[k - 1], stages[k]).has_value());
  }
}

TEST_CASE("membership") {
  const Point on{0, 0, 1};
  const Point off{0, 0, 2};
  CHECK(contains(kUnitSphere, on));
  CHECK_FALSE(contains(kUnitSphere, off));
  CHECK(contains(SetSpec{Annulus{{0, 0, 0}, 1.0, 2.0}}, off));
}
