#include <doctest.h>

#include <random>

#include "balayage/error.hpp"
#include "balayage/qp.hpp"

using namespace balayage;

namespace {

const KernelMatrix k21 = KernelMatrix::from_dense(2, {2, 1, 1, 2});

KernelMatrix random_spd(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> a(n * n);
  for (auto& v : a) v = g(rng);
  std::vector<double> k(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) k[i * n + j] += a[i * n + l] * a[j * n + l];
    }
    k[i * n + i] += 0.1;
  }
  return KernelMatrix::from_dense(n, std::move(k));
}

}  // namespace

TEST_CASE("cone: interior solution") {
  const std::vector<double> b{1, 1};
  const auto s = solve_cone(k21, b);
  CHECK(s.converged);
  CHECK(s.w[0] == doctest::Approx(1.0 / 3.0));
  CHECK(s.w[1] == doctest::Approx(1.0 / 3.0));
  CHECK(s.objective == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("cone: one active bound") {
  const std::vector<double> b{1, 0};
  const auto s = solve_cone(k21, b);
  CHECK(s.w[0] == doctest::Approx(0.5));
  CHECK(s.w[1] == doctest::Approx(0.0).epsilon(1e-10));
  // gradient (Kw - b) on the inactive side is (0, 1/2) >= 0
  CHECK(s.kkt_stationarity < 1e-8);
  const auto bf = brute_force(k21, b, Constraint::nonneg_cone);
  CHECK(bf.w[0] == doctest::Approx(0.5));
  CHECK(bf.w[1] == 0.0);
}

TEST_CASE("simplex: hand-enumerated supports") {
  // on w1 + w2 = 1 the objective is 2 (t - 1)^2 with t = w1, so support {1} wins
  const std::vector<double> b{1, 0};
  const auto s = solve_simplex(k21, b);
  CHECK(s.w[0] == doctest::Approx(1.0));
  CHECK(s.w[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-10));

  const auto id = KernelMatrix::from_dense(2, {1, 0, 0, 1});
  const std::vector<double> zero{0, 0};
  const auto e = solve_simplex(id, zero);
  CHECK(e.w[0] == doctest::Approx(0.5));
  CHECK(e.w[1] == doctest::Approx(0.5));
  CHECK(e.objective == doctest::Approx(0.5));
}

TEST_CASE("simplex projection") {
  const std::vector<double> v{0.5, 0.5, 0.5};
  const auto p = project_simplex(v);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0));
  const std::vector<double> far{3, 0, -1};
  const auto q = project_simplex(far);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == 0.0);
  CHECK(q[2] == 0.0);
}

TEST_CASE("projected gradient agrees with support enumeration") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 7);
    const auto K = random_spd(rng, n);
    std::vector<double> b(n);
    for (auto& v : b) v = u(rng);
    for (auto c : {Constraint::nonneg_cone, Constraint::simplex}) {
      const auto pg = solve(K, b, c);
      const auto bf = brute_force(K, b, c);
      CHECK(pg.converged);
      CHECK(pg.objective == doctest::Approx(bf.objective).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("invalid inputs") {
  const std::vector<double> b{1};
  CHECK_THROWS_AS(solve_cone(k21, b), ValidationError);
  const std::vector<double> nan{std::nan(""), 0.0};
  CHECK_THROWS_AS(solve_cone(k21, nan), ValidationError);
}
