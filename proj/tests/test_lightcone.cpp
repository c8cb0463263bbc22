#include <doctest.h>

#include <random>

#include "conflow/lightcone.hpp"

using namespace conflow;

namespace {

RVec random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  RVec v(static_cast<std::size_t>(dim));
  double n = 0;
  for (double& x : v) x = nd(rng), n += x * x;
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

}  // namespace

TEST_CASE("Minkowski product") {
  RVec e0{1, 0, 0, 0, 0};
  CHECK(minkowski_inner(e0, e0) == -1);
  std::mt19937_64 rng(1);
  auto x = random_unit(rng, 4);
  RVec lift{1};
  lift.insert(lift.end(), x.begin(), x.end());
  CHECK(std::abs(minkowski_inner(lift, lift)) < 1e-15);
  auto u = random_unit(rng, 5), v = random_unit(rng, 5);
  CHECK(minkowski_inner(u, v) == minkowski_inner(v, u));
  CHECK_THROWS_AS(minkowski_inner(u, RVec{1, 2}), Error);
}

TEST_CASE("Euclidean lift and projection") {
  RVec e1{1, 0, 0, 0};
  CHECK(euclidean_lift(e1) == RVec{1, 1, 0, 0, 0});
  RVec e0{1, 0, 0, 0, 0};
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    auto f = random_unit(rng, 4);
    auto phi = euclidean_lift(f);
    CHECK(std::abs(minkowski_inner(phi, phi)) < 1e-14);
    CHECK(minkowski_inner(phi, e0) == doctest::Approx(-1));
    auto g = project_to_sphere(phi);
    double d = 0;
    for (int a = 0; a < 4; ++a) d = std::max(d, std::abs(g[a] - f[a]));
    REQUIRE(d < 1e-15);
  }
  CHECK_THROWS_AS(euclidean_lift(RVec{2, 0, 0}), Error);
  CHECK(project_to_sphere(RVec{2, 2, 0, 0, 0}) == RVec{1, 0, 0, 0});
  auto s = project_to_sphere(RVec{0.5, 0.3, 0.4, 0, 0});
  CHECK(s[0] == doctest::Approx(0.6));
  try {
    project_to_sphere(RVec{-1, 1, 0});
    FAIL("expected NotForward");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_forward);
  }
  try {
    project_to_sphere(RVec{1, 2, 0});
    FAIL("expected NotNull");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_null);
  }
}

TEST_CASE("conic sections") {
  RVec e0{1, 0, 0, 0, 0};
  RVec psi{3, 0, 3, 0, 0};
  auto w = conic_project(psi, e0);
  CHECK(w == RVec{1, 0, 1, 0, 0});
  CHECK(minkowski_inner(w, e0) == doctest::Approx(-1));
  RVec v0{0.3, 1, 0.2, 0, 0};
  CHECK(minkowski_inner(conic_project(psi, v0), v0) == doctest::Approx(-1));
  CHECK(section_curvature(e0) == 1);
  CHECK(section_curvature(RVec{0, 1, 0, 0, 0}) == -1);
  try {
    conic_project(RVec{1, 0, 1, 0, 0}, RVec{1, 0, 1, 0, 0});
    FAIL("expected PointAtInfinity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::point_at_infinity);
  }
}

TEST_CASE("sphere mean curvature") {
  MVec v{1, 1, 0, 0, 0};
  auto h0 = sphere_mean_curvature(MVec(5, 0.0), v);
  for (auto x : h0) CHECK(x == cplx(0));
  MVec perp{0, 0, 0.4, 0.1, 0};
  auto h = sphere_mean_curvature(perp, v);
  auto hv = minkowski_inner(std::span<const cplx>(h), std::span<const cplx>(v));
  CHECK(std::abs(hv) < 1e-15);
}

TEST_CASE("Lorentz transformations preserve the form") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto L = random_lorentz(5, seed, 0.7);
    RVec u(5), v(5);
    for (int a = 0; a < 5; ++a) u[a] = nd(rng), v[a] = nd(rng);
    CHECK(std::abs(minkowski_inner(lorentz_apply(L, u), lorentz_apply(L, v)) - minkowski_inner(u, v)) <
          1e-12 * (1 + L.norm() * L.norm()));
    CHECK(L(0, 0) >= 1);
  }
  auto B = lorentz_boost(5, 2, 0.3);
  CHECK((B.transpose() * minkowski_metric(5) * B - minkowski_metric(5)).norm() < 1e-14);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(lorentz_from_generator(bad), Error);
}
