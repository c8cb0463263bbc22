#include <doctest.h>

#include <random>

#include "conflow/corpus.hpp"
#include "conflow/lightcone.hpp"
#include "oracles.hpp"

using namespace conflow;

namespace {

double kappa_abs_dev(const VectorField& k, double target) {
  double d = 0;
  for (std::size_t p = 0; p < k.lattice().size(); ++p) {
    double s = 0;
    for (int i = 0; i < k.dim(); ++i) s += std::norm(k[i][p]);
    d = std::max(d, std::abs(std::sqrt(s) - target));
  }
  return d;
}

ScalarField kappa_abs(const VectorField& k) {
  ScalarField s(k.lattice());
  for (int i = 0; i < k.dim(); ++i) s += k[i].abs2();
  return s.map([](cplx v) { return std::sqrt(v.real()); });
}

Invariants invariants_of(const Immersion& imm) { return extract_invariants(build_frame(imm)); }

}  // namespace

TEST_CASE("conformality check") {
  TorusLattice lat(32, 32);
  CHECK(check_conformal(clifford_torus(lat)).pass);
  const double s = 1 / std::sqrt(2.0);
  VectorField f(lat, 4);
  f[0] = ScalarField::sample(lat, [s](double x, double) { return s * std::cos(x); });
  f[1] = ScalarField::sample(lat, [s](double x, double) { return s * std::sin(x); });
  f[2] = ScalarField::sample(lat, [s](double, double y) { return s * std::cos(2 * y); });
  f[3] = ScalarField::sample(lat, [s](double, double y) { return s * std::sin(2 * y); });
  auto bad = check_conformal({3, f});
  CHECK_FALSE(bad.pass);
  CHECK(bad.conformal_ratio > 0.1);
  CHECK(check_conformal(moebius_transform(clifford_torus(lat), random_lorentz(5, 4, 0.2))).pass);
}

TEST_CASE("normalized lift of the Clifford torus") {
  TorusLattice lat(32, 32);
  auto lift = normalized_lift(clifford_torus(lat));
  CHECK((lift.u - ScalarField(lat, oracle::clifford_u)).sup_norm() < 1e-14);
  auto jet = jet_from_lift(lift.psi);
  auto g = minkowski_inner(jet.psi_z, jet.psi_z.conj());
  CHECK((g - ScalarField(lat, 0.5)).sup_norm() < 1e-10);

  // w = 2z: the same surface sampled in w on a doubled lattice.
  TorusLattice big(32, 32, 4 * pi, 4 * pi);
  auto half = clifford_torus(big);
  for (int a = 0; a < 4; ++a) {
    half.f[a] = ScalarField::sample(big, [a](double x, double y) {
      const double s = 1 / std::sqrt(2.0);
      const double v[4] = {std::cos(x / 2), std::sin(x / 2), std::cos(y / 2), std::sin(y / 2)};
      return s * v[a];
    });
  }
  auto lw = normalized_lift(half);
  double d = 0;
  for (int a = 0; a < 5; ++a)
    for (std::size_t p = 0; p < lat.size(); ++p) d = std::max(d, std::abs(lw.psi[a][p] - 2.0 * lift.psi[a][p]));
  CHECK(d < 1e-12);
}

TEST_CASE("central sphere frame relations") {
  TorusLattice lat(32, 32);
  for (const auto& imm : {clifford_torus(lat), clifford_torus(lat, 4), cmc_gauge_torus(lat, 1, 2),
                          moebius_transform(clifford_torus(lat), lorentz_boost(5, 1, 0.4))}) {
    Frame fr = build_frame(imm);
    CHECK(frame_defect(fr) < 1e-9);
  }
  Frame fr = build_frame(clifford_torus(lat));
  Invariants inv = extract_invariants(fr);
  VectorField closed = fr.psi_zzbar * 2.0 - (2.0 * inv.q) * fr.psi;
  CHECK((closed - fr.psi_hat).sup_norm() < 1e-12);
  CHECK((inv.q - ScalarField(lat, oracle::clifford_q)).sup_norm() < 1e-12);
  CHECK(inv.q.sup_imag() < 1e-15);
}

TEST_CASE("Clifford torus invariants") {
  TorusLattice lat(32, 32);
  for (int n : {3, 4}) {
    Frame fr = build_frame(clifford_torus(lat, n));
    Invariants inv = extract_invariants(fr);
    CHECK(inv.c.sup_norm() < 1e-9);
    CHECK(kappa_abs_dev(inv.kappa, oracle::clifford_kappa_abs) < 1e-9);
    CHECK(std::abs(willmore_energy(inv.kappa) - oracle::clifford_willmore) < 1e-8);
    auto r = integrability_residuals(inv, fr);
    CHECK(r.gauss < 1e-9);
    CHECK(r.codazzi < 1e-9);
    CHECK(r.ricci < 1e-9);
    // Inhomogeneous Hill equation with kappa re-embedded.
    VectorField hill = fr.psi_zz + (0.5 * inv.c) * fr.psi - embed_normal(fr, inv.kappa);
    CHECK(hill.sup_norm() < 1e-9);
    // Minimal in S^3: e0 has no V-perp part.
    VectorField e0(lat, n + 2);
    e0[0] = ScalarField(lat, 1.0);
    VectorField perp = e0 - project_V(fr, e0);
    const std::size_t p = lat.index(5, 9);
    auto h = sphere_mean_curvature(perp.point(p), fr.psi.point(p));
    for (auto x : h) CHECK(std::abs(x) < 1e-12);
  }
}

TEST_CASE("totally umbilic map has vanishing Hopf differential") {
  TorusLattice lat(16, 16, 2 * pi, 2.0);
  Frame fr = frame_from_jet(umbilic_sphere_jet(lat), 3);
  Invariants inv = extract_invariants(fr);
  CHECK(inv.kappa.sup_norm() < 1e-12);
  CHECK((inv.c - ScalarField(lat, 0.5)).sup_norm() < 1e-12);
  CHECK(willmore_energy(inv.kappa) == doctest::Approx(0).epsilon(1e-20));
  CHECK(frame_defect(fr) < 1e-12);
}

TEST_CASE("invariants are Moebius invariant") {
  TorusLattice lat(64, 64);
  auto base = clifford_torus(lat);
  Invariants i0 = invariants_of(base);
  const double w0 = willmore_energy(i0.kappa);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto imm = moebius_transform(base, random_lorentz(5, 100 + seed, 0.3));
    Invariants inv = invariants_of(imm);
    CHECK((inv.c - i0.c).sup_norm() < 1e-9);
    CHECK((kappa_abs(inv.kappa) - kappa_abs(i0.kappa)).sup_norm() < 1e-9);
    CHECK(std::abs(willmore_energy(inv.kappa) - w0) < 1e-8);
  }
}

TEST_CASE("transformation of c and kappa under linear coordinate changes") {
  const int N = 32;
  TorusLattice lat(N, N);
  auto imm = moebius_transform(clifford_torus(lat), lorentz_boost(5, 2, 0.3));
  Frame fr = build_frame(imm);
  Invariants inv = extract_invariants(fr);
  VectorField amb = embed_normal(fr, inv.kappa);

  // w = i z: the surface as a function of w is f(-i w), i.e. (x', y') -> (y', -x').
  Immersion rot{3, VectorField(lat, 4)};
  for (int a = 0; a < 4; ++a)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) rot.f[a].at(j, k) = imm.f[a].at(k, (N - j) % N);
  Frame fw = build_frame(rot);
  Invariants iw = extract_invariants(fw);
  VectorField aw = embed_normal(fw, iw.kappa);
  const cplx lambda(0, 1);
  double dk = 0, dc = 0;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      const std::size_t pw = lat.index(j, k), pz = lat.index(k, (N - j) % N);
      dc = std::max(dc, std::abs(iw.c[pw] - inv.c[pz] / (lambda * lambda)));
      for (int a = 0; a < 5; ++a) dk = std::max(dk, std::abs(aw[a][pw] - amb[a][pz] * std::abs(lambda) / (lambda * lambda)));
    }
  CHECK(dk < 1e-8);
  CHECK(dc < 1e-8);
}

TEST_CASE("normal connection") {
  TorusLattice lat(32, 32);
  {
    Frame fr = build_frame(clifford_torus(lat));
    auto nd = normal_connection(fr, fr.xi[0]);
    CHECK(nd.dz.sup_norm() < 1e-12);
    Invariants inv = extract_invariants(fr);
    CHECK((nd.coef_psi_zbar + 2.0 * inv.kappa[0]).sup_norm() < 1e-8);
    CHECK((nd.coef_psi - normal_inner(VectorField({ScalarField(lat, 1.0)}), inv.chi)).sup_norm() < 1e-8);
    CHECK_THROWS_AS(normal_connection(fr, fr.psi), Error);
  }
  {
    TorusLattice lat(64, 64);
    auto imm = moebius_transform(clifford_torus(lat, 4), random_lorentz(6, 9, 0.2));
    Frame fr = build_frame(imm);
    Invariants inv = extract_invariants(fr);
    auto a = ScalarField::sample(lat, [](double x, double y) { return 1 + 0.3 * std::sin(x + 2 * y); });
    auto b = ScalarField::sample(lat, [](double x, double y) { return 0.5 * std::cos(x - y); });
    VectorField xi = a * fr.xi[0] + b * fr.xi[1];
    VectorField eta = b * fr.xi[0] - (a * a) * fr.xi[1];
    auto dxi = normal_connection(fr, xi), deta = normal_connection(fr, eta);
    auto lhs = deriv_z(minkowski_inner(xi, eta));
    auto rhs = minkowski_inner(dxi.dz, eta) + minkowski_inner(xi, deta.dz);
    CHECK((lhs - rhs).sup_norm() < 1e-8);
    VectorField k({a, b});
    CHECK((dxi.coef_psi_zbar + 2.0 * normal_inner(k, inv.kappa)).sup_norm() < 1e-8);
    // Component form of D agrees with the projected ambient derivative.
    VectorField amb = embed_normal(fr, Dz(fr, k));
    CHECK((amb - dxi.dz).sup_norm() < 1e-8);
  }
}

TEST_CASE("integrability residuals respond linearly to perturbations of c") {
  TorusLattice lat(32, 32);
  Frame fr = build_frame(clifford_torus(lat));
  Invariants inv = extract_invariants(fr);
  auto r = ScalarField::sample(lat, [](double x, double y) { return cplx(std::sin(x) * std::cos(2 * y), 0.5 * std::cos(y)); });
  const double eps = 1e-2;
  inv.c += eps * r;
  auto rep = integrability_residuals(inv, fr);
  CHECK(rep.gauss == doctest::Approx(eps / 2 * deriv_zbar(r).sup_norm()).epsilon(1e-6));
  CHECK(rep.ricci == 0);
}

TEST_CASE("Willmore energy") {
  TorusLattice lat(16, 16);
  CHECK(willmore_energy(VectorField(lat, 1)) == 0);
  VectorField k({ScalarField(lat, cplx(0, oracle::clifford_kappa_abs))});
  CHECK(willmore_energy(k) == doctest::Approx(oracle::clifford_willmore).epsilon(1e-14));
}

TEST_CASE("Euclidean cross-check") {
  TorusLattice lat(32, 32), fine(64, 64);
  auto c = euclidean_crosscheck(clifford_torus(lat));
  CHECK(c.kappa_diff < 1e-9);
  CHECK(c.c_diff < 1e-9);
  CHECK(c.mean_curvature_sup < 1e-12);
  auto g = euclidean_crosscheck(cmc_gauge_torus(lat, 1, 2));
  CHECK(g.kappa_diff < 1e-9);
  CHECK(g.c_diff < 1e-9);
  CHECK(g.mean_curvature_sup == doctest::Approx(0.75));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = euclidean_crosscheck(moebius_transform(clifford_torus(fine), random_lorentz(5, seed, 0.3)));
    CHECK(r.kappa_diff < 1e-7);
    CHECK(r.c_diff < 1e-7);
  }
  auto rev = euclidean_crosscheck(revolution_isothermic(32, 32));
  CHECK(rev.kappa_diff < 1e-7);
  CHECK(rev.c_diff < 1e-7);
  CHECK_THROWS_AS(euclidean_crosscheck(clifford_torus(lat, 4)), Error);
}

TEST_CASE("integrability residuals converge spectrally") {
  auto residual = [](const Immersion& imm) {
    Frame fr = build_frame(imm);
    auto r = integrability_residuals(extract_invariants(fr, 1.0), fr);
    return std::max({r.gauss, r.codazzi, r.ricci});
  };
  auto boosted = [](int n) { return moebius_transform(clifford_torus(TorusLattice(n, n)), lorentz_boost(5, 1, 0.4)); };
  auto twisted = [](int n) { return moebius_transform(cmc_gauge_torus(TorusLattice(n, n), 1, 2), random_lorentz(5, 17, 0.1)); };
  CHECK(residual(boosted(16)) / residual(boosted(32)) >= 100);
  CHECK(residual(twisted(16)) / residual(twisted(32)) >= 100);
  CHECK(residual(revolution_isothermic(16, 16)) / residual(revolution_isothermic(32, 32)) >= 100);
}

TEST_CASE("reconstruction from invariants") {
  TorusLattice lat(64, 64);
  ScalarField c(lat), k(lat, oracle::clifford_kappa_abs);
  auto rec = reconstruct_surface(c, k);
  CHECK(rec.holonomy < 1e-6);
  CHECK(rec.roundtrip < 1e-6);
  CHECK(check_conformal(rec.imm).pass);
  auto inv = invariants_of(rec.imm);
  CHECK(std::abs(willmore_energy(inv.kappa) - oracle::clifford_willmore) < 1e-6);

  TorusLattice small(32, 32);
  ReconstructOptions open;
  open.check_holonomy = false;
  auto flat = reconstruct_surface(ScalarField(small), ScalarField(small), open);
  CHECK(flat.span_defect < 1e-12);

  // Doubled kappa is the Clifford torus on the half-period lattice: a fourfold cover.
  auto cover = reconstruct_surface(ScalarField(small), ScalarField(small, 2 * oracle::clifford_kappa_abs));
  CHECK(willmore_energy(extract_invariants(build_frame(cover.imm), 1e-5).kappa) == doctest::Approx(4 * oracle::clifford_willmore).epsilon(1e-6));
  try {
    reconstruct_surface(ScalarField(small), ScalarField(small, 1.5 * oracle::clifford_kappa_abs));
    FAIL("expected HolonomyDefect");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::holonomy_defect);
  }
  auto wavy = ScalarField::sample(small, [](double x, double) { return oracle::clifford_kappa_abs * (1 + 0.1 * std::cos(x)); });
  try {
    reconstruct_surface(ScalarField(small), wavy);
    FAIL("expected NotIntegrable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_integrable);
  }
}

TEST_CASE("rotation torus corpus") {
  RevolutionProfile flat;
  flat.wobble = 0;
  CHECK(revolution_period(flat) == doctest::Approx(2 * pi).epsilon(1e-14));
  Invariants c = invariants_of(revolution_isothermic(16, 16, flat));
  CHECK(kappa_abs_dev(c.kappa, oracle::clifford_kappa_abs) < 1e-12);
  CHECK(c.c.sup_norm() < 1e-12);

  auto imm = revolution_isothermic(32, 32);
  CHECK(check_conformal(imm).pass);
  Invariants inv = invariants_of(imm);
  CHECK(inv.kappa.sup_imag() < 1e-12);
  CHECK((inv.c - ScalarField(inv.c.lattice(), inv.c.mean())).sup_norm() > 1e-3);
  CHECK(willmore_energy(inv.kappa) > oracle::clifford_willmore);
  CHECK_THROWS_AS(revolution_isothermic(16, 16, {0.1, 0.2, 2}), Error);
}
