#include <doctest.h>

#include <cmath>
#include <random>

#include "conflow/corpus.hpp"
#include "conflow/flows.hpp"
#include "conflow/special.hpp"
#include "oracles.hpp"

using namespace conflow;

namespace {

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

struct Data {
  Frame fr;
  Invariants inv;
};

Data data_of(const Immersion& imm) {
  Frame fr = build_frame(imm);
  Invariants inv = extract_invariants(fr);
  return {fr, inv};
}

// Clifford torus in the coordinate w = e^{i pi/4} z on the square lattice of side 2 pi sqrt 2.
Immersion rotated_clifford(int n) {
  const double L = 2 * pi * std::sqrt(2.0), s = 1 / std::sqrt(2.0);
  TorusLattice lat(n, n, L, L);
  VectorField f(lat, 4);
  auto u = [s](double x, double y) { return s * (x - y); };
  auto v = [s](double x, double y) { return s * (x + y); };
  f[0] = ScalarField::sample(lat, [&](double x, double y) { return s * std::cos(u(x, y)); });
  f[1] = ScalarField::sample(lat, [&](double x, double y) { return s * std::sin(u(x, y)); });
  f[2] = ScalarField::sample(lat, [&](double x, double y) { return s * std::cos(v(x, y)); });
  f[3] = ScalarField::sample(lat, [&](double x, double y) { return s * std::sin(v(x, y)); });
  return {3, f};
}

double mean_real(const ScalarField& f) { return f.mean().real(); }

}  // namespace

TEST_CASE("Dupin residual") {
  Data cl = data_of(clifford_torus(TorusLattice(16, 16)));
  DupinReport d = dupin_residual(cl.inv);
  CHECK(d.schwarzian_zbar < 1e-12);
  CHECK(d.quartic_z < 1e-12);

  Data cmc = data_of(cmc_gauge_torus(TorusLattice(32, 32), 1, 2));
  CHECK(dupin_residual(cmc.inv).schwarzian_zbar < 1e-10);
  CHECK(dupin_residual(cmc.inv).quartic_z < 1e-10);

  Data rev = data_of(revolution_isothermic(32, 32));
  DupinReport r = dupin_residual(rev.inv);
  CHECK(r.schwarzian_zbar > 1e-3);
  // (kappa kappabar^3)_z = kappabar^2 c_zbar / 2 on integrable data
  ScalarField kb = rev.inv.kappa[0].conj();
  ScalarField lhs = deriv_z(rev.inv.kappa[0] * kb * kb * kb);
  ScalarField rhs = 0.5 * kb * kb * deriv_zbar(rev.inv.c);
  CHECK((lhs - rhs).sup_norm() < 1e-8);

  Data up = data_of(embed_up(clifford_torus(TorusLattice(16, 16))));
  CHECK(code_of([&] { dupin_residual(up.inv); }) == ErrorCode::not_implemented_dim);
}

TEST_CASE("isothermic residual depends on the coordinate") {
  Data cl = data_of(clifford_torus(TorusLattice(16, 16)));
  CHECK(isothermic_residual(cl.inv) < 1e-12);
  CHECK(std::abs(std::abs(cl.inv.kappa[0][0]) - oracle::clifford_kappa_abs) < 1e-12);

  Data rot = data_of(rotated_clifford(32));
  CHECK(isothermic_residual(rot.inv) == doctest::Approx(oracle::clifford_kappa_abs).epsilon(1e-9));
  CHECK(std::abs(rot.inv.kappa[0][0].real()) < 1e-9);

  TorusLattice lat(8, 8);
  VectorField zero(lat, 1);
  CHECK(isothermic_residual(Invariants{ScalarField(lat), zero, ScalarField(lat), zero}) == 0);
}

TEST_CASE("T-transform preserves the integrability residuals") {
  Data rev = data_of(revolution_isothermic(32, 32));
  IntegrabilityReport r0 = integrability_residuals(rev.inv, rev.fr);
  for (double r : {-1.0, 0.5, 3.0}) {
    CAPTURE(r);
    Invariants t = t_transform(rev.fr, rev.inv, r);
    CHECK((t.c - rev.inv.c - ScalarField(t.c.lattice(), r)).sup_norm() < 1e-15);
    IntegrabilityReport rt = integrability_residuals(t, rev.fr);
    CHECK(std::abs(rt.gauss - r0.gauss) < 1e-10);
    CHECK(rt.codazzi < r0.codazzi + 1e-10);
  }
  Invariants id = t_transform(rev.fr, rev.inv, 0);
  CHECK((id.c - rev.inv.c).sup_norm() == 0);

  Data p = data_of(perturbed_clifford(TorusLattice(32, 32)));
  CHECK(code_of([&] { t_transform(p.fr, p.inv, 1); }) == ErrorCode::not_isothermic);
}

TEST_CASE("equal Hopf differentials and shifted Schwarzian") {
  // Real kappa survives c -> c + 1; complex kappa does not.
  Data rev = data_of(revolution_isothermic(32, 32));
  Invariants a = invariants_from(rev.fr, rev.inv.c + ScalarField(rev.inv.c.lattice(), 1.0), rev.inv.kappa);
  CHECK(integrability_residuals(a, rev.fr).codazzi < 1e-9);

  Data p = data_of(perturbed_clifford(TorusLattice(32, 32)));
  Invariants b = invariants_from(p.fr, p.inv.c + ScalarField(p.inv.c.lattice(), 1.0), p.inv.kappa);
  const double cod = integrability_residuals(b, p.fr).codazzi;
  CHECK(cod == doctest::Approx(0.5 * p.inv.kappa.sup_imag()).epsilon(1e-3));
  CHECK(cod > 1e-3);
}

TEST_CASE("Calapso equation") {
  TorusLattice lat(32, 32);
  CHECK(calapso_residual(ScalarField(lat, 0.7)) == 0);
  Data rev = data_of(revolution_isothermic(32, 32));
  CHECK(calapso_residual(rev.inv.kappa[0]) < 1e-8);
  Data cmc = data_of(cmc_gauge_torus(lat, 2, 3));
  CHECK(calapso_residual(cmc.inv.kappa[0]) < 1e-7);

  ScalarField bumpy = ScalarField::sample(lat, [](double x, double y) { return 2 + std::cos(x) * std::sin(2 * y); });
  CHECK(calapso_residual(bumpy) > 1e-2);
  CHECK(code_of([&] { calapso_residual(ScalarField::sample(lat, [](double x, double) { return std::cos(x); })); }) ==
        ErrorCode::kappa_vanishes);
  CHECK(code_of([&] { calapso_residual(ScalarField(lat, cplx(1, 1))); }) == ErrorCode::non_real_input);
}

TEST_CASE("Willmore and constrained Willmore residuals") {
  Data cl = data_of(clifford_torus(TorusLattice(32, 32)));
  CHECK(willmore_residual(cl.fr, cl.inv).full < 1e-10);
  CHECK(constrained_willmore_residual(cl.fr, cl.inv, 0.0) < 1e-10);

  Data cmc = data_of(cmc_gauge_torus(TorusLattice(32, 32), 1, 2));
  const double H = 0.5 * mean_real(cmc.inv.c);
  const double ksup = cmc.inv.kappa.sup_norm();
  CHECK(std::abs(H) > 0.1);
  WillmoreReport w = willmore_residual(cmc.fr, cmc.inv);
  CHECK(w.full == doctest::Approx(std::abs(H) * ksup).epsilon(1e-10));
  CHECK(w.codazzi < 1e-12);
  CHECK(constrained_willmore_residual(cmc.fr, cmc.inv, H) < 1e-11);
  CHECK(constrained_willmore_residual(cmc.fr, cmc.inv, H + 1) == doctest::Approx(ksup).epsilon(1e-10));

  Data rev = data_of(revolution_isothermic(32, 32));
  CHECK(willmore_residual(rev.fr, rev.inv).willmore > 1e-3);
}

TEST_CASE("Willmore associated family") {
  TorusLattice lat(32, 32);
  Frame flat = flat_normal_frame(lat, 2);
  Invariants h = helix_kappa(HelixParams{}, lat);
  for (int j = 0; j < 8; ++j) {
    const cplx l = std::polar(1.0, 2 * pi * j / 8);
    CAPTURE(j);
    AssociatedMember m = willmore_associated_family(flat, h, 0.0, l);
    IntegrabilityReport r = integrability_residuals(m.inv, flat);
    CHECK(std::max({r.gauss, r.codazzi, r.ricci}) < 1e-12);
    CHECK(constrained_willmore_residual(flat, m.inv, m.q) < 1e-12);
    CHECK((m.inv.c - h.c).sup_norm() < 1e-15);
  }
  AssociatedMember i = willmore_associated_family(flat, h, 0.0, cplx(0, 1));
  CHECK((i.inv.kappa - h.kappa * cplx(0, 1)).sup_norm() < 1e-15);
  AssociatedMember m1 = willmore_associated_family(flat, h, 0.0, -1.0);
  CHECK((m1.inv.kappa + h.kappa).sup_norm() < 1e-15);

  Data cmc = data_of(cmc_gauge_torus(lat, 1, 2));
  const double H = 0.5 * mean_real(cmc.inv.c);
  for (int j = 0; j < 8; ++j) {
    const cplx l = std::polar(1.0, 2 * pi * j / 8);
    AssociatedMember m = willmore_associated_family(cmc.fr, cmc.inv, H, l);
    IntegrabilityReport r = integrability_residuals(m.inv, cmc.fr);
    CHECK(std::max(r.gauss, r.codazzi) < 1e-10);
    CHECK(constrained_willmore_residual(cmc.fr, m.inv, m.q) < 1e-10);
  }

  CHECK(code_of([&] { willmore_associated_family(flat, h, 0.0, 1.1); }) == ErrorCode::not_unit);
  Data rev = data_of(revolution_isothermic(32, 32));
  CHECK(code_of([&] { willmore_associated_family(rev.fr, rev.inv, 0.0, 1.0); }) == ErrorCode::not_constrained_willmore);
}

TEST_CASE("space form vector of CMC tori") {
  Data cl = data_of(clifford_torus(TorusLattice(32, 32)));
  SpaceFormData d = cmc_vector(cl.fr, cl.inv, 0);
  const double k4 = std::pow(oracle::clifford_kappa_abs, 4);
  CHECK(d.K == doctest::Approx(4 * k4).epsilon(1e-12));
  CHECK(d.constancy_defect < 1e-8);
  CHECK(d.curvature_defect < 1e-12);
  CHECK(d.mean_curvature_defect < 1e-12);
  CHECK(d.metric_defect < 1e-12);

  for (auto [a, b] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{3, 1}}) {
    CAPTURE(a);
    Data cmc = data_of(cmc_gauge_torus(TorusLattice(32, 32), a, b));
    const double H = 0.5 * mean_real(cmc.inv.c);
    SpaceFormData s = cmc_vector(cmc.fr, cmc.inv, H);
    CHECK(s.constancy_defect < 1e-8);
    CHECK(s.curvature_defect < 1e-10);
    CHECK(s.mean_curvature_defect < 1e-12);
    CHECK(s.v0.size() == 5);
  }

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  const double shift = 1e-3 * U(rng);
  Invariants noisy = invariants_from(cl.fr, cl.inv.c, cl.inv.kappa + VectorField({ScalarField(cl.fr.lattice(), shift)}));
  try {
    cmc_vector(cl.fr, noisy, 0);
    FAIL("expected NonConstant");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_constant);
  }
  CHECK(code_of([&] { cmc_vector(cl.fr, cl.inv, 1); }) == ErrorCode::not_cmc);
  Data rev = data_of(revolution_isothermic(32, 32));
  CHECK(code_of([&] { cmc_vector(rev.fr, rev.inv, 0); }) == ErrorCode::not_cmc);
}

TEST_CASE("Lawson correspondence") {
  for (auto [a, b] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 3}}) {
    CAPTURE(a);
    Data cmc = data_of(cmc_gauge_torus(TorusLattice(32, 32), a, b));
    SpaceFormData s = cmc_vector(cmc.fr, cmc.inv, 0.5 * mean_real(cmc.inv.c));
    double first = 0;
    for (double r : {0.0, 1.0, 2.0}) {
      LawsonMember m = lawson_family(cmc.fr, s, cmc.inv, r);
      CHECK(m.H == doctest::Approx(s.H + r / 2));
      if (r == 0) {
        first = m.K + m.H * m.H;
        CHECK(m.K == doctest::Approx(s.K).epsilon(1e-10));
      }
      CHECK(std::abs(m.K + m.H * m.H - first) < 1e-9);
    }
  }
  Data cl = data_of(clifford_torus(TorusLattice(32, 32)));
  SpaceFormData s = cmc_vector(cl.fr, cl.inv, 0);
  LawsonMember two = lawson_family(cl.fr, s, cl.inv, 2);
  CHECK(two.H == doctest::Approx(1));
  CHECK(two.K == doctest::Approx(s.K - 1).epsilon(1e-10));
}

TEST_CASE("C* action on CMC tori") {
  Data cmc = data_of(cmc_gauge_torus(TorusLattice(32, 32), 1, 2));
  SpaceFormData s = cmc_vector(cmc.fr, cmc.inv, 0.5 * mean_real(cmc.inv.c));
  CStarMember id = cstar_action(cmc.fr, s, cmc.inv, 1.0);
  CHECK((id.inv.c - cmc.inv.c).sup_norm() < 1e-15);
  CHECK((id.inv.kappa - cmc.inv.kappa).sup_norm() < 1e-15);

  for (int j = 0; j < 6; ++j) {
    const cplx l = std::polar(1.0, 0.4 + j);
    CStarMember m = cstar_action(cmc.fr, s, cmc.inv, l);
    CHECK(m.H == doctest::Approx(s.H).epsilon(1e-14));
    CHECK(m.K == doctest::Approx(s.K).epsilon(1e-14));
    CHECK(m.cmc_residual < 1e-10);
    CHECK(constrained_willmore_residual(cmc.fr, m.inv, m.q) < 1e-10);
  }
  CStarMember big = cstar_action(cmc.fr, s, cmc.inv, cplx(1.2, 0.9));
  CHECK(big.H == doctest::Approx(1.5 * s.H));
  CHECK(big.cmc_residual < 1e-10);
  CHECK(big.curvature_defect < 1e-12);
  CHECK(big.K + big.H * big.H == doctest::Approx(s.K + s.H * s.H));
  IntegrabilityReport r = integrability_residuals(big.inv, cmc.fr);
  CHECK(std::max(r.gauss, r.codazzi) < 1e-10);

  Data cl = data_of(clifford_torus(TorusLattice(32, 32)));
  SpaceFormData s0 = cmc_vector(cl.fr, cl.inv, 0);
  CStarMember two = cstar_action(cl.fr, s0, cl.inv, 2.0);
  CHECK((two.inv.kappa - cl.inv.kappa).sup_norm() < 1e-15);
  CHECK((two.inv.c - cl.inv.c).sup_norm() < 1e-12);
  CHECK(code_of([&] { cstar_action(cl.fr, s0, cl.inv, 0.0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("constant length helix solutions") {
  TorusLattice lat(32, 32);
  Invariants h = helix_kappa(HelixParams{}, lat);
  CHECK(std::abs(h.kappa[0].at(8, 3) - std::cos(lat.x(8))) < 1e-15);
  CHECK(std::abs(h.kappa[1].at(8, 3) - std::sin(lat.x(8))) < 1e-15);
  CHECK((normal_inner(h.kappa, h.kappa) - ScalarField(lat, 1.0)).sup_norm() < 1e-14);
  Frame flat = flat_normal_frame(lat, 2);
  IsothermicWillmoreReport iw = isothermic_willmore_report(flat, h);
  CHECK(iw.isothermic == 0);
  CHECK(iw.willmore < 1e-12);
  CHECK(iw.gradient < 1e-12);

  HelixParams p{2, {0, 0.6, 0.8}, {0.6, -0.64, 0.48}};
  Invariants h3 = helix_kappa(p, lat);
  CHECK(integrability_residuals(h3, flat_normal_frame(lat, 3)).codazzi < 1e-12);

  CHECK(code_of([&] { helix_kappa(HelixParams{0.3}, lat); }) == ErrorCode::non_periodic);
  CHECK(code_of([&] { helix_kappa(HelixParams{0.5, {1, 0}, {1, 1}}, lat); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { helix_kappa(HelixParams{0.5, {1}, {1}}, lat); }) == ErrorCode::dimension_mismatch);
}

TEST_CASE("elastica equation") {
  // kappa(x) = k(2x) for h = 1: k(s) = cos(s/2) e1 + sin(s/2) e2, gamma = c/2 - |k1|^2
  const int n = 64;
  const double L = 4 * pi;
  std::vector<Line> k(2, Line(n));
  for (int i = 0; i < n; ++i) {
    const double s = i * L / n;
    k[0][i] = std::cos(s / 2);
    k[1][i] = std::sin(s / 2);
  }
  CHECK(elastica_residual(k, L, 1.0, 0.25 - 1) < 1e-12);
  CHECK(elastica_residual(k, L, 3.0, -0.75) < 1e-12);
  CHECK(elastica_residual(k, L, 1.0, 0.0) > 0.5);
  CHECK(elastica_residual({Line(n), Line(n)}, L, cplx(1, 2), 5.0) == 0);

  std::mt19937 rng(3);
  std::normal_distribution<double> N;
  std::vector<Line> r(2, Line(n));
  for (auto& c : r)
    for (auto& v : c) v = N(rng);
  CHECK(elastica_residual(r, L, 1.0, 0.1) > 1e-2);
  CHECK(code_of([&] { elastica_residual(k, L, 0.0, 0.1); }) == ErrorCode::invalid_argument);
}
