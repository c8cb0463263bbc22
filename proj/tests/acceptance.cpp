#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "conflow/corpus.hpp"
#include "conflow/flows.hpp"
#include "conflow/lightcone.hpp"
#include "conflow/special.hpp"
#include "oracles.hpp"

using namespace conflow;
namespace fs = std::filesystem;

namespace {

const cplx I(0, 1);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "  ";
    detail += what + (ok ? "" : "[x]");
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string le(const std::string& name, double v, double tol) { return name + "=" + sci(v) + "<" + sci(tol); }

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

double sup_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double sup_dev(std::span<const cplx> a, cplx v) {
  double d = 0;
  for (auto x : a) d = std::max(d, std::abs(x - v));
  return d;
}

MapSamples1D loxodrome(int n, double k) {
  return sample_map(n, 2 * pi, [k](double x) {
    const cplx e = std::exp(I * k * x), ik = I * k;
    return std::array<cplx, 4>{e, ik * e, ik * ik * e, ik * ik * ik * e};
  });
}

MapSamples1D two_mode(int n) {
  return sample_map(n, 2 * pi, [](double x) {
    const cplx e1 = std::exp(I * x), e2 = std::exp(2.0 * I * x);
    return std::array<cplx, 4>{e1 + 0.2 * e2, I * e1 + 0.4 * I * e2, -e1 - 0.8 * e2, -I * e1 - 1.6 * I * e2};
  });
}

std::vector<cplx> random_line(int n, int band, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(static_cast<std::size_t>(n), 0.0);
  for (int m = 1; m <= band; ++m) {
    const double a = nd(rng) / m, b = nd(rng) / m;
    for (int i = 0; i < n; ++i) {
      const double x = 2 * pi * i / n;
      c[static_cast<std::size_t>(i)] += a * std::cos(m * x) + b * std::sin(m * x);
    }
  }
  return c;
}

double kappa_abs_dev(const VectorField& k, double target) {
  double d = 0;
  for (std::size_t p = 0; p < k.lattice().size(); ++p) {
    double s = 0;
    for (int i = 0; i < k.dim(); ++i) s += std::norm(k[i][p]);
    d = std::max(d, std::abs(std::sqrt(s) - target));
  }
  return d;
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

double worst(const IntegrabilityReport& r) { return std::max({r.gauss, r.codazzi, r.ricci}); }

// ------------------------------------------------------------------ criteria

Outcome moebius_invariance() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> nd;
  const int N = 512;
  std::vector<MapSamples1D> corpus{loxodrome(N, 1), loxodrome(N, 3), two_mode(N)};
  double inv = 0;
  int used = 0;
  while (used < 20) {
    cplx a(nd(rng), nd(rng)), b(nd(rng), nd(rng)), c(nd(rng), nd(rng)), d(nd(rng), nd(rng));
    const cplx s = std::sqrt(a * d - b * c);
    a /= s, b /= s, c /= s, d /= s;
    bool ok = true;
    for (auto& m : corpus)
      for (auto w : m.f) ok = ok && std::abs(c * w + d) > 0.3;
    if (!ok) continue;
    ++used;
    for (auto& m : corpus) inv = std::max(inv, sup_diff(schwarzian(compose_moebius(m, a, b, c, d)), schwarzian(m)));
  }
  auto mob = sample_map(64, 2 * pi, [](double) { return std::array<cplx, 4>{}; });
  const cplx a = 2, b = 1, c = 0.5, d(3, 1), det = a * d - b * c;
  for (std::size_t i = 0; i < mob.f.size(); ++i) {
    const cplx z = mob.L * static_cast<double>(i) / 64.0, den = c * z + d;
    mob.f[i] = (a * z + b) / den;
    mob.f1[i] = det / (den * den);
    mob.f2[i] = -2.0 * c * det / std::pow(den, 3);
    mob.f3[i] = 6.0 * c * c * det / std::pow(den, 4);
  }
  o.require(inv < 1e-9, le("invariance", inv, 1e-9));
  const double self = sup_dev(schwarzian_closed_form(mob), 0.0);
  o.require(self < 1e-10, le("moebius_self", self, 1e-10));
  return o;
}

Outcome loxodrome_identity() {
  Outcome o;
  double d = 0;
  for (double c0 : {0.5, 2.0, 4.5}) d = std::max(d, sup_dev(schwarzian(loxodrome(64, std::sqrt(2 * c0))), c0));
  o.require(d < 1e-10, le("S-c0", d, 1e-10));
  return o;
}

Outcome kdv_hierarchy() {
  Outcome o;
  const int n = 128;
  const double L = 2 * pi;
  auto c = random_line(n, 6, 42);
  auto c1 = line_deriv(c, L), c2 = line_deriv(c, L, 2), c3 = line_deriv(c, L, 3), c5 = line_deriv(c, L, 5);
  const double r1 = sup_diff(kdv_rhs(c, kdv_hierarchy_b(c, 1, L), L), c1);
  std::vector<cplx> e3(c.size()), e5(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    e3[i] = c3[i] + 3.0 * c[i] * c1[i];
    e5[i] = c5[i] + oracle::kdv5_c3c * c3[i] * c[i] + oracle::kdv5_c2c1 * c2[i] * c1[i] +
            oracle::kdv5_c1cc * c1[i] * c[i] * c[i];
  }
  const double r3 = sup_diff(kdv_rhs(c, kdv_hierarchy_b(c, 3, L), L), line_dealias(e3));
  const double r5 = sup_diff(kdv_rhs(c, kdv_hierarchy_b(c, 5, L), L), line_dealias(e5)) / (1 + sup_dev(e5, 0.0));
  o.require(r1 < 1e-9, le("b1", r1, 1e-9));
  o.require(r3 < 1e-9, le("b3", r3, 1e-9));
  o.require(r5 < 1e-9, le("b5_rel", r5, 1e-9));
  return o;
}

Outcome kdv_conservation() {
  Outcome o;
  const int n = 256;
  KdVState s{2 * pi, 0, std::vector<cplx>(n, 0.7)};
  KdVState s1 = s;
  for (int i = 0; i < 1000; ++i) s1 = kdv_step(s1, 1e-4, 3);
  const double still = sup_dev(s1.c, 0.7);
  KdVState w{2 * pi, 0, {}};
  for (int i = 0; i < n; ++i) {
    const double x = 2 * pi * i / n;
    w.c.push_back(std::cos(x) + 0.5 * std::sin(2 * x));
  }
  auto moments = [](const KdVState& st) {
    cplx m1 = 0, m2 = 0;
    for (auto v : st.c) m1 += v, m2 += v * v;
    return std::pair{m1, m2};
  };
  auto [a1, a2] = moments(w);
  KdVState t = w;
  for (int i = 0; i < 1000; ++i) t = kdv_step(t, 1e-4, 3);
  auto [b1, b2] = moments(t);
  const double d1 = std::abs(b1 - a1) / std::max(1.0, std::abs(a1)), d2 = std::abs(b2 - a2) / std::abs(a2);
  o.require(d1 < 1e-8, le("int_c", d1, 1e-8));
  o.require(d2 < 1e-8, le("int_c2", d2, 1e-8));
  o.require(still == 0, "constant_dev=" + sci(still));
  return o;
}

Outcome miura_consistency() {
  Outcome o;
  const double eps = 0.4;
  const int n = 64;
  LineJet jet;
  for (int i = 0; i < n; ++i) {
    const double x = 2 * pi * i / n;
    jet.v.push_back(eps * std::cos(x));
    jet.v_y.push_back(-eps * std::cos(x));
    jet.v_yy.push_back(eps * std::cos(x));
  }
  auto m = sample_map(n, 2 * pi, [eps](double x) {
    const cplx e = eps * std::exp(I * x), f1 = std::exp(e);
    return std::array<cplx, 4>{0.0, f1, I * e * f1, (-e + (I * e) * (I * e)) * f1};
  });
  const double d = sup_diff(miura_line(jet), schwarzian(m));
  o.require(d < 1e-8, le("miura-S", d, 1e-8));
  return o;
}

Outcome clifford_invariants() {
  Outcome o;
  Data cl = data_of(clifford_torus(TorusLattice(32, 32)));
  const double c = cl.inv.c.sup_norm(), k = kappa_abs_dev(cl.inv.kappa, oracle::clifford_kappa_abs);
  const double w = std::abs(willmore_energy(cl.inv.kappa) - oracle::clifford_willmore);
  const double r = worst(integrability_residuals(cl.inv, cl.fr));
  o.require(c < 1e-9, le("c", c, 1e-9));
  o.require(k < 1e-9, le("|k|", k, 1e-9));
  o.require(w < 1e-8, le("W", w, 1e-8));
  o.require(r < 1e-9, le("residuals", r, 1e-9));
  return o;
}

Outcome euclidean_crosscheck_corpus() {
  Outcome o;
  TorusLattice lat(32, 32), fine(64, 64);
  std::vector<Immersion> corpus{clifford_torus(lat), cmc_gauge_torus(lat, 1, 2), cmc_gauge_torus(lat, 2, 3),
                                revolution_isothermic(32, 32), perturbed_clifford(lat)};
  for (std::uint64_t seed : {1u, 2u, 3u}) corpus.push_back(moebius_transform(clifford_torus(fine), random_lorentz(5, seed, 0.3)));
  double d = 0;
  for (const auto& imm : corpus) {
    auto r = euclidean_crosscheck(imm);
    d = std::max({d, r.kappa_diff, r.c_diff});
  }
  o.require(d < 1e-7, le("max_diff", d, 1e-7) + " surfaces=" + std::to_string(corpus.size()));
  return o;
}

Outcome spectral_convergence() {
  Outcome o;
  auto residual = [](const Immersion& imm) {
    Frame fr = build_frame(imm);
    return worst(integrability_residuals(extract_invariants(fr, 1.0), fr));
  };
  auto boosted = [](int n) { return moebius_transform(clifford_torus(TorusLattice(n, n)), lorentz_boost(5, 1, 0.4)); };
  auto twisted = [](int n) {
    return moebius_transform(cmc_gauge_torus(TorusLattice(n, n), 1, 2), random_lorentz(5, 17, 0.1));
  };
  const double a = residual(boosted(16)) / residual(boosted(32));
  const double b = residual(twisted(16)) / residual(twisted(32));
  o.require(a >= 100, "boosted_clifford_ratio=" + sci(a) + ">=100");
  o.require(b >= 100, "moebius_cmc_ratio=" + sci(b) + ">=100");
  return o;
}

Outcome reconstruction() {
  Outcome o;
  TorusLattice lat(64, 64);
  auto rec = reconstruct_surface(ScalarField(lat), ScalarField(lat, oracle::clifford_kappa_abs));
  o.require(rec.roundtrip < 1e-6, le("roundtrip", rec.roundtrip, 1e-6));
  o.require(rec.holonomy < 1e-6, le("holonomy", rec.holonomy, 1e-6));
  TorusLattice small(32, 32);
  auto wavy = ScalarField::sample(small, [](double x, double) { return oracle::clifford_kappa_abs * (1 + 0.1 * std::cos(x)); });
  const bool r1 = code_of([&] { reconstruct_surface(ScalarField(small), wavy); }) == ErrorCode::not_integrable;
  const bool r2 = code_of([&] {
                    reconstruct_surface(ScalarField(small), ScalarField(small, 1.5 * oracle::clifford_kappa_abs));
                  }) == ErrorCode::holonomy_defect;
  o.require(r1, std::string("codazzi_violation_rejected=") + (r1 ? "yes" : "no"));
  o.require(r2, std::string("nonclosing_rejected=") + (r2 ? "yes" : "no"));
  return o;
}

Outcome nv_flow() {
  Outcome o;
  FlowSpec spec;
  spec.steps = 100;
  spec.dt = 1e-4;
  FlowState s = lift_state(clifford_torus(TorusLattice(32, 32)));
  const VectorField f0 = s.imm.f;
  run_flow(s, spec);
  const double moved = (s.imm.f - f0).sup_norm();
  o.require(moved < 1e-10, le("clifford_df", moved, 1e-10));

  FlowState r = lift_state(revolution_isothermic(32, 32));
  auto rec = run_flow(r, spec);
  const double w0 = rec.front().willmore;
  double drift = 0, imag = 0;
  for (const auto& x : rec) {
    drift = std::max(drift, std::abs(x.willmore - w0) / w0);
    imag = std::max(imag, x.imag_kappa - rec.front().imag_kappa);
  }
  o.require(drift < 1e-6, le("W_drift", drift, 1e-6));
  o.require(imag < 1e-6, le("imk_growth", imag, 1e-6));
  return o;
}

Outcome dual_path() {
  Outcome o;
  const Immersion imm = revolution_isothermic(32, 32);
  const double T = 4e-3;
  std::vector<double> dts{4e-4, 2e-4, 1e-4}, err;
  for (double dt : dts) {
    FlowSpec spec;
    spec.dt = dt;
    spec.steps = static_cast<int>(std::lround(T / dt));
    FlowState a = lift_state(imm);
    FlowState b = invariant_state(a.inv.c, a.inv.kappa[0]);
    run_flow(a, spec);
    spec.mode = FlowMode::evolve_invariants;
    run_flow(b, spec);
    err.push_back((a.inv.kappa - b.inv.kappa).sup_norm());
  }
  const double slope = std::log(err.front() / err.back()) / std::log(dts.front() / dts.back());
  std::string data = "err(dt=4e-4,2e-4,1e-4)=" + sci(err[0]) + "," + sci(err[1]) + "," + sci(err[2]);
  o.require(*std::max_element(err.begin(), err.end()) < 1e-10, data);
  o.require(slope >= 1.9, "slope=" + sci(slope) + ">=1.9");
  return o;
}

Outcome ds_flow() {
  Outcome o;
  const Immersion up = embed_up(revolution_isothermic(32, 32));
  Data d = data_of(up);
  DegreeReport deg = degree_normal_bundle(d.inv);
  o.require(deg.degree == 0 && deg.gap < 1e-8, "degree=" + std::to_string(deg.degree) + " " + le("gap", deg.gap, 1e-8));

  VectorField closed = ds_isothermic_rhs(d.fr, d.inv);
  InvariantVelocity iv = invariant_velocity(d.fr, d.inv, apply_J(d.inv.kappa), tangential_from_b(ScalarField(d.fr.lattice())), false);
  const double cf = (closed - iv.kappa_t).sup_norm();
  o.require(cf < 1e-8, le("closed_form", cf, 1e-8));

  FlowState s = lift_state(up);
  FlowSpec spec;
  spec.kind = FlowKind::davey_stewartson;
  spec.steps = 100;
  auto rec = run_flow(s, spec);
  double drift = 0;
  for (const auto& x : rec) drift = std::max(drift, std::abs(x.willmore - rec.front().willmore) / rec.front().willmore);
  o.require(drift < 1e-6, le("W_drift", drift, 1e-6));
  const double x4 = s.imm.f[4].sup_norm();
  o.require(x4 > 1e-4, "x4=" + sci(x4) + ">1e-4");
  return o;
}

Outcome kdv_reduction() {
  Outcome o;
  KdVState s{2 * pi, 0, Line(64)};
  for (int i = 0; i < 64; ++i) {
    const double x = 2 * pi * i / 64;
    s.c[i] = 0.5 * std::cos(x) + 0.2 * std::sin(2 * x) + cplx(0, 0.1) * std::cos(3 * x);
  }
  KdVState a = s, b = s;
  for (int i = 0; i < 10; ++i) {
    a = kdv_step(a, 1e-4, 3);
    b = kdv_reduction_step(b, 1e-4);
  }
  const double d = sup_diff(a.c, b.c), moved = sup_diff(b.c, s.c);
  o.require(d < 1e-8, le("diff", d, 1e-8));
  o.require(moved > 1e-3, "moved=" + sci(moved));
  return o;
}

Outcome special_suite() {
  Outcome o;
  TorusLattice lat(32, 32);
  Data rev = data_of(revolution_isothermic(32, 32));
  IntegrabilityReport r0 = integrability_residuals(rev.inv, rev.fr);
  double t = 0;
  for (double r : {-1.0, 0.5, 3.0}) {
    IntegrabilityReport rt = integrability_residuals(t_transform(rev.fr, rev.inv, r), rev.fr);
    t = std::max({t, std::abs(rt.gauss - r0.gauss), rt.codazzi - r0.codazzi});
  }
  o.require(t < 1e-10, le("t_transform", t, 1e-10));

  Frame flat = flat_normal_frame(lat, 2);
  Invariants h = helix_kappa(HelixParams{}, lat);
  Data g12 = data_of(cmc_gauge_torus(lat, 1, 2));
  const double H12 = 0.5 * g12.inv.c.mean().real();
  double af = 0;
  for (int j = 0; j < 8; ++j) {
    const cplx l = std::polar(1.0, 2 * pi * j / 8);
    AssociatedMember m = willmore_associated_family(flat, h, 0.0, l);
    af = std::max({af, worst(integrability_residuals(m.inv, flat)), constrained_willmore_residual(flat, m.inv, m.q)});
    AssociatedMember n = willmore_associated_family(g12.fr, g12.inv, H12, l);
    IntegrabilityReport rn = integrability_residuals(n.inv, g12.fr);
    af = std::max({af, rn.gauss, rn.codazzi, constrained_willmore_residual(g12.fr, n.inv, n.q)});
  }
  o.require(af < 1e-10, le("associated", af, 1e-10));

  double cv = 0, lw = 0;
  for (auto [a, b] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{3, 1}}) {
    Data d = data_of(cmc_gauge_torus(lat, a, b));
    SpaceFormData s = cmc_vector(d.fr, d.inv, 0.5 * d.inv.c.mean().real());
    cv = std::max(cv, s.constancy_defect);
    std::vector<double> inv;
    for (double r : {0.0, 1.0, 2.0}) {
      LawsonMember m = lawson_family(d.fr, s, d.inv, r);
      inv.push_back(m.K + m.H * m.H);
    }
    for (double v : inv) lw = std::max(lw, std::abs(v - inv.front()));
  }
  o.require(cv < 1e-8, le("cmc_vector", cv, 1e-8));
  o.require(lw < 1e-9, le("lawson", lw, 1e-9));

  SpaceFormData s = cmc_vector(g12.fr, g12.inv, H12);
  double cs = 0;
  for (int j = 0; j < 6; ++j) {
    CStarMember m = cstar_action(g12.fr, s, g12.inv, std::polar(1.0, 0.4 + j));
    cs = std::max({cs, std::abs(m.H - s.H), std::abs(m.K - s.K), m.cmc_residual});
  }
  o.require(cs < 1e-10, le("cstar_unit", cs, 1e-10));
  return o;
}

// ------------------------------------------------------------- determinism

std::map<std::string, std::string> slurp_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.require(false, "no cli path given");
    return o;
  }
  const fs::path work = fs::temp_directory_path() / ("conflow_accept_" + std::to_string(::getpid()));
  fs::create_directories(work);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"invariants", R"({"surface": {"name": "cmc_gauge", "params": {"a": 1, "b": 2}}, "lattice": {"nx": 16, "ny": 16}})"},
      {"kdv", R"({"kdv": {"n": 64, "steps": 50, "initial": {"mean": 0.2, "modes": [{"k": 2, "cos": 0.1}]}}})"},
  };
  std::size_t files = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path out = work / ("run" + std::to_string(i)), cfg = work / ("run" + std::to_string(i) + ".json");
    std::string body = runs[i].second;
    body.insert(1, "\"output\": {\"dir\": \"" + out.string() + "\"}, ");
    std::ofstream(cfg) << body;
    std::vector<std::map<std::string, std::string>> snaps;
    for (int rep = 0; rep < 2; ++rep) {
      const std::string cmd = "\"" + cli + "\" " + runs[i].first + " \"" + cfg.string() + "\" > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0 || !fs::is_directory(out)) {
        o.require(false, runs[i].first + "_exit=" + std::to_string(rc));
        fs::remove_all(work);
        return o;
      }
      snaps.push_back(slurp_dir(out));
      fs::remove_all(out);
    }
    const bool same = snaps[0] == snaps[1] && !snaps[0].empty();
    files += snaps[0].size();
    o.require(same, runs[i].first + (same ? "_identical" : "_differs"));
  }
  fs::remove_all(work);
  o.detail += "  files=" + std::to_string(files);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> all{
      {1, "schwarzian_moebius_invariance", 1, moebius_invariance},
      {2, "loxodrome_identity", 1, loxodrome_identity},
      {3, "kdv_hierarchy_structure", 1, kdv_hierarchy},
      {4, "kdv_conservation", 10, kdv_conservation},
      {5, "miura_consistency", 1, miura_consistency},
      {6, "clifford_invariants", 5, clifford_invariants},
      {7, "euclidean_crosscheck", 5, euclidean_crosscheck_corpus},
      {8, "spectral_convergence", 10, spectral_convergence},
      {9, "reconstruction_roundtrip", 30, reconstruction},
      {10, "nv_flow", 120, nv_flow},
      {11, "dual_path_consistency", 120, dual_path},
      {12, "ds_flow", 120, ds_flow},
      {13, "kdv_reduction", 5, kdv_reduction},
      {14, "special_surface_suite", 30, special_suite},
      {15, "determinism", 1, [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char budget[64];
    std::snprintf(budget, sizeof budget, "time=%.2fs<%gs", dt, c.budget_s);
    o.require(dt < c.budget_s, budget);
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %-30s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", all.size() - failed, all.size());
  return failed == 0 ? 0 : 1;
}
