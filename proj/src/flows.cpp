#include "conflow/flows.hpp"

#include <cmath>

#include "conflow/corpus.hpp"

namespace conflow {

namespace {

ScalarField half_imag(const ScalarField& z) { return 0.5 * (z - z.conj()); }

VectorField zero_normal(const Frame& fr) { return VectorField(fr.lattice(), fr.rank()); }

VectorField mul(const ScalarField& s, const VectorField& v) { return s * v; }

void require_same_rank(const Frame& fr, const VectorField& sigma) {
  if (sigma.dim() != fr.rank()) throw Error(ErrorCode::dimension_mismatch, "sigma rank does not match the normal bundle");
}

double l2(const VectorField& u, const VectorField& v) {
  ScalarField s(u.lattice());
  for (int i = 0; i < u.dim(); ++i) s += u[i] * v[i];
  return integrate(s).real();
}

bool finite(const VectorField& v) {
  for (int i = 0; i < v.dim(); ++i)
    for (cplx z : v[i].values())
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace

TangentialSolution tangential_from_b(const ScalarField& b) {
  return {b, -deriv_z(b).real()};
}

TangentialSolution tangential_from_normal(const VectorField& sigma, const Invariants& inv, double tol) {
  ScalarField rhs = 2.0 * normal_inner(sigma, inv.kappa);
  auto bbar = [&] {
    try {
      return solve_dz(rhs, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unsolvable_on_torus) throw;
      throw Error(ErrorCode::conformal_constraint_violated,
                  "integral of <sigma, kappa> is " + std::to_string(std::abs(rhs.mean())));
    }
  }();
  return tangential_from_b(bbar.conj());
}

VectorField lift_velocity(const Frame& fr, const VectorField& sigma, const TangentialSolution& ts) {
  require_same_rank(fr, sigma);
  return ts.a * fr.psi + ts.b * fr.psi_z + ts.b.conj() * fr.psi_zbar + embed_normal(fr, sigma);
}

FrameVelocity frame_velocity(const Frame& fr, const Invariants& inv, const VectorField& sigma,
                             const TangentialSolution& ts, double reality_tol) {
  require_same_rank(fr, sigma);
  const VectorField& k = inv.kappa;
  const ScalarField& b = ts.b;
  ScalarField bb = b.conj(), bz = deriv_z(b), bzz = deriv_z(bz);
  ScalarField k2 = normal_inner(k, k.conj());
  VectorField dzbk = Dzbar(fr, k), dzs = Dz(fr, sigma), dzbs = Dzbar(fr, sigma);
  ScalarField s1 = normal_inner(sigma, dzbk) - normal_inner(dzbs, k);

  FrameVelocity v;
  v.psi_t = lift_velocity(fr, sigma, ts);
  VectorField nrm = b * k + dzs;
  v.psi_z_t = (-0.5 * bzz - 0.5 * inv.c * b - bb * k2 + s1) * fr.psi + half_imag(bz) * fr.psi_z +
              (0.5 * bb) * fr.psi_hat + embed_normal(fr, nrm);

  ScalarField X = 0.5 * (bzz + inv.c * b + 2.0 * bb * k2 - 2.0 * s1);
  VectorField bdk = b * dzbk;
  v.tau = (Dzbar(fr, dzs) + mul(2.0 * normal_inner(sigma, k.conj()), k) + k2 * sigma + bdk + bdk.conj()) * 2.0;
  v.tau_imag = v.tau.sup_imag();
  if (v.tau_imag > reality_tol)
    throw Error(ErrorCode::reality_violation, "normal part of psi_hat_t has imaginary part " + std::to_string(v.tau_imag));
  v.psi_hat_t = bz.real() * fr.psi_hat - (X.conj() * fr.psi_z + X * fr.psi_zbar) * 2.0 + embed_normal(fr, v.tau);

  for (int i = 0; i < fr.rank(); ++i) {
    ScalarField y = nrm[i];
    v.xi_t_tan.push_back(v.tau[i] * fr.psi + sigma[i] * fr.psi_hat - (y * fr.psi_zbar + y.conj() * fr.psi_z) * 2.0);
  }
  return v;
}

template <class F>
F schwarzian_transport(const F& c, const F& b, const F& bz, const F& bzzz, const F& cz, const F& bbar_czbar) {
  F out = bzzz;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * bzzz[i] + c[i] * bz[i] + 0.5 * (b[i] * cz[i] + bbar_czbar[i]);
  return out;
}

InvariantVelocity invariant_velocity(const Frame& fr, const Invariants& inv, const VectorField& sigma,
                                     const TangentialSolution& ts, bool dealiased) {
  require_same_rank(fr, sigma);
  const VectorField& k = inv.kappa;
  const ScalarField& b = ts.b;
  const ScalarField& c = inv.c;
  ScalarField bb = b.conj(), bz = deriv_z(b);
  VectorField dzk = Dz(fr, k), dzbk = Dzbar(fr, k), dzs = Dz(fr, sigma), dzbs = Dzbar(fr, sigma);
  VectorField dzbdzs = Dzbar(fr, dzs);

  VectorField kt = Dz(fr, dzs) + (0.5 * c) * sigma + (half_imag(bz) + bz) * k + b * dzk + bb * dzbk;
  ScalarField half_ct = schwarzian_transport(c, b, bz, deriv_z(deriv_z(bz)), deriv_z(c), bb * deriv_zbar(c)) +
                        8.0 * normal_inner(sigma, k.conj()) * normal_inner(k, k) + 3.0 * normal_inner(dzbdzs, k) -
                        normal_inner(sigma, Dzbar(fr, dzk)) - 3.0 * normal_inner(dzs, dzbk) + normal_inner(dzbs, dzk);
  InvariantVelocity v{std::move(kt), 2.0 * half_ct};
  if (dealiased) {
    v.kappa_t = dealias(v.kappa_t);
    v.c_t = dealias(v.c_t);
  }
  return v;
}

double willmore_rate(const Frame& fr, const Invariants& inv, const VectorField& sigma) {
  require_same_rank(fr, sigma);
  VectorField kb = inv.kappa.conj();
  VectorField w = Dz(fr, Dz(fr, kb)) + (0.5 * inv.c) * kb;
  return 2 * integrate(normal_inner(sigma, w)).real();
}

VectorField nv_sigma(const Frame& fr, const Invariants& inv) { return Dz(fr, inv.kappa).real(); }

DegreeReport degree_normal_bundle(const Invariants& inv, double gap_tol) {
  if (inv.kappa.dim() != 2) throw Error(ErrorCode::not_implemented_dim, "normal degree needs a rank-2 normal bundle");
  const cplx I = cplx(0, -2) * integrate(normal_inner(apply_J(inv.kappa.conj()), inv.kappa));
  const double d = I.real() / pi;
  DegreeReport r{static_cast<int>(std::lround(d)), 0};
  r.gap = std::max(std::abs(d - r.degree), std::abs(I.imag()) / pi);
  if (r.gap > gap_tol) throw Error(ErrorCode::non_integer_degree, "normal degree " + std::to_string(d) + " is not an integer");
  return r;
}

VectorField ds_sigma(const Invariants& inv) {
  DegreeReport d = degree_normal_bundle(inv);
  if (d.degree != 0)
    throw Error(ErrorCode::nonzero_normal_degree, "normal bundle has degree " + std::to_string(d.degree));
  return apply_J(inv.kappa).real();
}

VectorField solvable_projection(const VectorField& sigma, const Invariants& inv) {
  if (sigma.dim() != inv.kappa.dim()) throw Error(ErrorCode::dimension_mismatch, "sigma rank does not match kappa");
  VectorField out = sigma.real();
  std::vector<VectorField> basis;
  for (VectorField u : {inv.kappa.real(), (inv.kappa * cplx(0, -1)).real()}) {
    for (const auto& e : basis) u -= e * l2(u, e);
    const double nn = l2(u, u);
    if (nn > 1e-24) basis.push_back(u * (1 / std::sqrt(nn)));
  }
  for (const auto& e : basis) out -= e * l2(out, e);
  return out;
}

namespace {

void require_isothermic(const Invariants& inv, double tol) {
  const double im = inv.kappa.sup_imag();
  if (im > tol * std::max(1.0, inv.kappa.sup_norm()))
    throw Error(ErrorCode::not_isothermic, "Hopf differential has imaginary part " + std::to_string(im));
}

}  // namespace

ScalarField nv_isothermic_b(const Invariants& inv) { return normal_inner(inv.kappa, inv.kappa) + 0.25 * inv.c; }

VectorField nv_isothermic_rhs(const Frame& fr, const Invariants& inv, double tol) {
  require_isothermic(inv, tol);
  const VectorField& k = inv.kappa;
  VectorField dzk = Dz(fr, k);
  VectorField r = Dz(fr, Dz(fr, dzk)) * 2.0 + (1.5 * inv.c) * dzk + (0.75 * deriv_z(inv.c)) * k +
                  (normal_inner(k, k) * dzk - normal_inner(k, dzk) * k) * 2.0;
  return r.real();
}

VectorField ds_isothermic_rhs(const Frame& fr, const Invariants& inv, double tol) {
  if (fr.rank() != 2) throw Error(ErrorCode::not_implemented_dim, "Davey-Stewartson flow needs n = 4");
  require_isothermic(inv, tol);
  return apply_J(Dz(fr, Dz(fr, inv.kappa)) + (0.5 * inv.c) * inv.kappa);
}

// ------------------------------------------------------------------- stepping

namespace {

struct Velocity {
  VectorField sigma;
  TangentialSolution ts;
};

Velocity velocity(const Frame& fr, const Invariants& inv, const FlowSpec& spec) {
  const TorusLattice& lat = fr.lattice();
  switch (spec.kind) {
    case FlowKind::translation:
      return {zero_normal(fr), tangential_from_b(ScalarField(lat, 1.0))};
    case FlowKind::novikov_veselov: {
      VectorField s = nv_sigma(fr, inv);
      return {s, tangential_from_normal(s, inv, spec.tol.solvability)};
    }
    case FlowKind::davey_stewartson: {
      if (fr.rank() != 2) throw Error(ErrorCode::not_implemented_dim, "Davey-Stewartson flow needs n = 4");
      VectorField s = ds_sigma(inv);
      return {s, tangential_from_normal(s, inv, spec.tol.solvability)};
    }
    case FlowKind::custom_sigma: {
      if (!spec.sigma) throw Error(ErrorCode::invalid_argument, "custom flow without a sigma field");
      VectorField s = spec.sigma(fr, inv);
      require_same_rank(fr, s);
      if (spec.project_custom) s = solvable_projection(s, inv);
      return {s, tangential_from_normal(s, inv, spec.tol.solvability)};
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown flow kind");
}

VectorField to_sphere(const VectorField& x, int offset) {
  const TorusLattice& lat = x.lattice();
  const int N = x.dim() - offset;
  VectorField f(lat, N);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    double nn = 0;
    for (int a = 0; a < N; ++a) nn += std::norm(x[a + offset][p].real());
    nn = std::sqrt(nn);
    if (!(nn > 0) || !std::isfinite(nn)) throw Error(ErrorCode::blow_up, "lift left the light cone");
    for (int a = 0; a < N; ++a) f[a][p] = x[a + offset][p].real() / nn;
  }
  return f;
}

FlowState rebuild(const FlowState& like, const VectorField& psi, const FlowSpec& spec) {
  VectorField f = to_sphere(psi, 1);
  if (spec.filter_order > 0) f = to_sphere(spectral_filter(f, spec.filter_order), 0);
  FrameOptions opt;
  opt.normal_seed = like.frame.normal_seed;
  FlowState s = lift_state({like.n, std::move(f)}, spec.tol, opt);
  s.t = like.t;
  return s;
}

void check_blowup(const FlowState& s, double bound) {
  const double m = std::max(s.inv.kappa.sup_norm(), s.inv.c.sup_norm());
  if (!(m < bound) || !finite(s.inv.kappa)) throw Error(ErrorCode::blow_up, "invariants exceeded " + std::to_string(bound));
}

FlowState lift_step(const FlowState& s, const FlowSpec& spec) {
  const double h = spec.dt;
  auto vel = [&](const FlowState& st) {
    Velocity v = velocity(st.frame, st.inv, spec);
    return lift_velocity(st.frame, v.sigma, v.ts);
  };
  const VectorField& psi0 = s.frame.psi;
  VectorField k1 = vel(s);
  VectorField k2 = vel(rebuild(s, psi0 + k1 * (h / 2), spec));
  VectorField k3 = vel(rebuild(s, psi0 + k2 * (h / 2), spec));
  VectorField k4 = vel(rebuild(s, psi0 + k3 * h, spec));
  FlowState out = rebuild(s, psi0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6), spec);
  out.t = s.t + h;
  const double ratio = check_conformal(out.imm, 1.0, 1.0).conformal_ratio;
  if (ratio > 10 * spec.tol.conformal)
    throw Error(ErrorCode::conformal_drift, "conformality residual " + std::to_string(ratio));
  return out;
}

FlowState invariant_step(const FlowState& s, const FlowSpec& spec) {
  if (spec.kind == FlowKind::davey_stewartson)
    throw Error(ErrorCode::not_implemented_dim, "invariant mode evolves scalar Hopf differentials only");
  const double h = spec.dt;
  const Frame& fr = s.frame;
  auto vel = [&](const Invariants& inv) {
    Velocity v = velocity(fr, inv, spec);
    InvariantVelocity d = invariant_velocity(fr, inv, v.sigma, v.ts, false);
    if (spec.filter_order > 0) {
      d.kappa_t = spectral_filter(d.kappa_t, spec.filter_order);
      d.c_t = spectral_filter(d.c_t, spec.filter_order);
    }
    return d;
  };
  auto stage = [&](const InvariantVelocity& d, double w) {
    return invariants_from(fr, s.inv.c + d.c_t * w, s.inv.kappa + d.kappa_t * w);
  };
  InvariantVelocity k1 = vel(s.inv);
  InvariantVelocity k2 = vel(stage(k1, h / 2));
  InvariantVelocity k3 = vel(stage(k2, h / 2));
  InvariantVelocity k4 = vel(stage(k3, h));
  FlowState out = s;
  out.inv = invariants_from(fr, s.inv.c + (k1.c_t + 2.0 * k2.c_t + 2.0 * k3.c_t + k4.c_t) * (h / 6),
                     s.inv.kappa + (k1.kappa_t + k2.kappa_t * 2.0 + k3.kappa_t * 2.0 + k4.kappa_t) * (h / 6));
  out.t = s.t + h;
  return out;
}

}  // namespace

FlowState lift_state(const Immersion& imm, const FlowTolerances& tol, const FrameOptions& opt) {
  Frame fr = build_frame(imm, opt);
  Invariants inv = extract_invariants(fr, tol.leak);
  return {FlowMode::evolve_lift, imm.n, 0.0, imm, std::move(fr), std::move(inv)};
}

FlowState invariant_state(const ScalarField& c, const ScalarField& kappa) {
  if (!(c.lattice() == kappa.lattice())) throw Error(ErrorCode::dimension_mismatch, "c and kappa live on different lattices");
  Frame fr = flat_normal_frame(c.lattice(), 1);
  Invariants inv = invariants_from(fr, c, VectorField({kappa}));
  return {FlowMode::evolve_invariants, 3, 0.0, Immersion{}, std::move(fr), std::move(inv)};
}

FlowState flow_step(const FlowState& s, const FlowSpec& spec) {
  if (!(spec.dt > 0)) throw Error(ErrorCode::invalid_argument, "time step must be positive");
  if (spec.mode != s.mode) throw Error(ErrorCode::invalid_argument, "flow mode does not match the state");
  FlowState out = s.mode == FlowMode::evolve_lift ? lift_step(s, spec) : invariant_step(s, spec);
  check_blowup(out, spec.tol.blowup);
  return out;
}

FlowRecord flow_record(const FlowState& s, int step) {
  FlowRecord r;
  r.step = step;
  r.t = s.t;
  IntegrabilityReport rep = integrability_residuals(s.inv, s.frame);
  r.willmore = rep.willmore;
  r.gauss = rep.gauss;
  r.codazzi = rep.codazzi;
  r.ricci = rep.ricci;
  r.imag_kappa = s.inv.kappa.sup_imag();
  if (s.mode == FlowMode::evolve_lift) r.conformality = check_conformal(s.imm, 1.0, 1.0).conformal_ratio;
  return r;
}

std::vector<FlowRecord> run_flow(FlowState& s, const FlowSpec& spec, const std::function<void(const FlowState&, int)>& on_step) {
  std::vector<FlowRecord> out{flow_record(s, 0)};
  if (on_step) on_step(s, 0);
  for (int i = 1; i <= spec.steps; ++i) {
    s = flow_step(s, spec);
    out.push_back(flow_record(s, i));
    if (on_step) on_step(s, i);
  }
  return out;
}

// ------------------------------------------------------------ holomorphic maps

Line kdv_reduction_rhs(std::span<const cplx> c, double L) {
  // kappa = 0, b = c, bbar = 0: only the transport part of the Schwarzian velocity survives.
  Line b(c.begin(), c.end());
  Line out = schwarzian_transport(b, b, line_deriv(b, L), line_deriv(b, L, 3), line_deriv(b, L), Line(c.size()));
  for (auto& v : out) v *= 2.0;
  return line_dealias(out);
}

KdVState kdv_reduction_step(const KdVState& s, double dt, const KdVOptions& opt) {
  auto axpy = [](const Line& x, double h, const Line& d) {
    Line y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + h * d[i];
    return y;
  };
  Line k1 = kdv_reduction_rhs(s.c, s.L);
  Line k2 = kdv_reduction_rhs(axpy(s.c, dt / 2, k1), s.L);
  Line k3 = kdv_reduction_rhs(axpy(s.c, dt / 2, k2), s.L);
  Line k4 = kdv_reduction_rhs(axpy(s.c, dt, k3), s.L);
  KdVState out{s.L, s.t + dt, Line(s.c.size())};
  for (std::size_t i = 0; i < s.c.size(); ++i) {
    out.c[i] = s.c[i] + dt / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!(std::abs(out.c[i]) < opt.blowup_bound)) throw Error(ErrorCode::blow_up, "Schwarzian left the bound");
  }
  return out;
}

Immersion perturbed_clifford(const TorusLattice& lat, double eps, int steps) {
  if (steps < 1) throw Error(ErrorCode::invalid_argument, "need at least one step");
  FlowSpec spec;
  spec.kind = FlowKind::custom_sigma;
  spec.dt = 1.0 / steps;
  spec.steps = steps;
  ScalarField bump = ScalarField::sample(lat, [eps](double x, double y) { return eps * std::cos(x) * std::cos(2 * y); });
  spec.sigma = [bump](const Frame&, const Invariants&) { return VectorField({bump}); };
  FlowState s = lift_state(clifford_torus(lat));
  for (int i = 0; i < steps; ++i) s = flow_step(s, spec);
  return s.imm;
}

}  // namespace conflow
