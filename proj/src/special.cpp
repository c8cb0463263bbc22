#include "conflow/special.hpp"

#include <algorithm>
#include <cmath>

namespace conflow {

namespace {

const ScalarField& scalar_kappa(const Invariants& inv) {
  if (inv.kappa.dim() != 1) throw Error(ErrorCode::not_implemented_dim, "needs a scalar Hopf differential");
  return inv.kappa[0];
}

void require_real(const ScalarField& k, double tol) {
  if (k.sup_imag() > tol * std::max(1.0, k.sup_norm()))
    throw Error(ErrorCode::not_isothermic, "Hopf differential is not real");
}

VectorField willmore_expression(const Frame& fr, const Invariants& inv) {
  return Dzbar(fr, Dzbar(fr, inv.kappa)) + inv.c.conj() * inv.kappa * 0.5;
}

double sup_abs(const VectorField& v) {
  double m = 0;
  for (int i = 0; i < v.dim(); ++i) m = std::max(m, v[i].sup_norm());
  return m;
}

double sup_real(const VectorField& v) { return sup_abs(v.real()); }

ScalarField ambient_inner(const VectorField& u, const VectorField& v) { return minkowski_inner(u, v); }

}  // namespace

DupinReport dupin_residual(const Invariants& inv) {
  const ScalarField& k = scalar_kappa(inv);
  ScalarField kb = k.conj();
  return {deriv_zbar(inv.c).sup_norm(), deriv_z(k * kb * kb * kb).sup_norm()};
}

double isothermic_residual(const Invariants& inv) { return inv.kappa.sup_imag(); }

Invariants t_transform(const Frame& fr, const Invariants& inv, double r, double tol) {
  for (int i = 0; i < inv.kappa.dim(); ++i) require_real(inv.kappa[i], tol);
  return invariants_from(fr, inv.c + ScalarField(inv.c.lattice(), r), inv.kappa);
}

double calapso_residual(const ScalarField& kappa, double tol) {
  if (kappa.sup_imag() > tol * std::max(1.0, kappa.sup_norm()))
    throw Error(ErrorCode::non_real_input, "Calapso's equation needs a real Hopf differential");
  ScalarField k = kappa.real();
  for (cplx v : k.values())
    if (std::abs(v) <= tol) throw Error(ErrorCode::kappa_vanishes, "Hopf differential vanishes");
  ScalarField kxy = deriv_x(deriv_y(k));
  ScalarField res = laplacian(kxy / k) + 8.0 * deriv_x(deriv_y(k * k));
  return res.sup_norm();
}

WillmoreReport willmore_residual(const Frame& fr, const Invariants& inv) {
  VectorField w = willmore_expression(fr, inv);
  return {sup_abs(w), sup_real(w), w.sup_imag()};
}

double constrained_willmore_residual(const Frame& fr, const Invariants& inv, cplx q) {
  VectorField w = willmore_expression(fr, inv);
  VectorField qk = inv.kappa * std::conj(q);
  return sup_abs(w - qk.real());
}

AssociatedMember willmore_associated_family(const Frame& fr, const Invariants& inv, cplx q, cplx lambda,
                                            double tol) {
  if (std::abs(std::abs(lambda) - 1) > 1e-12) throw Error(ErrorCode::not_unit, "lambda must have modulus one");
  const double res = constrained_willmore_residual(fr, inv, q);
  if (res > tol) throw Error(ErrorCode::not_constrained_willmore, "constrained Willmore residual " + std::to_string(res));
  const cplx l2 = lambda * lambda;
  return {invariants_from(fr, inv.c + ScalarField(inv.c.lattice(), (l2 - 1.0) * q), inv.kappa * lambda), l2 * q};
}

ScalarField space_form_curvature(const ScalarField& kappa, double H) {
  ScalarField kz = deriv_z(kappa);
  ScalarField k2 = kappa * kappa;
  ScalarField out = 4.0 * k2 * k2 + 4.0 * kappa * deriv_zbar(kz) - 4.0 * kz.abs2();
  return out - ScalarField(kappa.lattice(), H * H);
}

double cmc_residual(const Invariants& inv, double H) {
  const ScalarField& k = scalar_kappa(inv);
  return (deriv_zbar(deriv_zbar(k)) + 0.5 * inv.c.conj() * k - H * k).sup_norm();
}

SpaceFormData cmc_vector(const Frame& fr, const Invariants& inv, double H, double tol) {
  if (fr.n != 3) throw Error(ErrorCode::not_implemented_dim, "space form construction needs n = 3");
  const ScalarField& k = scalar_kappa(inv);
  require_real(k, tol);
  SpaceFormData d;
  d.H = H;
  d.cmc_residual = cmc_residual(inv, H);
  if (d.cmc_residual > tol) throw Error(ErrorCode::not_cmc, "CMC residual " + std::to_string(d.cmc_residual));

  ScalarField kr = k.real();
  ScalarField b = -2.0 * deriv_zbar(kr);
  ScalarField a = 2.0 * (kr * kr * kr + deriv_z(deriv_zbar(kr))).real();
  const VectorField& N = fr.xi[0];
  VectorField v0 = a * fr.psi + b * fr.psi_z + b.conj() * fr.psi_zbar + kr * fr.psi_hat - N * H;

  d.constancy_defect = std::max(deriv_x(v0).sup_norm(), deriv_y(v0).sup_norm());
  ScalarField K = -ambient_inner(v0, v0);
  d.K = K.mean().real();
  d.curvature_defect = (K - space_form_curvature(kr, H)).sup_norm();
  d.mean_curvature_defect = (ambient_inner(v0, N) + ScalarField(fr.lattice(), H)).sup_norm();
  ScalarField pv = ambient_inner(fr.psi, v0);
  d.metric_defect = (pv * pv - kr * kr).sup_norm();
  for (int i = 0; i < v0.dim(); ++i) d.v0.push_back(v0[i].mean().real());
  if (d.constancy_defect > tol) throw Error(ErrorCode::non_constant, "v0 varies by " + std::to_string(d.constancy_defect));
  return d;
}

LawsonMember lawson_family(const Frame& fr, const SpaceFormData& data, const Invariants& inv, double r, double tol) {
  LawsonMember m{t_transform(fr, inv, r, tol), data.H + r / 2, 0, 0, 0};
  m.cmc_residual = cmc_residual(m.inv, m.H);
  if (m.cmc_residual > std::max(tol, 1e-8)) throw Error(ErrorCode::not_cmc, "T-transform lost the CMC equation");
  m.K = space_form_curvature(scalar_kappa(m.inv).real(), m.H).mean().real();
  m.lawson_defect = std::abs(m.K + m.H * m.H - (data.K + data.H * data.H));
  if (m.lawson_defect > tol) throw Error(ErrorCode::non_constant, "K + H^2 changed by " + std::to_string(m.lawson_defect));
  return m;
}

CStarMember cstar_action(const Frame& fr, const SpaceFormData& data, const Invariants& inv, cplx lambda, double tol) {
  const double mod = std::abs(lambda);
  if (mod == 0) throw Error(ErrorCode::invalid_argument, "lambda must be nonzero");
  const ScalarField& k = scalar_kappa(inv);
  require_real(k, tol);
  if (cmc_residual(inv, data.H) > tol) throw Error(ErrorCode::not_cmc, "input does not satisfy the CMC equation");
  const cplx phase = lambda / mod;  // mu^2 for w = mu z
  const TorusLattice& lat = inv.c.lattice();
  CStarMember m{invariants_from(fr, inv.c + ScalarField(lat, 2.0 * (lambda - 1.0) * data.H), inv.kappa * phase),
                lambda * data.H, mod * data.H, data.K + (1 - mod * mod) * data.H * data.H, 0, 0};
  // In w: kappa_w = kappa, c_w = c_lambda / mu^2, d/dwbar = conj(mu)^{-1} d/dzbar.
  ScalarField cw = m.inv.c * (1.0 / phase);
  ScalarField res = deriv_zbar(deriv_zbar(k)) * (1.0 / std::conj(phase)) + 0.5 * cw.conj() * k - m.H * k;
  m.cmc_residual = res.sup_norm();
  m.curvature_defect = std::abs(m.K - space_form_curvature(k.real(), m.H).mean().real());
  return m;
}

Invariants helix_kappa(const HelixParams& p, const TorusLattice& lat, double tol) {
  const std::size_t r = p.k1.size();
  if (r < 2 || p.k2.size() != r) throw Error(ErrorCode::dimension_mismatch, "helix vectors need rank at least two");
  if (!(p.c > 0)) throw Error(ErrorCode::invalid_argument, "helix needs c > 0");
  double dot = 0, n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < r; ++i) {
    dot += p.k1[i] * p.k2[i];
    n1 += p.k1[i] * p.k1[i];
    n2 += p.k2[i] * p.k2[i];
  }
  if (std::abs(dot) > 1e-12 * std::max(1.0, n1) || std::abs(n1 - n2) > 1e-12 * std::max(1.0, n1))
    throw Error(ErrorCode::invalid_argument, "helix vectors must be orthogonal of equal length");
  const double w = std::sqrt(2 * p.c);
  const double turns = w * lat.Lx() / (2 * pi);
  if (std::abs(turns - std::round(turns)) > 1e-9 || std::round(turns) < 1)
    throw Error(ErrorCode::non_periodic, "sqrt(2c) Lx / 2pi must be a positive integer");
  std::vector<ScalarField> comps;
  for (std::size_t i = 0; i < r; ++i) {
    const double a = p.k1[i], b = p.k2[i];
    comps.push_back(ScalarField::sample(lat, [=](double x, double) { return a * std::cos(w * x) + b * std::sin(w * x); }));
  }
  Frame fr = flat_normal_frame(lat, static_cast<int>(r));
  Invariants inv = invariants_from(fr, ScalarField(lat, p.c), VectorField(std::move(comps)));
  IntegrabilityReport rep = integrability_residuals(inv, fr);
  if (std::max({rep.gauss, rep.codazzi, rep.ricci}) > tol)
    throw Error(ErrorCode::not_integrable, "helix data fail the integrability equations");
  return inv;
}

double elastica_residual(const std::vector<Line>& k, double L, cplx h, double gamma) {
  if (k.empty()) throw Error(ErrorCode::invalid_argument, "no components");
  if (h == 0.0) throw Error(ErrorCode::invalid_argument, "h must be nonzero");
  const std::size_t n = k.front().size();
  for (const auto& c : k)
    if (c.size() != n) throw Error(ErrorCode::dimension_mismatch, "components differ in length");
  const cplx ratio = h / std::conj(h);
  std::vector<cplx> g(n, gamma);
  for (const auto& c : k)
    for (std::size_t i = 0; i < n; ++i) g[i] += c[i] * c[i];
  double m = 0;
  for (const auto& c : k) {
    Line d2 = line_deriv(c, L, 2);
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(d2[i] + ratio * g[i] * c[i]));
  }
  return m;
}

IsothermicWillmoreReport isothermic_willmore_report(const Frame& fr, const Invariants& inv) {
  IsothermicWillmoreReport r;
  r.isothermic = isothermic_residual(inv);
  r.willmore = willmore_residual(fr, inv).full;
  ScalarField gz = deriv_z(normal_inner(inv.kappa, inv.kappa));
  VectorField grad = gz * Dzbar(fr, inv.kappa);
  r.gradient = grad.sup_imag();
  return r;
}

}  // namespace conflow
