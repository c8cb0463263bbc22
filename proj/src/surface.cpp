#include "conflow/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace conflow {

namespace {

// Hodge dual of N-1 real vectors in R^N; the result annihilates all of them
// under the Minkowski form (or the Euclidean one when `lorentz` is false).
std::vector<double> hodge_dual(const std::vector<std::vector<double>>& rows, bool lorentz) {
  const int N = static_cast<int>(rows.size()) + 1;
  std::vector<double> w(static_cast<std::size_t>(N));
  Eigen::MatrixXd m(N - 1, N - 1);
  for (int b = 0; b < N; ++b) {
    for (int r = 0; r < N - 1; ++r)
      for (int col = 0, cc = 0; col < N; ++col)
        if (col != b) m(r, cc++) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
    w[static_cast<std::size_t>(b)] = (b % 2 ? -1.0 : 1.0) * m.determinant();
  }
  if (lorentz) w[0] = -w[0];
  return w;
}

std::vector<double> real_point(const VectorField& v, std::size_t p) {
  std::vector<double> r(static_cast<std::size_t>(v.dim()));
  for (int a = 0; a < v.dim(); ++a) r[static_cast<std::size_t>(a)] = v[a][p].real();
  return r;
}

VectorField normalize_spacelike(VectorField v) {
  ScalarField n2 = minkowski_inner(v, v);
  for (std::size_t p = 0; p < n2.size(); ++p) {
    if (!(n2[p].real() > 0)) throw Error(ErrorCode::degenerate_metric, "normal vector is not spacelike");
    const double s = 1.0 / std::sqrt(n2[p].real());
    for (int a = 0; a < v.dim(); ++a) v[a][p] *= s;
  }
  return v;
}

VectorField dual_field(const std::vector<const VectorField*>& vs) {
  const VectorField& first = *vs.front();
  const int N = first.dim();
  VectorField out(first.lattice(), N);
  for (std::size_t p = 0; p < first.lattice().size(); ++p) {
    std::vector<std::vector<double>> rows;
    for (auto* v : vs) rows.push_back(real_point(*v, p));
    auto w = hodge_dual(rows, true);
    for (int a = 0; a < N; ++a) out[a][p] = w[static_cast<std::size_t>(a)];
  }
  return out;
}

VectorField constant_vector(const TorusLattice& lat, int dim, int axis) {
  VectorField e(lat, dim);
  e[axis] = ScalarField(lat, 1.0);
  return e;
}

double sup(const ScalarField& f) { return f.sup_norm(); }

}  // namespace

ScalarField minkowski_inner(const VectorField& u, const VectorField& v) {
  if (u.dim() != v.dim()) throw Error(ErrorCode::dimension_mismatch, "ambient dimensions differ");
  ScalarField s = -(u[0] * v[0]);
  for (int a = 1; a < u.dim(); ++a) s += u[a] * v[a];
  return s;
}

ConformalReport check_conformal(const Immersion& imm, double sphere_tol, double conformal_tol) {
  ConformalReport r;
  const VectorField& f = imm.f;
  const TorusLattice& lat = f.lattice();
  ScalarField n2(lat);
  for (int a = 0; a < f.dim(); ++a) n2 += f[a] * f[a];
  for (std::size_t p = 0; p < lat.size(); ++p) r.sphere_defect = std::max(r.sphere_defect, std::abs(std::sqrt(std::abs(n2[p])) - 1));
  VectorField fz = deriv_z(f), fzb = deriv_zbar(f);
  ScalarField zz(lat), zzb(lat);
  for (int a = 0; a < f.dim(); ++a) {
    zz += fz[a] * fz[a];
    zzb += fz[a] * fzb[a];
  }
  r.min_metric = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < lat.size(); ++p) r.min_metric = std::min(r.min_metric, zzb[p].real());
  r.conformal_ratio = zzb.sup_norm() > 0 ? zz.sup_norm() / zzb.sup_norm() : std::numeric_limits<double>::infinity();
  r.pass = r.sphere_defect < sphere_tol && r.conformal_ratio < conformal_tol && r.min_metric > 0;
  return r;
}

NormalizedLift normalized_lift(const Immersion& imm, double tol) {
  const VectorField& f = imm.f;
  const TorusLattice& lat = f.lattice();
  VectorField fz = deriv_z(f), fzb = deriv_zbar(f);
  ScalarField e2u(lat);
  for (int a = 0; a < f.dim(); ++a) e2u += fz[a] * fzb[a];
  e2u *= 2.0;
  ScalarField u(lat);
  VectorField psi(lat, f.dim() + 1);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const double g = e2u[p].real();
    if (!(g > tol)) throw Error(ErrorCode::degenerate_metric, "conformal factor vanishes");
    u[p] = 0.5 * std::log(g);
    const double s = 1.0 / std::sqrt(g);
    psi[0][p] = s;
    for (int a = 0; a < f.dim(); ++a) psi[a + 1][p] = f[a][p].real() * s;
  }
  return {std::move(psi), std::move(u)};
}

LiftJet jet_from_lift(const VectorField& psi) {
  VectorField pz = deriv_z(psi);
  VectorField pzz = deriv_z(pz);
  VectorField pzzb = deriv_zbar(pz);
  return {psi, std::move(pz), std::move(pzz), std::move(pzzb)};
}

VectorField psi_hat(const LiftJet& jet) {
  ScalarField s = 2.0 * minkowski_inner(jet.psi_zzbar, jet.psi_zzbar);
  return jet.psi_zzbar * 2.0 + s * jet.psi;
}

VectorField project_V(const Frame& fr, const VectorField& v) {
  return -minkowski_inner(v, fr.psi_hat) * fr.psi - minkowski_inner(v, fr.psi) * fr.psi_hat +
         (2.0 * minkowski_inner(v, fr.psi_zbar)) * fr.psi_z + (2.0 * minkowski_inner(v, fr.psi_z)) * fr.psi_zbar;
}

Frame frame_from_jet(const LiftJet& jet, int n, const FrameOptions& opt) {
  if (n != 3 && n != 4) throw Error(ErrorCode::not_implemented_dim, "normal frames are built for n = 3 and n = 4");
  if (jet.psi.dim() != n + 2) throw Error(ErrorCode::dimension_mismatch, "lift has wrong ambient dimension");
  const TorusLattice& lat = jet.psi.lattice();
  Frame fr;
  fr.n = n;
  fr.psi = jet.psi.real();
  fr.psi_z = jet.psi_z;
  fr.psi_zbar = jet.psi_z.conj();
  fr.psi_zz = jet.psi_zz;
  fr.psi_zzbar = jet.psi_zzbar;
  fr.psi_hat = psi_hat(jet).real();

  VectorField px = (jet.psi_z * 2.0).real();
  VectorField py = (jet.psi_z * cplx(0, -2.0)).real();
  if (n == 3) {
    fr.xi.push_back(normalize_spacelike(dual_field({&fr.psi, &px, &py, &fr.psi_hat})));
  } else {
    const int N = n + 2;
    int best = opt.normal_seed;
    std::vector<VectorField> cands;
    double best_norm = -1;
    for (int a = 0; a < N; ++a) {
      VectorField e = constant_vector(lat, N, a);
      VectorField w = (e - project_V(fr, e)).real();
      ScalarField n2 = minkowski_inner(w, w);
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < lat.size(); ++p) mn = std::min(mn, n2[p].real());
      cands.push_back(std::move(w));
      if (opt.normal_seed < 0 && mn > best_norm + 1e-12) {
        best_norm = mn;
        best = a;
      }
    }
    if (best < 0 || best >= N) throw Error(ErrorCode::invalid_argument, "normal seed out of range");
    fr.xi.push_back(normalize_spacelike(cands[static_cast<std::size_t>(best)]));
    fr.xi.push_back(normalize_spacelike(dual_field({&fr.psi, &px, &py, &fr.psi_hat, &fr.xi[0]})));
    fr.normal_seed = best;
  }
  const int r = fr.rank();
  fr.conn.assign(static_cast<std::size_t>(r), {});
  for (int i = 0; i < r; ++i) {
    VectorField d = deriv_z(fr.xi[static_cast<std::size_t>(i)]);
    for (int j = 0; j < r; ++j) fr.conn[static_cast<std::size_t>(i)].push_back(minkowski_inner(d, fr.xi[static_cast<std::size_t>(j)]));
  }
  return fr;
}

Frame flat_normal_frame(const TorusLattice& lat, int rank) {
  if (rank < 1) throw Error(ErrorCode::invalid_argument, "normal rank must be positive");
  Frame fr;
  fr.n = rank + 2;
  fr.psi = VectorField(lat, rank + 3);
  fr.conn.assign(static_cast<std::size_t>(rank), std::vector<ScalarField>(static_cast<std::size_t>(rank), ScalarField(lat)));
  return fr;
}

Frame frame_from_lift(const VectorField& psi, int n, const FrameOptions& opt) {
  return frame_from_jet(jet_from_lift(psi), n, opt);
}

Frame build_frame(const Immersion& imm, const FrameOptions& opt) {
  if (imm.f.dim() != imm.n + 1) throw Error(ErrorCode::dimension_mismatch, "immersion fiber must be n+1");
  return frame_from_lift(normalized_lift(imm).psi, imm.n, opt);
}

double frame_defect(const Frame& fr) {
  double d = 0;
  auto upd = [&](const ScalarField& s, cplx target) {
    for (std::size_t p = 0; p < s.size(); ++p) d = std::max(d, std::abs(s[p] - target));
  };
  upd(minkowski_inner(fr.psi, fr.psi), 0.0);
  upd(minkowski_inner(fr.psi_z, fr.psi_z), 0.0);
  upd(minkowski_inner(fr.psi_z, fr.psi_zbar), 0.5);
  upd(minkowski_inner(fr.psi, fr.psi_hat), -1.0);
  upd(minkowski_inner(fr.psi_hat, fr.psi_hat), 0.0);
  upd(minkowski_inner(fr.psi_hat, fr.psi_z), 0.0);
  for (std::size_t i = 0; i < fr.xi.size(); ++i) {
    upd(minkowski_inner(fr.xi[i], fr.psi), 0.0);
    upd(minkowski_inner(fr.xi[i], fr.psi_z), 0.0);
    upd(minkowski_inner(fr.xi[i], fr.psi_hat), 0.0);
    for (std::size_t j = 0; j < fr.xi.size(); ++j) upd(minkowski_inner(fr.xi[i], fr.xi[j]), i == j ? 1.0 : 0.0);
  }
  return d;
}

VectorField embed_normal(const Frame& fr, const VectorField& k) {
  if (k.dim() != fr.rank()) throw Error(ErrorCode::dimension_mismatch, "normal components do not match frame rank");
  VectorField out(fr.lattice(), fr.n + 2);
  for (int i = 0; i < k.dim(); ++i) out += k[i] * fr.xi[static_cast<std::size_t>(i)];
  return out;
}

VectorField Dz(const Frame& fr, const VectorField& k) {
  VectorField out = deriv_z(k);
  for (int j = 0; j < k.dim(); ++j)
    for (int i = 0; i < k.dim(); ++i) out[j] += k[i] * fr.conn[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

VectorField Dzbar(const Frame& fr, const VectorField& k) {
  VectorField out = deriv_zbar(k);
  for (int j = 0; j < k.dim(); ++j)
    for (int i = 0; i < k.dim(); ++i)
      out[j] += k[i] * fr.conn[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].conj();
  return out;
}

VectorField apply_J(const VectorField& k) {
  if (k.dim() != 2) throw Error(ErrorCode::not_implemented_dim, "J needs a rank-2 normal bundle");
  return VectorField({-k[1], k[0]});
}

ScalarField normal_inner(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::dimension_mismatch, "normal ranks differ");
  ScalarField s(a.lattice());
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

Invariants extract_invariants(const Frame& fr, double leak_tol) {
  Invariants inv{2.0 * minkowski_inner(fr.psi_zz, fr.psi_hat), VectorField(fr.lattice(), fr.rank()),
                 ScalarField(fr.lattice()), VectorField(fr.lattice(), fr.rank())};
  VectorField amb = fr.psi_zz + (0.5 * inv.c) * fr.psi;
  for (int i = 0; i < fr.rank(); ++i) inv.kappa[i] = minkowski_inner(amb, fr.xi[static_cast<std::size_t>(i)]);
  VectorField rest = amb - embed_normal(fr, inv.kappa);
  inv.projection_leak = rest.sup_norm() / std::max(1.0, amb.sup_norm());
  if (inv.projection_leak > leak_tol)
    throw Error(ErrorCode::projection_leak, "Hopf vector leaks out of V-perp by " + std::to_string(inv.projection_leak));
  inv.q = -normal_inner(inv.kappa, inv.kappa.conj());
  inv.chi = Dzbar(fr, inv.kappa) * 2.0;
  return inv;
}

NormalDerivative normal_connection(const Frame& fr, const VectorField& xi, double tol) {
  const double leak = std::max({sup(minkowski_inner(xi, fr.psi)), sup(minkowski_inner(xi, fr.psi_z)),
                                sup(minkowski_inner(xi, fr.psi_hat))});
  if (leak > tol) throw Error(ErrorCode::not_normal, "field is not a section of V-perp");
  VectorField xz = deriv_z(xi), xzb = deriv_zbar(xi);
  return {xz - project_V(fr, xz), xzb - project_V(fr, xzb), -minkowski_inner(xz, fr.psi_hat),
          2.0 * minkowski_inner(xz, fr.psi_z)};
}

double willmore_energy(const VectorField& kappa) {
  ScalarField s(kappa.lattice());
  for (int i = 0; i < kappa.dim(); ++i) s += kappa[i].abs2();
  return integrate(s).real();
}

Invariants invariants_from(const Frame& fr, ScalarField c, VectorField kappa) {
  if (kappa.dim() != fr.rank()) throw Error(ErrorCode::dimension_mismatch, "kappa rank does not match the normal bundle");
  Invariants inv{std::move(c), std::move(kappa), ScalarField(fr.lattice()), VectorField(fr.lattice(), fr.rank())};
  inv.q = -normal_inner(inv.kappa, inv.kappa.conj());
  inv.chi = Dzbar(fr, inv.kappa) * 2.0;
  return inv;
}

IntegrabilityReport integrability_residuals(const Invariants& inv, const Frame& fr) {
  IntegrabilityReport r;
  const VectorField& k = inv.kappa;
  VectorField dzk = Dz(fr, k), dzbk = Dzbar(fr, k);
  ScalarField g = 0.5 * deriv_zbar(inv.c) - 3.0 * normal_inner(dzbk.conj(), k) - normal_inner(k.conj(), dzk);
  r.gauss = g.sup_norm();
  VectorField cod = Dzbar(fr, dzbk) + inv.c.conj() * k * 0.5;
  r.codazzi = cod.sup_imag();
  if (fr.rank() >= 2) {
    const TorusLattice& lat = fr.lattice();
    for (int i = 0; i < fr.rank(); ++i) {
      VectorField e = constant_vector(lat, fr.rank(), i);
      VectorField R = Dzbar(fr, Dz(fr, e)) - Dz(fr, Dzbar(fr, e));
      for (int j = 0; j < fr.rank(); ++j) {
        ScalarField res = R[j] - 2.0 * k[i] * k[j].conj() + 2.0 * k[i].conj() * k[j];
        r.ricci = std::max(r.ricci, res.sup_norm());
      }
    }
  }
  r.willmore = willmore_energy(k);
  return r;
}

IntegrabilityReport integrability_residuals(const ScalarField& c, const ScalarField& kappa) {
  IntegrabilityReport r;
  ScalarField kzb = deriv_zbar(kappa);
  ScalarField g = 0.5 * deriv_zbar(c) - 3.0 * kzb.conj() * kappa - kappa.conj() * deriv_z(kappa);
  r.gauss = g.sup_norm();
  r.codazzi = (deriv_zbar(kzb) + 0.5 * c.conj() * kappa).sup_imag();
  r.willmore = willmore_energy(VectorField({kappa}));
  return r;
}

CrosscheckReport euclidean_crosscheck(const Immersion& imm) {
  if (imm.n != 3) throw Error(ErrorCode::not_implemented_dim, "Euclidean cross-check needs n = 3");
  const VectorField& f = imm.f;
  const TorusLattice& lat = f.lattice();
  VectorField fx = deriv_x(f), fy = deriv_y(f), fz = deriv_z(f);
  VectorField fzz = deriv_z(fz), fzzb = deriv_zbar(fz);
  VectorField N(lat, 4);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    auto w = hodge_dual({real_point(f, p), real_point(fx, p), real_point(fy, p)}, false);
    double nn = 0;
    for (double x : w) nn += x * x;
    nn = std::sqrt(nn);
    for (int a = 0; a < 4; ++a) N[a][p] = w[static_cast<std::size_t>(a)] / nn;
  }
  auto dot = [&](const VectorField& a, const VectorField& b) {
    ScalarField s(lat);
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
  };
  ScalarField e2u = 2.0 * dot(fz, fz.conj()).real();
  ScalarField u = e2u.map([](cplx g) { return 0.5 * std::log(g.real()); });
  ScalarField H = 2.0 * dot(fzzb, N) / e2u;
  ScalarField II = dot(fzz, N);
  ScalarField uz = deriv_z(u);
  ScalarField cE = 2.0 * (H * II + deriv_z(uz) - uz * uz);
  ScalarField scale = u.map([](cplx x) { return std::exp(-x); }) * II;
  VectorField kE(lat, 5);
  kE[0] = scale * H;
  for (int a = 0; a < 4; ++a) kE[a + 1] = scale * (H * f[a] + N[a]);

  Frame fr = build_frame(imm);
  Invariants inv = extract_invariants(fr, 1.0);
  VectorField kL = embed_normal(fr, inv.kappa);
  CrosscheckReport r;
  r.kappa_diff = (kE - kL).sup_norm();
  r.c_diff = (cE - inv.c).sup_norm();
  r.mean_curvature_sup = H.sup_norm();
  return r;
}

// ------------------------------------------------------------ reconstruction

namespace {

constexpr int kDim = 5;
using FrameState = std::array<cplx, 4 * kDim>;  // psi | psi_z | psi_hat | xi

struct Coeffs {
  cplx c, k, kzb;
};

// d/dx (dir = 0) or d/dy (dir = 1) of the frame from the structure equations.
FrameState frame_rate(const FrameState& s, const Coeffs& q, int dir) {
  FrameState out{};
  const double k2 = std::norm(q.k);
  for (int a = 0; a < kDim; ++a) {
    const cplx psi = s[a], P = s[kDim + a], hat = s[2 * kDim + a], xi = s[3 * kDim + a];
    const cplx Pb = std::conj(P);
    const cplx psi_z = P, psi_zb = Pb;
    const cplx P_z = -0.5 * q.c * psi + q.k * xi;
    const cplx P_zb = -k2 * psi + 0.5 * hat;
    const cplx hat_z = -2.0 * k2 * P - q.c * Pb + 2.0 * q.kzb * xi;
    const cplx xi_z = 2.0 * q.kzb * psi - 2.0 * q.k * Pb;
    const cplx I(0, 1);
    if (dir == 0) {
      out[a] = psi_z + psi_zb;
      out[kDim + a] = P_z + P_zb;
      out[2 * kDim + a] = 2.0 * hat_z.real();
      out[3 * kDim + a] = 2.0 * xi_z.real();
    } else {
      out[a] = I * (psi_z - psi_zb);
      out[kDim + a] = I * (P_z - P_zb);
      out[2 * kDim + a] = -2.0 * hat_z.imag();
      out[3 * kDim + a] = -2.0 * xi_z.imag();
    }
  }
  return out;
}

FrameState axpy(const FrameState& s, double h, const FrameState& d) {
  FrameState r;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = s[i] + h * d[i];
  return r;
}

FrameState rk4(const FrameState& s, double h, const Coeffs& q0, const Coeffs& qm, const Coeffs& q1, int dir) {
  FrameState k1 = frame_rate(s, q0, dir);
  FrameState k2 = frame_rate(axpy(s, h / 2, k1), qm, dir);
  FrameState k3 = frame_rate(axpy(s, h / 2, k2), qm, dir);
  FrameState k4 = frame_rate(axpy(s, h, k3), q1, dir);
  FrameState r;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = s[i] + h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

double state_distance(const FrameState& a, const FrameState& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

Reconstruction reconstruct_surface(const ScalarField& c, const ScalarField& kappa, const ReconstructOptions& opt) {
  const TorusLattice& lat = c.lattice();
  if (!(lat == kappa.lattice())) throw Error(ErrorCode::dimension_mismatch, "c and kappa lattices differ");
  if (opt.substeps < 1) throw Error(ErrorCode::invalid_argument, "substeps must be positive");
  IntegrabilityReport pre = integrability_residuals(c, kappa);
  if (pre.gauss > opt.integrability_tol || pre.codazzi > opt.integrability_tol)
    throw Error(ErrorCode::not_integrable, "Gauss residual " + std::to_string(pre.gauss) + ", Codazzi residual " +
                                               std::to_string(pre.codazzi));
  const ScalarField kzb = deriv_zbar(kappa);
  const int m = opt.substeps;
  // Coefficients at fractional offsets j*h/(2m) along each axis.
  std::vector<std::array<ScalarField, 3>> sx, sy;
  for (int j = 0; j < 2 * m; ++j) {
    const double ox = j * lat.hx() / (2 * m), oy = j * lat.hy() / (2 * m);
    sx.push_back({shift(c, ox, 0), shift(kappa, ox, 0), shift(kzb, ox, 0)});
    sy.push_back({shift(c, 0, oy), shift(kappa, 0, oy), shift(kzb, 0, oy)});
  }
  auto coeff = [&](const std::vector<std::array<ScalarField, 3>>& sh, int sub, int j, int k, int dir) {
    if (sub == 2 * m) {
      sub = 0;
      if (dir == 0) j = (j + 1) % lat.nx();
      else k = (k + 1) % lat.ny();
    }
    const auto& f = sh[static_cast<std::size_t>(sub)];
    return Coeffs{f[0].at(j, k), f[1].at(j, k), f[2].at(j, k)};
  };
  auto advance = [&](FrameState s, int j, int k, int dir) {
    const auto& sh = dir == 0 ? sx : sy;
    const double h = (dir == 0 ? lat.hx() : lat.hy()) / m;
    for (int sub = 0; sub < m; ++sub)
      s = rk4(s, h, coeff(sh, 2 * sub, j, k, dir), coeff(sh, 2 * sub + 1, j, k, dir), coeff(sh, 2 * sub + 2, j, k, dir), dir);
    return s;
  };

  FrameState init{};
  const double r2 = 1 / std::sqrt(2.0);
  init[0] = r2;
  init[1] = r2;
  init[kDim + 2] = 0.5;
  init[kDim + 3] = cplx(0, -0.5);
  init[2 * kDim + 0] = r2;
  init[2 * kDim + 1] = -r2;
  init[3 * kDim + 4] = 1;

  std::vector<FrameState> frames(lat.size());
  Reconstruction out;
  FrameState s = init;
  for (int j = 0; j < lat.nx(); ++j) {
    frames[lat.index(j, 0)] = s;
    s = advance(s, j, 0, 0);
  }
  out.holonomy = state_distance(s, init);
  for (int j = 0; j < lat.nx(); ++j) {
    FrameState t = frames[lat.index(j, 0)];
    for (int k = 0; k < lat.ny(); ++k) {
      frames[lat.index(j, k)] = t;
      t = advance(t, j, k, 1);
    }
    out.holonomy = std::max(out.holonomy, state_distance(t, frames[lat.index(j, 0)]));
  }
  if (opt.check_holonomy && out.holonomy > opt.holonomy_tol)
    throw Error(ErrorCode::holonomy_defect, "frame fails to close by " + std::to_string(out.holonomy));

  VectorField f(lat, 4);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const FrameState& st = frames[p];
    if (!(st[0].real() > 0)) throw Error(ErrorCode::not_forward, "reconstructed lift left the forward cone");
    for (int a = 0; a < 4; ++a) f[a][p] = st[static_cast<std::size_t>(a + 1)].real() / st[0].real();
    out.span_defect = std::max(out.span_defect, std::abs(st[4]) / std::abs(st[0]));
  }
  out.imm = Immersion{3, std::move(f)};
  if (out.holonomy <= opt.holonomy_tol) {
    Invariants inv = extract_invariants(build_frame(out.imm), 1.0);
    const double dc = (inv.c - c).sup_norm();
    const double dk = std::min((inv.kappa[0] - kappa).sup_norm(), (inv.kappa[0] + kappa).sup_norm());
    out.roundtrip = std::max(dc, dk);
  } else {
    out.roundtrip = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace conflow
