#include "conflow/schwarzian.hpp"

#include <algorithm>
#include <cmath>

namespace conflow {

namespace {

void require_immersion(std::span<const cplx> f1, double tol) {
  for (std::size_t i = 0; i < f1.size(); ++i)
    if (std::abs(f1[i]) < tol)
      throw Error(ErrorCode::critical_point, "vanishing derivative at sample " + std::to_string(i));
}

double sup(std::span<const cplx> v) {
  double m = 0;
  for (auto x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

MapSamples1D compose_moebius(const MapSamples1D& m, cplx a, cplx b, cplx c, cplx d) {
  MapSamples1D out;
  out.L = m.L;
  const std::size_t n = m.size();
  const cplx det = a * d - b * c;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx w = m.f[i];
    const cplx den = c * w + d;
    const cplx g1 = det / (den * den);
    const cplx g2 = -2.0 * c * det / (den * den * den);
    const cplx g3 = 6.0 * c * c * det / (den * den * den * den);
    const cplx f1 = m.f1[i], f2 = m.f2[i];
    out.f.push_back((a * w + b) / den);
    out.f1.push_back(g1 * f1);
    out.f2.push_back(g2 * f1 * f1 + g1 * f2);
    if (!m.f3.empty()) out.f3.push_back(g3 * f1 * f1 * f1 + 3.0 * g2 * f1 * f2 + g1 * m.f3[i]);
  }
  return out;
}

MapSamples1D inverse_chart(const MapSamples1D& w) {
  if (w.f3.size() != w.size()) throw Error(ErrorCode::invalid_argument, "inverse chart needs third derivatives");
  MapSamples1D out;
  out.L = w.L;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const cplx w1 = w.f1[i], w2 = w.f2[i], w3 = w.f3[i];
    out.f.push_back(static_cast<double>(i) * w.L / static_cast<double>(w.size()));
    out.f1.push_back(1.0 / w1);
    out.f2.push_back(-w2 / (w1 * w1 * w1));
    out.f3.push_back(-w3 / std::pow(w1, 4) + 3.0 * w2 * w2 / std::pow(w1, 5));
  }
  return out;
}

Line schwarzian(const MapSamples1D& m, double tol) {
  require_immersion(m.f1, tol);
  Line r(m.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = m.f2[i] / m.f1[i];
  Line dr = line_deriv(r, m.L);
  for (std::size_t i = 0; i < r.size(); ++i) dr[i] -= 0.5 * r[i] * r[i];
  return dr;
}

Line schwarzian_closed_form(const MapSamples1D& m, double tol) {
  require_immersion(m.f1, tol);
  if (m.f3.size() != m.size()) throw Error(ErrorCode::invalid_argument, "closed-form Schwarzian needs f3");
  Line s(m.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cplx r = m.f2[i] / m.f1[i];
    s[i] = m.f3[i] / m.f1[i] - 1.5 * r * r;
  }
  return s;
}

Lift2 normalized_lift_cp1(const MapSamples1D& m, double tol) {
  require_immersion(m.f1, tol);
  const std::size_t n = m.size();
  Line lam(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx root = std::sqrt(-1.0 / m.f1[i]);
    if (i > 0 && std::abs(root - lam[i - 1]) > std::abs(root + lam[i - 1])) root = -root;
    lam[i] = root;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cplx next = lam[(i + 1) % n];
    if (std::abs(std::arg(next / lam[i])) > pi / 2)
      throw Error(ErrorCode::branch_discontinuity, "lift branch jumps between samples " + std::to_string(i) +
                                                       " and " + std::to_string((i + 1) % n));
  }
  Lift2 l;
  l.L = m.L;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx dl = -0.5 * lam[i] * m.f2[i] / m.f1[i];
    l.psi[0].push_back(m.f[i] * lam[i]);
    l.psi[1].push_back(lam[i]);
    l.psi_z[0].push_back(m.f1[i] * lam[i] + m.f[i] * dl);
    l.psi_z[1].push_back(dl);
  }
  return l;
}

Line lift_det(const Lift2& l) {
  Line d(l.psi[0].size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = l.psi[0][i] * l.psi_z[1][i] - l.psi[1][i] * l.psi_z[0][i];
  return d;
}

Line hill_coefficient(const Lift2& l, double tol) {
  Line det = lift_det(l);
  for (std::size_t i = 0; i < det.size(); ++i)
    if (std::abs(det[i] - 1.0) > tol)
      throw Error(ErrorCode::not_normalized, "det(psi, psi_z) deviates from 1 at sample " + std::to_string(i));
  Line zz0 = line_deriv(l.psi_z[0], l.L), zz1 = line_deriv(l.psi_z[1], l.L);
  Line c(det.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -2.0 * (zz0[i] * l.psi_z[1][i] - zz1[i] * l.psi_z[0][i]);
  return c;
}

double hill_residual(const Lift2& l, std::span<const cplx> c) {
  double r = 0;
  for (int k = 0; k < 2; ++k) {
    Line zz = line_deriv(line_deriv(l.psi[k], l.L), l.L);
    for (std::size_t i = 0; i < zz.size(); ++i) r = std::max(r, std::abs(zz[i] + 0.5 * c[i] * l.psi[k][i]));
  }
  return r;
}

Line schwarzian_coordinate_change(std::span<const cplx> s_z_f, const MapSamples1D& w, double tol) {
  if (s_z_f.size() != w.size()) throw Error(ErrorCode::dimension_mismatch, "chart and field sizes differ");
  Line s_w = schwarzian_closed_form(w, tol);
  Line out(s_z_f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (s_z_f[i] - s_w[i]) / (w.f1[i] * w.f1[i]);
  return out;
}

ScalarField miura(const ScalarField& v, double tol) {
  if (v.sup_imag() > tol) throw Error(ErrorCode::non_real_input, "log metric scale must be real");
  ScalarField p = 2.0 * deriv_z(v.real());
  return deriv_z(p) - 0.5 * (p * p);
}

Line miura_line(const LineJet& jet, double tol) {
  for (auto* part : {&jet.v, &jet.v_y, &jet.v_yy})
    for (auto x : *part)
      if (std::abs(x.imag()) > tol) throw Error(ErrorCode::non_real_input, "log metric scale must be real");
  Line vx = line_deriv(jet.v, jet.L), vxx = line_deriv(jet.v, jet.L, 2), vxy = line_deriv(jet.v_y, jet.L);
  Line out(jet.v.size());
  const cplx I(0, 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx vz = 0.5 * (vx[i] - I * jet.v_y[i]);
    const cplx vzz = 0.25 * (vxx[i] - 2.0 * I * vxy[i] - jet.v_yy[i]);
    out[i] = 2.0 * vzz - 2.0 * vz * vz;
  }
  return out;
}

// ---------------------------------------------------------------- KdV

Line kdv_rhs(std::span<const cplx> c, std::span<const cplx> b, double L) {
  if (c.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "c and b sizes differ");
  Line b1 = line_deriv(b, L), b3 = line_deriv(b, L, 3), c1 = line_deriv(c, L);
  Line r(c.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b3[i] + 2.0 * b1[i] * c[i] + b[i] * c1[i];
  return line_dealias(r);
}

Line kdv_hierarchy_b(std::span<const cplx> c, int order, double L) {
  switch (order) {
    case 1:
      return Line(c.size(), 1.0);
    case 3:
      return Line(c.begin(), c.end());
    case 5: {
      Line b = line_deriv(c, L, 2);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += 1.5 * c[i] * c[i];
      return b;
    }
    default:
      throw Error(ErrorCode::unsupported_order, "hierarchy order must be 1, 3 or 5");
  }
}

namespace {

// Nonlinear part of the order-n flow once the top linear derivative is split off.
Line kdv_nonlinear(std::span<const cplx> c, int order, double L) {
  Line r(c.size(), 0.0);
  if (order == 3) {
    Line c1 = line_deriv(c, L);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 3.0 * c[i] * c1[i];
  } else if (order == 5) {
    Line c1 = line_deriv(c, L), c2 = line_deriv(c, L, 2), c3 = line_deriv(c, L, 3);
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = 5.0 * c3[i] * c[i] + 10.0 * c2[i] * c1[i] + 7.5 * c1[i] * c[i] * c[i];
  }
  return line_dealias(r);
}

}  // namespace

KdVState kdv_step(const KdVState& s, double dt, int order, const KdVOptions& opt) {
  if (!(dt > 0)) throw Error(ErrorCode::invalid_argument, "time step must be positive");
  if (order != 1 && order != 3 && order != 5)
    throw Error(ErrorCode::unsupported_order, "hierarchy order must be 1, 3 or 5");
  const int n = static_cast<int>(s.c.size());
  Line E(static_cast<std::size_t>(n)), E2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int m = mode_number(i, n);
    const cplx lin = 2 * m == n ? cplx(0) : std::pow(cplx(0, 2 * pi * m / s.L), order);
    E[static_cast<std::size_t>(i)] = std::exp(lin * (dt / 2));
    E2[static_cast<std::size_t>(i)] = std::exp(lin * dt);
  }
  auto N = [&](const Line& uh) {
    Line u = fft1(uh, true);
    Line r = fft1(kdv_nonlinear(u, order, s.L), false);
    for (auto& v : r) v *= dt;
    return r;
  };
  Line u = fft1(s.c, false);
  Line k1 = N(u);
  Line tmp(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = E[i] * (u[i] + 0.5 * k1[i]);
  Line k2 = N(tmp);
  for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = E[i] * u[i] + 0.5 * k2[i];
  Line k3 = N(tmp);
  for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = E2[i] * u[i] + E[i] * k3[i];
  Line k4 = N(tmp);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = E2[i] * u[i] + (E2[i] * k1[i] + 2.0 * E[i] * (k2[i] + k3[i]) + k4[i]) / 6.0;
  KdVState out{s.L, s.t + dt, fft1(u, true)};
  const double m = sup(out.c);
  if (!(m <= opt.blowup_bound)) throw Error(ErrorCode::blow_up, "||c||_inf exceeded bound");
  return out;
}

double finite_type_residual(std::span<const cplx> c, int n, std::span<const double> lambda, double L) {
  if (n < 1 || n > 3) throw Error(ErrorCode::unsupported_order, "finite type only checkable for n <= 3");
  if (static_cast<int>(lambda.size()) != n - 1)
    throw Error(ErrorCode::invalid_argument, "need n-1 lambda coefficients");
  auto flow = [&](int k) { return kdv_rhs(c, kdv_hierarchy_b(c, 2 * k - 1, L), L); };
  Line total = flow(n);
  for (int k = 1; k < n; ++k) {
    Line f = flow(k);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += lambda[static_cast<std::size_t>(k - 1)] * f[i];
  }
  return sup(total);
}

}  // namespace conflow
