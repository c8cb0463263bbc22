#pragma once

#include <array>
#include <span>
#include <vector>

#include "conflow/lattice.hpp"

namespace conflow {

using Line = std::vector<cplx>;

/// A holomorphic map and its first three derivatives sampled along one line
/// z = x (real), 0 <= x < L. Closed-form derivative samples are expected;
/// f3 may be left empty when only spectral routes are used.
struct MapSamples1D {
  double L = 2 * pi;
  Line f, f1, f2, f3;

  std::size_t size() const { return f1.size(); }
};

/// Samples f(x) and its derivatives from closed-form callbacks.
template <class F>
MapSamples1D sample_map(int n, double L, F&& jet) {
  MapSamples1D m;
  m.L = L;
  for (int i = 0; i < n; ++i) {
    std::array<cplx, 4> d = jet(i * L / n);
    m.f.push_back(d[0]);
    m.f1.push_back(d[1]);
    m.f2.push_back(d[2]);
    m.f3.push_back(d[3]);
  }
  return m;
}

/// Post-composes a map with the Moebius transformation (a w + b) / (c w + d).
MapSamples1D compose_moebius(const MapSamples1D& m, cplx a, cplx b, cplx c, cplx d);

/// Derivative data of the inverse chart z(w) expressed at the same sample
/// points (f is left as the identity samples).
MapSamples1D inverse_chart(const MapSamples1D& w);

/// (f2/f1)' - (f2/f1)^2 / 2 with the outer derivative taken spectrally.
Line schwarzian(const MapSamples1D& m, double tol = 1e-12);

/// f3/f1 - (3/2)(f2/f1)^2, pointwise; needs f3.
Line schwarzian_closed_form(const MapSamples1D& m, double tol = 1e-12);

struct Lift2 {
  double L = 2 * pi;
  std::array<Line, 2> psi, psi_z;
};

/// psi = (f, 1) * lambda with lambda^2 = -1/f1, branch tracked continuously.
Lift2 normalized_lift_cp1(const MapSamples1D& m, double tol = 1e-12);

Line lift_det(const Lift2& l);

/// c = -2 det(psi_zz, psi_z), psi_zz taken spectrally.
Line hill_coefficient(const Lift2& l, double tol = 1e-9);

/// psi_zz + (c/2) psi, sup-norm.
double hill_residual(const Lift2& l, std::span<const cplx> c);

/// Coefficient of dw^2 given S_z(f) and the chart w(z).
Line schwarzian_coordinate_change(std::span<const cplx> s_z_f, const MapSamples1D& w, double tol = 1e-12);

/// p_z - p^2/2 with p = 2 v_z; v must be real.
ScalarField miura(const ScalarField& v, double tol = 1e-12);

/// Second-order jet of a real function v(x, y) along the line y = 0.
struct LineJet {
  double L = 2 * pi;
  Line v, v_y, v_yy;
};

/// Miura transform evaluated along a line from the jet of v.
Line miura_line(const LineJet& jet, double tol = 1e-12);

// -------------------------------------------------------------- KdV hierarchy

/// b_zzz + 2 b_z c + b c_z, dealiased.
Line kdv_rhs(std::span<const cplx> c, std::span<const cplx> b, double L);

/// b_1 = 1, b_3 = c, b_5 = c_zz + (3/2) c^2.
Line kdv_hierarchy_b(std::span<const cplx> c, int order, double L);

struct KdVState {
  double L = 2 * pi;
  double t = 0;
  Line c;
};

struct KdVOptions {
  double blowup_bound = 1e8;
};

/// One integrating-factor RK4 step of the order-{1,3,5} flow.
KdVState kdv_step(const KdVState& s, double dt, int order, const KdVOptions& opt = {});

/// ||c_{t_{2n-1}} + sum_k lambda_k c_{t_{2k-1}}||_inf for n <= 3.
double finite_type_residual(std::span<const cplx> c, int n, std::span<const double> lambda, double L);

}  // namespace conflow
