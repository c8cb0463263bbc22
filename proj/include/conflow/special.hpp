#pragma once

#include <vector>

#include "conflow/schwarzian.hpp"
#include "conflow/surface.hpp"

namespace conflow {

struct DupinReport {
  double schwarzian_zbar = 0;  // sup |c_zbar|
  double quartic_z = 0;        // sup |(kappa kappabar^3)_z|
};

/// Scalar kappa (surfaces in S^3).
DupinReport dupin_residual(const Invariants& inv);

/// sup |Im kappa| in the given coordinate.
double isothermic_residual(const Invariants& inv);

/// c -> c + r with kappa unchanged; throws not_isothermic unless kappa is real.
Invariants t_transform(const Frame& fr, const Invariants& inv, double r, double tol = 1e-8);

/// Laplacian(kappa_xy / kappa) + 8 (kappa^2)_xy for a real scalar kappa.
double calapso_residual(const ScalarField& kappa, double tol = 1e-8);

struct WillmoreReport {
  double full = 0;      // sup |D_zbar D_zbar kappa + cbar kappa / 2|
  double willmore = 0;  // real part
  double codazzi = 0;   // imaginary part
};

WillmoreReport willmore_residual(const Frame& fr, const Invariants& inv);

/// sup |D_zbar D_zbar kappa + cbar kappa / 2 - Re(qbar kappa)| for constant q.
double constrained_willmore_residual(const Frame& fr, const Invariants& inv, cplx q);

struct AssociatedMember {
  Invariants inv;
  cplx q;
};

/// kappa -> lambda kappa, c -> c + (lambda^2 - 1) q, q -> lambda^2 q for |lambda| = 1.
AssociatedMember willmore_associated_family(const Frame& fr, const Invariants& inv, cplx q, cplx lambda,
                                            double tol = 1e-8);

/// 4 kappa^4 + 4 kappa kappa_zzbar - 4 |kappa_z|^2 - H^2 for a real scalar kappa.
ScalarField space_form_curvature(const ScalarField& kappa, double H);

/// sup |kappa_zbarzbar + cbar kappa / 2 - H kappa| (scalar kappa).
double cmc_residual(const Invariants& inv, double H);

struct SpaceFormData {
  std::vector<double> v0;          // mean of the assembled field, ambient coordinates
  double H = 0, K = 0;
  double constancy_defect = 0;     // sup of the first derivatives of v0
  double curvature_defect = 0;     // sup | -<v0,v0> - space_form_curvature |
  double mean_curvature_defect = 0;  // sup | H + <v0, N> |
  double metric_defect = 0;        // sup | <psi, v0>^2 - kappa^2 |
  double cmc_residual = 0;
};

/// v0 = a psi + b psi_z + bbar psi_zbar + kappa psi_hat - H N with b = -2 kappa_zbar,
/// a = 2 (kappa^3 + kappa_zzbar); n = 3, kappa real.
SpaceFormData cmc_vector(const Frame& fr, const Invariants& inv, double H, double tol = 1e-8);

struct LawsonMember {
  Invariants inv;
  double H = 0, K = 0;
  double cmc_residual = 0;
  double lawson_defect = 0;  // |K_r + H_r^2 - (K + H^2)|
};

/// T-transform by r with H_r = H + r/2 and K_r from space_form_curvature.
LawsonMember lawson_family(const Frame& fr, const SpaceFormData& data, const Invariants& inv, double r,
                           double tol = 1e-9);

struct CStarMember {
  Invariants inv;
  cplx q;
  double H = 0, K = 0;
  double cmc_residual = 0;        // CMC equation with H_lambda in the coordinate w = sqrt(lambda/|lambda|) z
  double curvature_defect = 0;    // |K_lambda - mean space_form_curvature(kappa, H_lambda)|
};

/// kappa -> (lambda/|lambda|) kappa, c -> c + 2 (lambda - 1) H, q -> lambda H,
/// H_lambda = |lambda| H, K_lambda = K + (1 - |lambda|^2) H^2.
CStarMember cstar_action(const Frame& fr, const SpaceFormData& data, const Invariants& inv, cplx lambda,
                         double tol = 1e-8);

struct HelixParams {
  double c = 0.5;
  std::vector<double> k1{1, 0}, k2{0, 1};
};

/// kappa = cos(sqrt(2c) x) k1 + sin(sqrt(2c) x) k2 with constant real c, on a flat normal bundle.
Invariants helix_kappa(const HelixParams& p, const TorusLattice& lat, double tol = 1e-8);

/// sup |k'' + (h/hbar)(<k,k> + gamma) k| for components sampled on a periodic line of length L.
double elastica_residual(const std::vector<Line>& k, double L, cplx h, double gamma);

struct IsothermicWillmoreReport {
  double isothermic = 0;
  double willmore = 0;
  double gradient = 0;  // sup |Im <kappa,kappa>_z kappa_zbar|
};

IsothermicWillmoreReport isothermic_willmore_report(const Frame& fr, const Invariants& inv);

}  // namespace conflow
