#pragma once

#include <vector>

#include "conflow/lattice.hpp"

namespace conflow {

/// Sampled conformal immersion f: T^2 -> S^n, fiber n+1.
struct Immersion {
  int n = 3;
  VectorField f;
};

struct ConformalReport {
  double sphere_defect = 0;    // sup | |f| - 1 |
  double conformal_ratio = 0;  // sup |<f_z,f_z>| / sup <f_z,f_zbar>
  double min_metric = 0;       // min <f_z,f_zbar>
  bool pass = false;
};

ConformalReport check_conformal(const Immersion& imm, double sphere_tol = 1e-10, double conformal_tol = 1e-8);

/// Bilinear pointwise pairing of two ambient fields.
ScalarField minkowski_inner(const VectorField& u, const VectorField& v);

struct NormalizedLift {
  VectorField psi;
  ScalarField u;
};

/// psi = (1, f) e^{-u} with e^{2u} = 2 <f_z, f_zbar>.
NormalizedLift normalized_lift(const Immersion& imm, double tol = 1e-12);

/// Lift and the derivatives needed by the frame.
struct LiftJet {
  VectorField psi, psi_z, psi_zz, psi_zzbar;
};

LiftJet jet_from_lift(const VectorField& psi);

/// 2 psi_zzbar + 2 <psi_zzbar, psi_zzbar> psi.
VectorField psi_hat(const LiftJet& jet);

struct FrameOptions {
  // Index of the constant ambient vector whose normal projection seeds the
  // n = 4 normal frame; -1 picks the best-conditioned candidate.
  int normal_seed = -1;
};

struct Frame {
  int n = 3;
  VectorField psi, psi_z, psi_zbar, psi_zz, psi_zzbar, psi_hat;
  std::vector<VectorField> xi;                 // real orthonormal frame of V-perp
  std::vector<std::vector<ScalarField>> conn;  // conn[i][j] = <d/dz xi_i, xi_j>
  int normal_seed = -1;

  int rank() const { return n - 2; }
  const TorusLattice& lattice() const { return psi.lattice(); }
};

/// Frame carrying only a flat trivialized connection of the given rank; valid for
/// Dz, Dzbar and integrability_residuals on invariant-level data.
Frame flat_normal_frame(const TorusLattice& lat, int rank);

Frame frame_from_jet(const LiftJet& jet, int n, const FrameOptions& opt = {});
Frame frame_from_lift(const VectorField& psi, int n, const FrameOptions& opt = {});
Frame build_frame(const Immersion& imm, const FrameOptions& opt = {});

/// Projection onto V = span{psi, psi_z, psi_zbar, psi_hat}.
VectorField project_V(const Frame& fr, const VectorField& v);

/// sup-norm of the frame relations <psi,psi>, <psi_z,psi_z>, <psi_z,psi_zbar> - 1/2,
/// <psi,psi_hat> + 1, <psi_hat,psi_hat>, <psi_hat,psi_z>, and xi orthonormality.
double frame_defect(const Frame& fr);

/// Sum_i k_i xi_i.
VectorField embed_normal(const Frame& fr, const VectorField& k);

/// Covariant derivatives of normal-frame components.
VectorField Dz(const Frame& fr, const VectorField& k);
VectorField Dzbar(const Frame& fr, const VectorField& k);

/// (Jk)_1 = -k_2, (Jk)_2 = k_1; rank-2 normal bundles only.
VectorField apply_J(const VectorField& k);

/// Componentwise bilinear pairing of normal-frame component fields.
ScalarField normal_inner(const VectorField& a, const VectorField& b);

struct Invariants {
  ScalarField c;
  VectorField kappa;  // components against the normal frame
  ScalarField q;      // -<kappa, conj kappa>
  VectorField chi;    // 2 D_zbar kappa
  double projection_leak = 0;
};

Invariants extract_invariants(const Frame& fr, double leak_tol = 1e-7);

/// Invariants from prescribed (c, kappa), filling q and chi with the connection of fr.
Invariants invariants_from(const Frame& fr, ScalarField c, VectorField kappa);

struct NormalDerivative {
  VectorField dz, dzbar;       // V-perp parts of xi_z and xi_zbar
  ScalarField coef_psi;        // psi-coefficient of xi_z
  ScalarField coef_psi_zbar;   // psi_zbar-coefficient of xi_z
};

NormalDerivative normal_connection(const Frame& fr, const VectorField& xi, double tol = 1e-8);

struct IntegrabilityReport {
  double gauss = 0, codazzi = 0, ricci = 0;
  double willmore = 0;
};

IntegrabilityReport integrability_residuals(const Invariants& inv, const Frame& fr);

/// Residuals for scalar (c, kappa) against a parallel unit normal in S^3.
IntegrabilityReport integrability_residuals(const ScalarField& c, const ScalarField& kappa);

double willmore_energy(const VectorField& kappa);

struct CrosscheckReport {
  double kappa_diff = 0;  // ambient Hopf vectors
  double c_diff = 0;
  double mean_curvature_sup = 0;
};

CrosscheckReport euclidean_crosscheck(const Immersion& imm);

struct ReconstructOptions {
  double integrability_tol = 1e-6;
  double holonomy_tol = 1e-6;
  bool check_holonomy = true;
  int substeps = 16;  // RK4 substeps per grid interval
};

struct Reconstruction {
  Immersion imm;
  double holonomy = 0;
  double roundtrip = 0;
  double span_defect = 0;  // distance of the frame from the initial 4-space, for the kappa = 0 case
};

Reconstruction reconstruct_surface(const ScalarField& c, const ScalarField& kappa, const ReconstructOptions& opt = {});

}  // namespace conflow
