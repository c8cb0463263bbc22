#pragma once

#include <functional>
#include <vector>

#include "conflow/schwarzian.hpp"
#include "conflow/surface.hpp"

namespace conflow {

/// Tangential and radial parts of a conformal deformation.
struct TangentialSolution {
  ScalarField b;  // complex
  ScalarField a;  // real, -Re b_z
};

/// bbar = zero-mean solution of bbar_z = 2 <sigma, kappa>; sigma holds real normal-frame components.
TangentialSolution tangential_from_normal(const VectorField& sigma, const Invariants& inv, double tol = 1e-8);

/// Tangential part from a prescribed b, with a = -Re b_z.
TangentialSolution tangential_from_b(const ScalarField& b);

/// a psi + b psi_z + bbar psi_zbar + sigma.
VectorField lift_velocity(const Frame& fr, const VectorField& sigma, const TangentialSolution& ts);

struct FrameVelocity {
  VectorField psi_t, psi_z_t, psi_hat_t;
  VectorField tau;                     // normal-frame components of the normal part of psi_hat_t
  std::vector<VectorField> xi_t_tan;   // tangential parts of (xi_i)_t
  double tau_imag = 0;
};

FrameVelocity frame_velocity(const Frame& fr, const Invariants& inv, const VectorField& sigma,
                             const TangentialSolution& ts, double reality_tol = 1e-6);

struct InvariantVelocity {
  VectorField kappa_t;  // D_t kappa in normal-frame components
  ScalarField c_t;
};

/// Covariant derivatives use fr.conn; pass flat_normal_frame for invariant-only data.
InvariantVelocity invariant_velocity(const Frame& fr, const Invariants& inv, const VectorField& sigma,
                                     const TangentialSolution& ts, bool dealiased = true);

/// 2 Re int <sigma, D_z D_z kappabar + (c/2) kappabar> dx dy.
double willmore_rate(const Frame& fr, const Invariants& inv, const VectorField& sigma);

/// Re D_z kappa.
VectorField nv_sigma(const Frame& fr, const Invariants& inv);

struct DegreeReport {
  int degree = 0;
  double gap = 0;
};

/// Rounds the integral of <J kappabar, kappa> dz^dzbar over pi; rank-2 normal bundles.
DegreeReport degree_normal_bundle(const Invariants& inv, double gap_tol = 0.1);

/// Re J kappa; throws nonzero_normal_degree unless the normal bundle has degree zero.
VectorField ds_sigma(const Invariants& inv);

/// Removes the L2 components of sigma along Re kappa and Im kappa so that int <sigma, kappa> = 0.
VectorField solvable_projection(const VectorField& sigma, const Invariants& inv);

/// Closed-form NV velocity of an isothermic surface (sigma = 2 Re D_z kappa, b = <kappa,kappa> + c/4).
VectorField nv_isothermic_rhs(const Frame& fr, const Invariants& inv, double tol = 1e-8);

/// J (D_z D_z kappa + (c/2) kappa) for isothermic surfaces in S^4.
VectorField ds_isothermic_rhs(const Frame& fr, const Invariants& inv, double tol = 1e-8);

/// Explicit tangential part of the isothermic NV flow.
ScalarField nv_isothermic_b(const Invariants& inv);

// ---------------------------------------------------------------- time stepping

enum class FlowKind { translation, novikov_veselov, davey_stewartson, custom_sigma };
enum class FlowMode { evolve_lift, evolve_invariants };

using SigmaField = std::function<VectorField(const Frame&, const Invariants&)>;

struct FlowTolerances {
  double leak = 1e-6;
  double solvability = 1e-8;
  double conformal = 1e-8;
  double reality = 1e-6;
  double blowup = 1e8;
};

struct FlowSpec {
  FlowKind kind = FlowKind::novikov_veselov;
  FlowMode mode = FlowMode::evolve_lift;
  double dt = 1e-4;
  int steps = 1;
  FlowTolerances tol;
  SigmaField sigma;                // custom_sigma only
  bool project_custom = true;      // apply solvable_projection to custom sigma
  int filter_order = 0;            // spectral_filter order applied to f at every stage; 0 disables
};

struct FlowRecord {
  int step = 0;
  double t = 0;
  double willmore = 0;
  double gauss = 0, codazzi = 0, ricci = 0;
  double imag_kappa = 0;
  double conformality = 0;
};

/// Lift mode carries imm and the rebuilt frame; invariant mode carries (c, kappa) on a flat stub frame.
struct FlowState {
  FlowMode mode = FlowMode::evolve_lift;
  int n = 3;
  double t = 0;
  Immersion imm;
  Frame frame;
  Invariants inv;
};

FlowState lift_state(const Immersion& imm, const FlowTolerances& tol = {}, const FrameOptions& opt = {});
FlowState invariant_state(const ScalarField& c, const ScalarField& kappa);

FlowState flow_step(const FlowState& s, const FlowSpec& spec);
FlowRecord flow_record(const FlowState& s, int step = 0);

/// Runs spec.steps steps; records the initial state and every step.
std::vector<FlowRecord> run_flow(FlowState& s, const FlowSpec& spec,
                                 const std::function<void(const FlowState&, int)>& on_step = {});

// ------------------------------------------------------------ holomorphic maps

/// kappa = 0 reduction: b = c holomorphic, c_t from the Schwarzian velocity along a line
/// with d/dz = d/dx and d/dzbar = 0.
Line kdv_reduction_rhs(std::span<const cplx> c, double L);

/// Classical RK4 step of kdv_reduction_rhs.
KdVState kdv_reduction_step(const KdVState& s, double dt, const KdVOptions& opt = {});

/// Clifford torus pushed along the custom normal variation eps cos x cos 2y for unit time.
Immersion perturbed_clifford(const TorusLattice& lat, double eps = 0.05, int steps = 20);

}  // namespace conflow
