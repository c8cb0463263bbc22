#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "conflow/surface.hpp"

namespace conflow {

/// Clifford torus (cos x, sin x, cos y, sin y)/sqrt(2); n = 4 appends a zero coordinate.
Immersion clifford_torus(const TorusLattice& lat, int n = 3);

/// Flat torus (r1 cos ax, r1 sin ax, r2 cos by, r2 sin by) with r1 = b/|(a,b)|, r2 = a/|(a,b)|.
/// kappa and c are real constants; H = c/2 in the space form found by the CMC construction.
Immersion cmc_gauge_torus(const TorusLattice& lat, int a, int b, int n = 3);

/// Rotation torus in S^3 swept by a closed curve rho = rho0 + wobble cos(lobes theta)
/// in the hyperbolic plane (geodesic polar coordinates), parametrized by hyperbolic
/// arclength. Lattice periods are Lx = length of the curve, Ly = 2 pi; wobble = 0
/// with the default rho0 is the Clifford torus.
struct RevolutionProfile {
  double rho = 0.88137358701954302;  // asinh(1)
  double wobble = 0.02;
  int lobes = 2;
};

double revolution_period(const RevolutionProfile& p);
Immersion revolution_isothermic(int nx, int ny, const RevolutionProfile& p = {}, int n = 3);

/// Closed-form lift jet of the umbilic map (x, y) -> S^2 with psi = (cosh y, cos x, sin x, -sinh y, 0),
/// y centred on the lattice. Periodic only in x; c = 1/2, kappa = 0.
LiftJet umbilic_sphere_jet(const TorusLattice& lat);

/// L applied to the Euclidean lift followed by projection to the sphere.
Immersion moebius_transform(const Immersion& imm, const Eigen::MatrixXd& L);

/// Immersion into S^{n+1} by appending a zero coordinate.
Immersion embed_up(const Immersion& imm);

}  // namespace conflow
