#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "conflow/lattice.hpp"

namespace conflow {

/// Point of R^{n+1,1} (or its complexification). Component 0 is timelike.
using MVec = std::vector<cplx>;
using RVec = std::vector<double>;

/// Bilinear form -v0 w0 + sum vk wk, no conjugation.
cplx minkowski_inner(std::span<const cplx> u, std::span<const cplx> v);
double minkowski_inner(std::span<const double> u, std::span<const double> v);

/// (1, f) for a unit vector f.
RVec euclidean_lift(std::span<const double> f, double tol = 1e-12);

/// Spatial part divided by component 0.
RVec project_to_sphere(std::span<const double> psi, double tol = 1e-10);

/// psi / (-<psi, v0>), the representative in the section S_{v0}.
RVec conic_project(std::span<const double> psi, std::span<const double> v0, double tol = 1e-12);

/// Curvature -<v0, v0> of the section S_{v0}.
double section_curvature(std::span<const double> v0);

/// Mean curvature vector -v0perp - <v0perp, v0perp> v of a sphere through v.
MVec sphere_mean_curvature(std::span<const cplx> v0_perp, std::span<const cplx> v);

/// Diagonal metric diag(-1, 1, ..., 1) of size dim.
Eigen::MatrixXd minkowski_metric(int dim);

/// exp(eta * A) for antisymmetric A; the result preserves the form.
Eigen::MatrixXd lorentz_from_generator(const Eigen::MatrixXd& antisymmetric);

/// Lorentz matrix from a seeded random generator with entries of size `scale`.
Eigen::MatrixXd random_lorentz(int dim, std::uint64_t seed, double scale = 0.5);

/// Boost of rapidity `rapidity` mixing axis 0 with spatial axis `axis`.
Eigen::MatrixXd lorentz_boost(int dim, int axis, double rapidity);

RVec lorentz_apply(const Eigen::MatrixXd& L, std::span<const double> v);

}  // namespace conflow
