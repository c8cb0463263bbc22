#include "conflow/lightcone.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace conflow {

namespace {

template <class T>
T inner(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size() || u.empty())
    throw Error(ErrorCode::dimension_mismatch, "Minkowski vectors of different dimension");
  T s = -u[0] * v[0];
  for (std::size_t k = 1; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

}  // namespace

cplx minkowski_inner(std::span<const cplx> u, std::span<const cplx> v) { return inner(u, v); }
double minkowski_inner(std::span<const double> u, std::span<const double> v) { return inner(u, v); }

RVec euclidean_lift(std::span<const double> f, double tol) {
  double n2 = 0;
  for (double x : f) n2 += x * x;
  if (std::abs(n2 - 1) > tol) throw Error(ErrorCode::not_on_sphere, "|f| = " + std::to_string(std::sqrt(n2)));
  RVec out{1.0};
  out.insert(out.end(), f.begin(), f.end());
  return out;
}

RVec project_to_sphere(std::span<const double> psi, double tol) {
  if (psi.size() < 2) throw Error(ErrorCode::dimension_mismatch, "need at least two components");
  if (!(psi[0] > 0)) throw Error(ErrorCode::not_forward, "component 0 must be positive");
  if (std::abs(minkowski_inner(psi, psi)) > tol * psi[0] * psi[0])
    throw Error(ErrorCode::not_null, "vector is not on the light cone");
  RVec out(psi.begin() + 1, psi.end());
  for (double& x : out) x /= psi[0];
  return out;
}

RVec conic_project(std::span<const double> psi, std::span<const double> v0, double tol) {
  const double s = minkowski_inner(psi, v0);
  if (std::abs(s) < tol) throw Error(ErrorCode::point_at_infinity, "point lies on the boundary of the space form");
  RVec out(psi.begin(), psi.end());
  for (double& x : out) x /= -s;
  return out;
}

double section_curvature(std::span<const double> v0) { return -minkowski_inner(v0, v0); }

MVec sphere_mean_curvature(std::span<const cplx> v0_perp, std::span<const cplx> v) {
  const cplx n = minkowski_inner(v0_perp, v0_perp);
  if (v.size() != v0_perp.size()) throw Error(ErrorCode::dimension_mismatch, "dimension mismatch");
  MVec h(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) h[k] = -v0_perp[k] - n * v[k];
  return h;
}

Eigen::MatrixXd minkowski_metric(int dim) {
  Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(dim, dim);
  eta(0, 0) = -1;
  return eta;
}

Eigen::MatrixXd lorentz_from_generator(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || (a + a.transpose()).norm() > 1e-12 * (1 + a.norm()))
    throw Error(ErrorCode::invalid_argument, "generator must be antisymmetric");
  Eigen::MatrixXd g = minkowski_metric(static_cast<int>(a.rows())) * a;
  return g.exp();
}

Eigen::MatrixXd random_lorentz(int dim, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      a(i, j) = nd(rng);
      a(j, i) = -a(i, j);
    }
  return lorentz_from_generator(a);
}

Eigen::MatrixXd lorentz_boost(int dim, int axis, double rapidity) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim);
  b(0, 0) = b(axis, axis) = std::cosh(rapidity);
  b(0, axis) = b(axis, 0) = std::sinh(rapidity);
  return b;
}

RVec lorentz_apply(const Eigen::MatrixXd& L, std::span<const double> v) {
  Eigen::Map<const Eigen::VectorXd> in(v.data(), static_cast<Eigen::Index>(v.size()));
  Eigen::VectorXd r = L * in;
  return RVec(r.data(), r.data() + r.size());
}

}  // namespace conflow
