#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "conflow/errors.hpp"

namespace conflow {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

/// Uniform periodic sampling of a rectangular fundamental domain of z = x + iy.
/// Sample (j, k) sits at x = j*Lx/nx, y = k*Ly/ny and has flat index j*ny + k.
class TorusLattice {
 public:
  TorusLattice(int nx, int ny, double Lx = 2 * pi, double Ly = 2 * pi);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double hx() const { return Lx_ / nx_; }
  double hy() const { return Ly_ / ny_; }
  double x(int j) const { return j * hx(); }
  double y(int k) const { return k * hy(); }
  std::size_t index(int j, int k) const { return static_cast<std::size_t>(j) * ny_ + k; }
  double area() const { return Lx_ * Ly_; }

  bool operator==(const TorusLattice&) const = default;

 private:
  int nx_, ny_;
  double Lx_, Ly_;
};

/// Complex scalar samples on a lattice.
class ScalarField {
 public:
  explicit ScalarField(const TorusLattice& lattice, cplx value = 0.0);
  ScalarField(const TorusLattice& lattice, std::vector<cplx> values);

  /// Samples g(x, y) at every lattice point.
  static ScalarField sample(const TorusLattice& lattice,
                            const std::function<cplx(double, double)>& g);

  const TorusLattice& lattice() const { return lattice_; }
  std::size_t size() const { return values_.size(); }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& at(int j, int k) { return values_[lattice_.index(j, k)]; }
  const cplx& at(int j, int k) const { return values_[lattice_.index(j, k)]; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(cplx s);

  ScalarField conj() const;
  ScalarField real() const;
  ScalarField imag() const;
  ScalarField abs2() const;
  ScalarField map(const std::function<cplx(cplx)>& fn) const;

  double sup_norm() const;
  double sup_imag() const;
  cplx mean() const;

 private:
  TorusLattice lattice_;
  std::vector<cplx> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, cplx s);
ScalarField operator*(cplx s, ScalarField a);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(ScalarField a);

/// d complex components per lattice point, stored component-major.
class VectorField {
 public:
  /// Empty placeholder; only valid as an assignment target.
  VectorField() = default;
  VectorField(const TorusLattice& lattice, int dim);
  explicit VectorField(std::vector<ScalarField> components);

  const TorusLattice& lattice() const { return comps_.front().lattice(); }
  int dim() const { return static_cast<int>(comps_.size()); }
  ScalarField& operator[](int c) { return comps_[static_cast<std::size_t>(c)]; }
  const ScalarField& operator[](int c) const { return comps_[static_cast<std::size_t>(c)]; }
  std::vector<cplx> point(std::size_t p) const;
  void set_point(std::size_t p, std::span<const cplx> v);

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(cplx s);
  VectorField scaled(const ScalarField& s) const;
  VectorField conj() const;
  VectorField real() const;
  double sup_norm() const;
  double sup_imag() const;

 private:
  std::vector<ScalarField> comps_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(VectorField a, cplx s);
VectorField operator*(const ScalarField& s, const VectorField& v);

// Spectral calculus on the torus. Derivatives annihilate Nyquist modes.

ScalarField deriv_x(const ScalarField& f);
ScalarField deriv_y(const ScalarField& f);
ScalarField deriv_z(const ScalarField& f);
ScalarField deriv_zbar(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
VectorField deriv_x(const VectorField& f);
VectorField deriv_y(const VectorField& f);
VectorField deriv_z(const VectorField& f);
VectorField deriv_zbar(const VectorField& f);

/// Zero-mean solution u of u_z = g. Throws unsolvable_on_torus when |mean g| > tol.
ScalarField solve_dz(const ScalarField& g, double tol);

/// Trapezoidal quadrature over the fundamental domain.
cplx integrate(const ScalarField& f);

/// Keeps Fourier modes with |m| <= nx/4 and |l| <= ny/4.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& f);

/// Exponential filter exp(-36 ((2|m|/nx)^p + (2|l|/ny)^p)).
ScalarField spectral_filter(const ScalarField& f, int order = 36);
VectorField spectral_filter(const VectorField& f, int order = 36);

/// Trigonometric interpolation: samples of f at (x + dx, y + dy).
ScalarField shift(const ScalarField& f, double dx, double dy);

/// Trigonometric interpolant of f evaluated at an arbitrary point.
cplx evaluate(const ScalarField& f, double x, double y);

// Periodic 1-D calculus used along single lines (KdV, Schwarzian of maps).

std::vector<cplx> line_deriv(std::span<const cplx> f, double L, int order = 1);
std::vector<cplx> line_dealias(std::span<const cplx> f);
cplx line_mean(std::span<const cplx> f);

/// Worker threads used for componentwise spectral operations on vector fields (default 1).
/// Each component is transformed independently, so results do not depend on the count.
void set_thread_count(int n);
int thread_count();

/// Forward / inverse DFT wrappers (unnormalized forward, normalized inverse).
std::vector<cplx> fft2(std::span<const cplx> values, int nx, int ny, bool inverse);
std::vector<cplx> fft1(std::span<const cplx> values, bool inverse);

/// Signed integer wavenumber of FFT bin i on n points.
inline int mode_number(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace conflow
