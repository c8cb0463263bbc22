#include "conflow/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>

namespace conflow {

namespace {

std::atomic<int> g_threads{1};
std::mutex g_planner;

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct PlanPair {
  PlanPtr forward, backward;
};

// Plans are created on scratch arrays and executed through the new-array
// interface, so they must be built unaligned.
PlanPair& plans_for(int nx, int ny) {
  thread_local std::map<std::pair<int, int>, PlanPair> cache;
  auto key = std::make_pair(nx, ny);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t n = static_cast<std::size_t>(nx) * (ny > 0 ? ny : 1);
  std::vector<cplx> a(n), b(n);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(g_planner);
  PlanPair pp;
  if (ny > 0) {
    pp.forward.reset(fftw_plan_dft_2d(nx, ny, in, out, FFTW_FORWARD, flags));
    pp.backward.reset(fftw_plan_dft_2d(nx, ny, in, out, FFTW_BACKWARD, flags));
  } else {
    pp.forward.reset(fftw_plan_dft_1d(nx, in, out, FFTW_FORWARD, flags));
    pp.backward.reset(fftw_plan_dft_1d(nx, in, out, FFTW_BACKWARD, flags));
  }
  return cache.emplace(key, std::move(pp)).first->second;
}

std::vector<cplx> run_plan(std::span<const cplx> values, int nx, int ny, bool inverse) {
  PlanPair& pp = plans_for(nx, ny);
  std::vector<cplx> in(values.begin(), values.end());
  std::vector<cplx> out(in.size());
  fftw_execute_dft(inverse ? pp.backward.get() : pp.forward.get(),
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  if (inverse) {
    const double s = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= s;
  }
  return out;
}

// Applies a Fourier multiplier symbol(kx, ky); Nyquist bins are zeroed when
// kill_nyquist is set.
ScalarField apply_symbol(const ScalarField& f, const std::function<cplx(double, double)>& symbol,
                         bool kill_nyquist = true) {
  const auto& lat = f.lattice();
  const int nx = lat.nx(), ny = lat.ny();
  auto spec = fft2(f.values(), nx, ny, false);
  const double ax = 2 * pi / lat.Lx(), ay = 2 * pi / lat.Ly();
  for (int j = 0; j < nx; ++j) {
    const int m = mode_number(j, nx);
    for (int k = 0; k < ny; ++k) {
      const int l = mode_number(k, ny);
      auto& s = spec[lat.index(j, k)];
      if (kill_nyquist && (2 * m == nx || 2 * l == ny)) {
        s = 0.0;
      } else {
        s *= symbol(ax * m, ay * l);
      }
    }
  }
  return ScalarField(lat, fft2(spec, nx, ny, true));
}

VectorField map_components(const VectorField& f, ScalarField (*op)(const ScalarField&)) {
  const int d = f.dim();
  std::vector<ScalarField> out(static_cast<std::size_t>(d), ScalarField(f.lattice()));
  const int nt = std::min(thread_count(), d);
  if (nt <= 1) {
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(c)] = op(f[c]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (int c = t; c < d; c += nt) out[static_cast<std::size_t>(c)] = op(f[c]);
      });
    for (auto& th : pool) th.join();
  }
  return VectorField(std::move(out));
}

}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

std::vector<cplx> fft2(std::span<const cplx> values, int nx, int ny, bool inverse) {
  return run_plan(values, nx, ny, inverse);
}

std::vector<cplx> fft1(std::span<const cplx> values, bool inverse) {
  return run_plan(values, static_cast<int>(values.size()), 0, inverse);
}

TorusLattice::TorusLattice(int nx, int ny, double Lx, double Ly) : nx_(nx), ny_(ny), Lx_(Lx), Ly_(Ly) {
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
    throw Error(ErrorCode::invalid_argument, "lattice sizes must be even and >= 8");
  if (!(Lx > 0) || !(Ly > 0)) throw Error(ErrorCode::invalid_argument, "lattice periods must be positive");
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const TorusLattice& lattice, cplx value)
    : lattice_(lattice), values_(lattice.size(), value) {}

ScalarField::ScalarField(const TorusLattice& lattice, std::vector<cplx> values)
    : lattice_(lattice), values_(std::move(values)) {
  if (values_.size() != lattice_.size())
    throw Error(ErrorCode::dimension_mismatch, "value count does not match lattice");
}

ScalarField ScalarField::sample(const TorusLattice& lattice, const std::function<cplx(double, double)>& g) {
  ScalarField f(lattice);
  for (int j = 0; j < lattice.nx(); ++j)
    for (int k = 0; k < lattice.ny(); ++k) f.at(j, k) = g(lattice.x(j), lattice.y(k));
  return f;
}

static void check_same(const TorusLattice& a, const TorusLattice& b) {
  if (!(a == b)) throw Error(ErrorCode::dimension_mismatch, "fields live on different lattices");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_same(lattice_, o.lattice_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_same(lattice_, o.lattice_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
  check_same(lattice_, o.lattice_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField ScalarField::map(const std::function<cplx(cplx)>& fn) const {
  ScalarField out(lattice_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i]);
  return out;
}
ScalarField ScalarField::conj() const {
  return map([](cplx v) { return std::conj(v); });
}
ScalarField ScalarField::real() const {
  return map([](cplx v) { return cplx(v.real(), 0.0); });
}
ScalarField ScalarField::imag() const {
  return map([](cplx v) { return cplx(v.imag(), 0.0); });
}
ScalarField ScalarField::abs2() const {
  return map([](cplx v) { return cplx(std::norm(v), 0.0); });
}

double ScalarField::sup_norm() const {
  double m = 0;
  for (auto v : values_) m = std::max(m, std::abs(v));
  return m;
}
double ScalarField::sup_imag() const {
  double m = 0;
  for (auto v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}
cplx ScalarField::mean() const {
  cplx s = 0;
  for (auto v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(ScalarField a, cplx s) { return a *= s; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  check_same(a.lattice(), b.lattice());
  ScalarField out(a.lattice());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
  return out;
}

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(const TorusLattice& lattice, int dim)
    : comps_(static_cast<std::size_t>(dim), ScalarField(lattice)) {
  if (dim < 1) throw Error(ErrorCode::invalid_argument, "fiber dimension must be positive");
}

VectorField::VectorField(std::vector<ScalarField> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw Error(ErrorCode::invalid_argument, "fiber dimension must be positive");
  for (const auto& c : comps_) check_same(c.lattice(), comps_.front().lattice());
}

std::vector<cplx> VectorField::point(std::size_t p) const {
  std::vector<cplx> v(comps_.size());
  for (std::size_t c = 0; c < comps_.size(); ++c) v[c] = comps_[c][p];
  return v;
}

void VectorField::set_point(std::size_t p, std::span<const cplx> v) {
  if (v.size() != comps_.size()) throw Error(ErrorCode::dimension_mismatch, "fiber dimension mismatch");
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c][p] = v[c];
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (o.dim() != dim()) throw Error(ErrorCode::dimension_mismatch, "fiber dimension mismatch");
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] += o.comps_[c];
  return *this;
}
VectorField& VectorField::operator-=(const VectorField& o) {
  if (o.dim() != dim()) throw Error(ErrorCode::dimension_mismatch, "fiber dimension mismatch");
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] -= o.comps_[c];
  return *this;
}
VectorField& VectorField::operator*=(cplx s) {
  for (auto& c : comps_) c *= s;
  return *this;
}
VectorField VectorField::scaled(const ScalarField& s) const {
  VectorField out = *this;
  for (auto& c : out.comps_) c *= s;
  return out;
}
VectorField VectorField::conj() const {
  VectorField out = *this;
  for (auto& c : out.comps_) c = c.conj();
  return out;
}
VectorField VectorField::real() const {
  VectorField out = *this;
  for (auto& c : out.comps_) c = c.real();
  return out;
}
double VectorField::sup_norm() const {
  double m = 0;
  for (const auto& c : comps_) m = std::max(m, c.sup_norm());
  return m;
}
double VectorField::sup_imag() const {
  double m = 0;
  for (const auto& c : comps_) m = std::max(m, c.sup_imag());
  return m;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(VectorField a, cplx s) { return a *= s; }
VectorField operator*(const ScalarField& s, const VectorField& v) { return v.scaled(s); }

// ---------------------------------------------------------------- calculus

ScalarField deriv_x(const ScalarField& f) {
  return apply_symbol(f, [](double kx, double) { return cplx(0, kx); });
}
ScalarField deriv_y(const ScalarField& f) {
  return apply_symbol(f, [](double, double ky) { return cplx(0, ky); });
}
ScalarField deriv_z(const ScalarField& f) {
  // (1/2)(ikx - i*iky)
  return apply_symbol(f, [](double kx, double ky) { return 0.5 * cplx(ky, kx); });
}
ScalarField deriv_zbar(const ScalarField& f) {
  return apply_symbol(f, [](double kx, double ky) { return 0.5 * cplx(-ky, kx); });
}
ScalarField laplacian(const ScalarField& f) {
  return apply_symbol(f, [](double kx, double ky) { return cplx(-(kx * kx + ky * ky), 0.0); });
}
VectorField deriv_x(const VectorField& f) { return map_components(f, &deriv_x); }
VectorField deriv_y(const VectorField& f) { return map_components(f, &deriv_y); }
VectorField deriv_z(const VectorField& f) { return map_components(f, &deriv_z); }
VectorField deriv_zbar(const VectorField& f) { return map_components(f, &deriv_zbar); }

ScalarField solve_dz(const ScalarField& g, double tol) {
  const cplx m = g.mean();
  if (std::abs(m) > tol)
    throw Error(ErrorCode::unsolvable_on_torus,
                "right-hand side has nonzero mean " + std::to_string(std::abs(m)));
  return apply_symbol(g, [](double kx, double ky) {
    if (kx == 0.0 && ky == 0.0) return cplx(0.0);
    return 1.0 / (0.5 * cplx(ky, kx));
  });
}

cplx integrate(const ScalarField& f) { return f.mean() * f.lattice().area(); }

ScalarField dealias(const ScalarField& f) {
  const auto& lat = f.lattice();
  const int nx = lat.nx(), ny = lat.ny();
  auto spec = fft2(f.values(), nx, ny, false);
  for (int j = 0; j < nx; ++j) {
    const int m = std::abs(mode_number(j, nx));
    for (int k = 0; k < ny; ++k) {
      const int l = std::abs(mode_number(k, ny));
      if (4 * m > nx || 4 * l > ny) spec[lat.index(j, k)] = 0.0;
    }
  }
  return ScalarField(lat, fft2(spec, nx, ny, true));
}

VectorField dealias(const VectorField& f) {
  return map_components(f, static_cast<ScalarField (*)(const ScalarField&)>(&dealias));
}

ScalarField spectral_filter(const ScalarField& f, int order) {
  const auto& lat = f.lattice();
  const int nx = lat.nx(), ny = lat.ny();
  auto spec = fft2(f.values(), nx, ny, false);
  for (int j = 0; j < nx; ++j) {
    const double ex = std::pow(2.0 * std::abs(mode_number(j, nx)) / nx, order);
    for (int k = 0; k < ny; ++k) {
      const double ey = std::pow(2.0 * std::abs(mode_number(k, ny)) / ny, order);
      spec[lat.index(j, k)] *= std::exp(-36.0 * (ex + ey));
    }
  }
  return ScalarField(lat, fft2(spec, nx, ny, true));
}

VectorField spectral_filter(const VectorField& f, int order) {
  VectorField out = f;
  for (int i = 0; i < f.dim(); ++i) out[i] = spectral_filter(f[i], order);
  return out;
}

ScalarField shift(const ScalarField& f, double dx, double dy) {
  const auto& lat = f.lattice();
  const int nx = lat.nx(), ny = lat.ny();
  return apply_symbol(
      f,
      [&](double kx, double ky) {
        // Nyquist bins interpolate as cosines (real-valued symmetric extension).
        const bool nyq_x = std::abs(std::abs(kx) - pi * nx / lat.Lx()) < 1e-9 * std::abs(kx);
        const bool nyq_y = std::abs(std::abs(ky) - pi * ny / lat.Ly()) < 1e-9 * std::abs(ky);
        cplx fx = nyq_x ? cplx(std::cos(kx * dx), 0) : std::exp(cplx(0, kx * dx));
        cplx fy = nyq_y ? cplx(std::cos(ky * dy), 0) : std::exp(cplx(0, ky * dy));
        return fx * fy;
      },
      false);
}

cplx evaluate(const ScalarField& f, double x, double y) {
  const auto& lat = f.lattice();
  const int nx = lat.nx(), ny = lat.ny();
  auto spec = fft2(f.values(), nx, ny, false);
  const double ax = 2 * pi / lat.Lx(), ay = 2 * pi / lat.Ly();
  cplx sum = 0;
  for (int j = 0; j < nx; ++j) {
    const int m = mode_number(j, nx);
    cplx ex = 2 * m == nx ? cplx(std::cos(ax * m * x), 0) : std::exp(cplx(0, ax * m * x));
    for (int k = 0; k < ny; ++k) {
      const int l = mode_number(k, ny);
      cplx ey = 2 * l == ny ? cplx(std::cos(ay * l * y), 0) : std::exp(cplx(0, ay * l * y));
      sum += spec[lat.index(j, k)] * ex * ey;
    }
  }
  return sum / static_cast<double>(lat.size());
}

// ---------------------------------------------------------------- 1-D

std::vector<cplx> line_deriv(std::span<const cplx> f, double L, int order) {
  const int n = static_cast<int>(f.size());
  auto spec = fft1(f, false);
  for (int i = 0; i < n; ++i) {
    const int m = mode_number(i, n);
    if (2 * m == n) {
      spec[static_cast<std::size_t>(i)] = 0.0;
      continue;
    }
    spec[static_cast<std::size_t>(i)] *= std::pow(cplx(0, 2 * pi * m / L), order);
  }
  return fft1(spec, true);
}

std::vector<cplx> line_dealias(std::span<const cplx> f) {
  const int n = static_cast<int>(f.size());
  auto spec = fft1(f, false);
  for (int i = 0; i < n; ++i)
    if (4 * std::abs(mode_number(i, n)) > n) spec[static_cast<std::size_t>(i)] = 0.0;
  return fft1(spec, true);
}

cplx line_mean(std::span<const cplx> f) {
  cplx s = 0;
  for (auto v : f) s += v;
  return s / static_cast<double>(f.size());
}

}  // namespace conflow
