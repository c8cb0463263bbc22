#include "conflow/corpus.hpp"

#include <cmath>

#include "conflow/lightcone.hpp"

namespace conflow {

namespace {

Immersion from_components(const TorusLattice& lat, int n, std::vector<std::function<double(double, double)>> comps) {
  VectorField f(lat, n + 1);
  for (std::size_t a = 0; a < comps.size(); ++a)
    f[static_cast<int>(a)] = ScalarField::sample(lat, [&](double x, double y) { return cplx(comps[a](x, y)); });
  return {n, std::move(f)};
}

void check_n(int n) {
  if (n != 3 && n != 4) throw Error(ErrorCode::not_implemented_dim, "corpus surfaces live in S^3 or S^4");
}

}  // namespace

Immersion clifford_torus(const TorusLattice& lat, int n) {
  check_n(n);
  const double s = 1 / std::sqrt(2.0);
  return from_components(lat, n,
                         {[s](double x, double) { return s * std::cos(x); }, [s](double x, double) { return s * std::sin(x); },
                          [s](double, double y) { return s * std::cos(y); }, [s](double, double y) { return s * std::sin(y); }});
}

Immersion cmc_gauge_torus(const TorusLattice& lat, int a, int b, int n) {
  check_n(n);
  if (a <= 0 || b <= 0) throw Error(ErrorCode::invalid_argument, "frequencies must be positive integers");
  if (std::abs(lat.Lx() - 2 * pi) > 1e-12 || std::abs(lat.Ly() - 2 * pi) > 1e-12)
    throw Error(ErrorCode::non_periodic, "flat torus needs the square 2 pi lattice");
  const double nrm = std::hypot(a, b), r1 = b / nrm, r2 = a / nrm;
  return from_components(lat, n,
                         {[=](double x, double) { return r1 * std::cos(a * x); }, [=](double x, double) { return r1 * std::sin(a * x); },
                          [=](double, double y) { return r2 * std::cos(b * y); }, [=](double, double y) { return r2 * std::sin(b * y); }});
}

namespace {

// Closed curve in the hyperbolic plane, polar angle theta, geodesic radius rho(theta).
struct Meridian {
  RevolutionProfile p;
  double rho(double th) const { return p.rho + p.wobble * std::cos(p.lobes * th); }
  double speed(double th) const {
    const double dr = -p.wobble * p.lobes * std::sin(p.lobes * th);
    return std::hypot(dr, std::sinh(rho(th)));
  }
};

// Hyperbolic arclength s(theta) = mean * phi + periodic part, from a spectral antiderivative.
struct Arclength {
  double mean = 0;
  std::vector<cplx> coef;  // Fourier coefficients of the periodic part
  int m = 0;

  explicit Arclength(const Meridian& mer, int samples = 1024) : m(samples) {
    std::vector<cplx> v(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = mer.speed(2 * pi * i / m);
    coef = fft1(v, false);
    mean = coef[0].real() / m;
    for (int i = 0; i < m; ++i) {
      const int k = mode_number(i, m);
      coef[static_cast<std::size_t>(i)] = (k == 0 || 2 * k == m) ? cplx(0) : coef[static_cast<std::size_t>(i)] / (cplx(0, k) * double(m));
    }
  }
  double operator()(double phi) const {
    double s = mean * phi;
    for (int i = 0; i < m; ++i) s += (coef[static_cast<std::size_t>(i)] * std::exp(cplx(0, mode_number(i, m) * phi))).real();
    return s;
  }
};

}  // namespace

double revolution_period(const RevolutionProfile& p) {
  Meridian mer{p};
  return Arclength(mer).mean * 2 * pi;
}

Immersion revolution_isothermic(int nx, int ny, const RevolutionProfile& p, int n) {
  check_n(n);
  if (!(p.rho - std::abs(p.wobble) > 0) || p.lobes < 1)
    throw Error(ErrorCode::invalid_argument, "profile must stay off the rotation axis");
  Meridian mer{p};
  Arclength arc(mer);
  const double L = arc.mean * 2 * pi;
  TorusLattice lat(nx, ny, L, 2 * pi);
  VectorField f(lat, n + 1);
  for (int j = 0; j < nx; ++j) {
    const double s = lat.x(j);
    double th = s / arc.mean;
    for (int it = 0; it < 50; ++it) {
      const double step = (arc(th) - s) / mer.speed(th);
      th -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double r = mer.rho(th), g1 = 1 / std::cosh(r), g2 = std::tanh(r) * std::cos(th), g3 = std::tanh(r) * std::sin(th);
    for (int k = 0; k < ny; ++k) {
      const std::size_t i = lat.index(j, k);
      f[0][i] = g1 * std::cos(lat.y(k));
      f[1][i] = g1 * std::sin(lat.y(k));
      f[2][i] = g2;
      f[3][i] = g3;
    }
  }
  return {n, std::move(f)};
}

LiftJet umbilic_sphere_jet(const TorusLattice& lat) {
  const double y0 = lat.Ly() / 2;
  VectorField psi(lat, 5), pz(lat, 5), pzz(lat, 5), pzzb(lat, 5);
  const cplx I(0, 1);
  for (int j = 0; j < lat.nx(); ++j)
    for (int k = 0; k < lat.ny(); ++k) {
      const double x = lat.x(j), y = lat.y(k) - y0, ch = std::cosh(y), sh = std::sinh(y);
      const std::size_t p = lat.index(j, k);
      const double v[5] = {ch, std::cos(x), std::sin(x), -sh, 0};
      const double vx[5] = {0, -std::sin(x), std::cos(x), 0, 0};
      const double vy[5] = {sh, 0, 0, -ch, 0};
      const double vxx[5] = {0, -std::cos(x), -std::sin(x), 0, 0};
      const double vyy[5] = {ch, 0, 0, -sh, 0};
      for (int a = 0; a < 5; ++a) {
        psi[a][p] = v[a];
        pz[a][p] = 0.5 * (vx[a] - I * vy[a]);
        pzz[a][p] = 0.25 * (vxx[a] - vyy[a]);
        pzzb[a][p] = 0.25 * (vxx[a] + vyy[a]);
      }
    }
  return {psi, pz, pzz, pzzb};
}

Immersion moebius_transform(const Immersion& imm, const Eigen::MatrixXd& L) {
  const VectorField& f = imm.f;
  const TorusLattice& lat = f.lattice();
  const int N = f.dim() + 1;
  if (L.rows() != N || L.cols() != N) throw Error(ErrorCode::dimension_mismatch, "Lorentz matrix has wrong size");
  VectorField g(lat, f.dim());
  for (std::size_t p = 0; p < lat.size(); ++p) {
    RVec lift{1.0};
    for (int a = 0; a < f.dim(); ++a) lift.push_back(f[a][p].real());
    RVec img = project_to_sphere(lorentz_apply(L, lift), 1e-8);
    for (int a = 0; a < f.dim(); ++a) g[a][p] = img[static_cast<std::size_t>(a)];
  }
  return {imm.n, std::move(g)};
}

Immersion embed_up(const Immersion& imm) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < imm.f.dim(); ++a) comps.push_back(imm.f[a]);
  comps.emplace_back(imm.f.lattice());
  return {imm.n + 1, VectorField(std::move(comps))};
}

}  // namespace conflow
