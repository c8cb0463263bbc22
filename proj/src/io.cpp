#include "conflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace conflow {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_error, "cannot write " + path);
  return os;
}

double parse_double(const std::string& s, const std::string& path) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorCode::io_error, "bad number '" + s + "' in " + path);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, sep))
    if (!tok.empty() || sep == ',') out.push_back(tok);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0 ? 0.0 : v);
  return buf;
}

void write_field_csv(const VectorField& f, const std::string& path) {
  const TorusLattice& lat = f.lattice();
  std::ofstream os = open_out(path);
  os << "nx,ny,Lx,Ly,d\n"
     << lat.nx() << ',' << lat.ny() << ',' << format_double(lat.Lx()) << ',' << format_double(lat.Ly()) << ','
     << f.dim() << '\n';
  for (std::size_t p = 0; p < lat.size(); ++p) {
    for (int c = 0; c < f.dim(); ++c) {
      if (c) os << ',';
      os << format_double(f[c][p].real()) << ',' << format_double(f[c][p].imag());
    }
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path);
}

VectorField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::string line;
  if (!std::getline(is, line) || line != "nx,ny,Lx,Ly,d") throw Error(ErrorCode::io_error, "missing header in " + path);
  if (!std::getline(is, line)) throw Error(ErrorCode::io_error, "missing dimensions in " + path);
  auto h = split(line, ',');
  if (h.size() != 5) throw Error(ErrorCode::io_error, "dimension line needs five fields in " + path);
  const double nx = parse_double(h[0], path), ny = parse_double(h[1], path), d = parse_double(h[4], path);
  if (nx < 1 || ny < 1 || d < 1 || nx != std::floor(nx) || ny != std::floor(ny) || d != std::floor(d))
    throw Error(ErrorCode::io_error, "bad lattice size in " + path);
  const double Lx = parse_double(h[2], path), Ly = parse_double(h[3], path);
  if (!(Lx > 0) || !(Ly > 0) || nx < 8 || ny < 8 || static_cast<long>(nx) % 2 || static_cast<long>(ny) % 2)
    throw Error(ErrorCode::io_error, "unsupported lattice in " + path);
  TorusLattice lat(static_cast<int>(nx), static_cast<int>(ny), Lx, Ly);
  VectorField f(lat, static_cast<int>(d));
  for (std::size_t p = 0; p < lat.size(); ++p) {
    if (!std::getline(is, line)) throw Error(ErrorCode::io_error, "truncated field in " + path);
    auto v = split(line, ',');
    if (static_cast<int>(v.size()) != 2 * f.dim()) throw Error(ErrorCode::io_error, "bad row width in " + path);
    for (int c = 0; c < f.dim(); ++c) f[c][p] = {parse_double(v[2 * c], path), parse_double(v[2 * c + 1], path)};
  }
  while (std::getline(is, line))
    if (!line.empty()) throw Error(ErrorCode::io_error, "trailing data in " + path);
  return f;
}

Pole choose_pole(const Immersion& imm) {
  const TorusLattice& lat = imm.f.lattice();
  Pole best;
  double best_gap = -1;
  for (int axis = 0; axis < imm.n; ++axis)
    for (int sign : {1, -1}) {
      double gap = 2;
      for (std::size_t p = 0; p < lat.size(); ++p) gap = std::min(gap, 1 - sign * imm.f[axis][p].real());
      if (gap > best_gap + 1e-12) {
        best_gap = gap;
        best = {axis, sign};
      }
    }
  return best;
}

VectorField stereographic(const Immersion& imm, Pole pole, double tol) {
  if (pole.axis < 0 || pole.axis > imm.n || (pole.sign != 1 && pole.sign != -1))
    throw Error(ErrorCode::invalid_argument, "bad projection pole");
  const TorusLattice& lat = imm.f.lattice();
  VectorField out(lat, imm.n);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const double den = 1 - pole.sign * imm.f[pole.axis][p].real();
    if (den < tol) throw Error(ErrorCode::point_at_infinity, "surface passes through the projection pole");
    for (int i = 0, j = 0; i <= imm.n; ++i)
      if (i != pole.axis) out[j++][p] = imm.f[i][p].real() / den;
  }
  return out;
}

void write_obj(const Immersion& imm, const std::string& path) {
  const TorusLattice& lat = imm.f.lattice();
  const Pole pole = choose_pole(imm);
  VectorField v = stereographic(imm, pole);
  std::ofstream os = open_out(path);
  os << "# conflow mesh " << lat.nx() << 'x' << lat.ny() << " S^" << imm.n << '\n'
     << "# pole " << (pole.sign > 0 ? '+' : '-') << "e" << pole.axis << '\n';
  for (std::size_t p = 0; p < lat.size(); ++p) {
    os << 'v';
    for (int i = 0; i < imm.n; ++i) os << ' ' << format_double(v[i][p].real());
    os << '\n';
  }
  const int nx = lat.nx(), ny = lat.ny();
  for (int j = 0; j < nx; ++j)
    for (int k = 0; k < ny; ++k) {
      const std::size_t a = lat.index(j, k), b = lat.index((j + 1) % nx, k), c = lat.index((j + 1) % nx, (k + 1) % ny),
                        d = lat.index(j, (k + 1) % ny);
      os << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << ' ' << d + 1 << '\n';
    }
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path);
}

Immersion read_obj(const std::string& path, const TorusLattice& lat) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::vector<std::vector<double>> pts;
  Pole pole;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# pole ", 0) == 0) {
      const std::string t = line.substr(7);
      if (t.size() < 3 || (t[0] != '+' && t[0] != '-') || t[1] != 'e') throw Error(ErrorCode::io_error, "bad pole line in " + path);
      pole = {static_cast<int>(parse_double(t.substr(2), path)), t[0] == '+' ? 1 : -1};
    }
    if (line.rfind("v ", 0) != 0) continue;
    auto tok = split(line.substr(2), ' ');
    std::vector<double> x;
    for (const auto& t : tok) x.push_back(parse_double(t, path));
    pts.push_back(std::move(x));
  }
  if (pts.size() != lat.size() || pts.front().empty()) throw Error(ErrorCode::io_error, "vertex count mismatch in " + path);
  const int n = static_cast<int>(pts.front().size());
  if (pole.axis < 0 || pole.axis > n) throw Error(ErrorCode::io_error, "bad pole axis in " + path);
  Immersion imm{n, VectorField(lat, n + 1)};
  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (static_cast<int>(pts[p].size()) != n) throw Error(ErrorCode::io_error, "ragged vertices in " + path);
    double r2 = 0;
    for (double x : pts[p]) r2 += x * x;
    imm.f[pole.axis][p] = pole.sign * (r2 - 1) / (r2 + 1);
    for (int i = 0, j = 0; i <= n; ++i)
      if (i != pole.axis) imm.f[i][p] = 2 * pts[p][j++] / (r2 + 1);
  }
  return imm;
}

}  // namespace conflow
