#pragma once

#include <string>

#include "conflow/surface.hpp"

namespace conflow {

/// CSV layout: "nx,ny,Lx,Ly,d" header line, its values, then one row per lattice
/// point in flat order holding re,im for each component. Values use 17 significant digits.
void write_field_csv(const VectorField& f, const std::string& path);
VectorField read_field_csv(const std::string& path);

std::string format_double(double v);

/// Projection pole sign * e_axis.
struct Pole {
  int axis = 0;
  int sign = 1;
};

/// Among +-e_i, i < n (the last ambient coordinate is never dropped), the pole
/// farthest from the surface; ties go to the earlier candidate, +e_0 first.
Pole choose_pole(const Immersion& imm);

/// Coordinates f_j / (1 - sign f_axis), j != axis; throws point_at_infinity near the pole.
VectorField stereographic(const Immersion& imm, Pole pole = {}, double tol = 1e-12);

/// Vertices are the stereographic image from choose_pole in row-major lattice order,
/// faces are quads with periodic wrap; the pole is recorded in a comment line.
/// n > 3 writes n coordinates per vertex line.
void write_obj(const Immersion& imm, const std::string& path);

/// Inverse of write_obj on a given lattice.
Immersion read_obj(const std::string& path, const TorusLattice& lat);

}  // namespace conflow
