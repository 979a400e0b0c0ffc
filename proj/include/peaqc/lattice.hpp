#pragma once

#include <array>
#include <cmath>
#include <string>

namespace peaqc {

using PhasePoint = std::array<double, 2>;  // (x, p)

enum class LatticeKind { Square, Hexagonal };

/// Qubit GKP lattice: stabilizer translations u, v with unit-cell area 4π.
struct GkpLattice {
  LatticeKind kind;
  PhasePoint u;
  PhasePoint v;

  PhasePoint logical_z() const { return {u[0] / 2, u[1] / 2}; }
  PhasePoint logical_x() const { return {v[0] / 2, v[1] / 2}; }
  PhasePoint logical_y() const { return {(u[0] + v[0]) / 2, (u[1] + v[1]) / 2}; }
  double cell_area() const { return std::abs(u[0] * v[1] - u[1] * v[0]); }
};

GkpLattice gkp_lattice(LatticeKind kind);

LatticeKind parse_lattice_kind(const std::string& s);
std::string to_string(LatticeKind kind);

}  // namespace peaqc
