#include "peaqc/lattice.hpp"

#include "peaqc/error.hpp"
#include "peaqc/linalg.hpp"

namespace peaqc {

GkpLattice gkp_lattice(LatticeKind kind) {
  if (kind == LatticeKind::Square) {
    const double s = 2 * std::sqrt(kPi);
    return {kind, {0.0, s}, {s, 0.0}};
  }
  const double a = std::sqrt(2 * kPi / std::sqrt(3.0));
  const double b = std::sqrt(2 * kPi * std::sqrt(3.0));
  return {kind, {-a, b}, {2 * a, 0.0}};
}

LatticeKind parse_lattice_kind(const std::string& s) {
  if (s == "square") return LatticeKind::Square;
  if (s == "hex" || s == "hexagonal") return LatticeKind::Hexagonal;
  throw InvalidSpec("unknown lattice kind '" + s + "'");
}

std::string to_string(LatticeKind kind) {
  return kind == LatticeKind::Square ? "square" : "hexagonal";
}

}  // namespace peaqc
