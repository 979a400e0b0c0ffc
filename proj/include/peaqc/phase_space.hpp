#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "peaqc/channels.hpp"
#include "peaqc/fock.hpp"
#include "peaqc/lattice.hpp"

namespace peaqc {

/// T(u) = exp{i(u_p x − u_x p)} = D((u_x + i u_p)/√2).
FockOperator translation(const PhasePoint& u, const TruncatedBasis& basis);

/// ⟨m|D(β)|k⟩ for m, k ≤ n, from the associated Laguerre closed form.
Mat displacement_elements(cplx beta, int n);

struct GridSpec {
  double lo = -6.0;
  double hi = 6.0;
  int points = 161;

  double at(int i) const { return points == 1 ? lo : lo + (hi - lo) * i / (points - 1); }
  bool operator==(const GridSpec& o) const { return lo == o.lo && hi == o.hi && points == o.points; }
};

/// values(i, j) = χ(α_x = at(i), α_p = at(j)).
struct PhaseGrid {
  GridSpec grid;
  Mat values;
};

/// χ(α) = Tr[ρ T(α)].
using CharFunction = std::function<cplx(const PhasePoint&)>;

CharFunction char_func(const DensityMatrix& rho);
CharFunction char_func(const FockKet& psi);
CharFunction char_func(const StateSpec& spec);

PhaseGrid evaluate(const CharFunction& chi, const GridSpec& grid = {}, int workers = 1);

/// χ₃(α) = χ₁(√η α) χ₂(√(1−η) α) and χ₄(α) = χ₁(−√(1−η) α) χ₂(√η α).
std::pair<CharFunction, CharFunction> beamsplitter_charfunc(CharFunction chi1, CharFunction chi2,
                                                            double eta);
/// Grid form; every rescaled argument must land on a grid node, otherwise DimensionMismatch.
std::pair<PhaseGrid, PhaseGrid> beamsplitter_charfunc(const PhaseGrid& g1, const PhaseGrid& g2,
                                                      double eta);

struct HidingPoint {
  std::string label;
  PhasePoint point;
  bool logical;
  double magnitude;        ///< |χ_env(√(η/(1−η)) p)|, env factor at the rescaled logical point
  double naive_magnitude;  ///< |χ_env(√η p)|
  bool hidden;
};

struct HidingReport {
  double eta;
  double threshold;
  std::vector<HidingPoint> points;
  double max_logical_magnitude;
  double max_logical_naive;
};

/// Environment amplitude at the logical and stabilizer points of the lattice code.
HidingReport hiding_report(const StateSpec& env, double eta, LatticeKind lattice,
                           double threshold = 0.02);

/// Orthonormalized approximate-GKP codewords as columns, Fock levels 0..n_max.
Mat gkp_code(LatticeKind lattice, double delta, int n_max = 0);

/// I_c(I/2) of the approximate hexagonal GKP code through the Fock-|n⟩ assisted channel.
double hex_gkp_fock_ic(int n, double eta, double delta, int n_max = 0);

/// CSV with `#` metadata lines, then alpha_x,alpha_p,re,im rows.
void write_csv(std::ostream& os, const PhaseGrid& g, const std::vector<std::string>& meta = {});

}  // namespace peaqc
