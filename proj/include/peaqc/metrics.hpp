#pragma once

#include <cstdint>
#include <vector>

#include "peaqc/channels.hpp"

namespace peaqc {

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// (1/d²) Σ_k |Tr K_k|², divided by Tr Λ(I/d) so trace-decreasing maps are renormalized.
double entanglement_fidelity(const KrausChannel& ch);
/// (1/d²) Σ_k |Tr K_k|² with no renormalization.
double entanglement_fidelity_raw(const KrausChannel& ch);
/// ⟨Φ|J|Φ⟩ / Tr J for the Choi matrix of a d → d map.
double entanglement_fidelity(const ChoiMatrix& j);

/// S(Λ(ρ)) − S(Λᶜ(ρ)) with both outputs renormalized to unit trace.
double coherent_information(const DensityMatrix& rho, const KrausChannel& ch,
                            const KrausChannel& comp);
/// Same, with the complement taken from the Kraus representation.
double coherent_information(const DensityMatrix& rho, const KrausChannel& ch);
/// Same, computed from the Choi matrix through the purification of ρ.
double coherent_information(const DensityMatrix& rho, const ChoiMatrix& j);

/// M[(μ,k),(ν,l)] = ⟨μ|K_k† K_l|ν⟩, row index μ * K + k.
struct QecMatrix {
  Mat m;
  int d;
  int k;
};

/// Logical kets are the columns of `kets` (in the channel's input space).
QecMatrix qec_matrix(const Mat& kets, const KrausChannel& ch);
/// Computational basis of the channel input as the code.
QecMatrix qec_matrix(const KrausChannel& ch);

struct PetzCheck {
  double commutator_norm;
  bool holds;
};

/// ‖[√M, 1_L ⊗ Tr_L √M]‖; holds when below 1e-8.
PetzCheck petz_optimality_check(const QecMatrix& m);

struct OptimalFidelity {
  double value;
  bool petz_optimal;  ///< false means `value` is only the Petz lower bound
};

/// (1/d²) ‖Tr_L √M‖²_F.
OptimalFidelity optimal_fidelity_from_M(const QecMatrix& m);

struct CapacityOptions {
  int starts = 20;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double fd_step = 1e-6;
  double tol = 1e-11;
};

struct CapacityEstimate {
  double value;
  Mat argmax;
  double mixed_baseline;            ///< I_c(I/d)
  std::vector<double> start_values;  ///< best value reached from each start
  int starts;
  int iterations;
};

/// Multistart gradient ascent of I_c over ρ = TT†/Tr(TT†).  Starts are I/d, every basis
/// state, then seeded random factors.
CapacityEstimate maximize_coherent_info(const KrausChannel& ch, const KrausChannel& comp,
                                        const CapacityOptions& opt = {});
CapacityEstimate maximize_coherent_info(const KrausChannel& ch, const CapacityOptions& opt = {});

}  // namespace peaqc
