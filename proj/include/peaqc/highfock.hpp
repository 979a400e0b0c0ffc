#pragma once

#include <vector>

#include "peaqc/channels.hpp"
#include "peaqc/decoders.hpp"

namespace peaqc {

/// {|0⟩,|2⟩} code with environment α|0⟩ + β|n⟩, β real positive.
struct HighFockSpec {
  int n;
  double vacuum_weight;  ///< |α|²
  double lambda;
  double eta;

  /// η = λ/n.
  static HighFockSpec at_lambda(int n, double vacuum_weight, double lambda);
  void validate() const;
  Vec environment() const;
};

/// Channel and complement on the two-dimensional code space.  Throws TruncationTooSmall
/// unless n_max ≥ n + 6.
ChannelPair exact_channel(const HighFockSpec& spec, int n_max);

/// Large-n output amplitudes on |n−k⟩|k⟩ (zero branch) and |n+2−k⟩|k⟩ (two branch).
struct PoissonOutputs {
  double lambda;
  int kmax;
  std::vector<double> p;           ///< P_k
  std::vector<double> zero_branch;  ///< √P_k
  std::vector<double> two_branch;   ///< (λ/√2)√P_k(1 − 2k/λ + k(k−1)/λ²)
  double zero_deficit;              ///< 1 − Σ zero_branch²
  double two_deficit;
};

/// k runs to the first cutoff with Σ P_k ≥ 1 − tol, or exactly to `kmax` when given.
PoissonOutputs poisson_limit_outputs(double lambda, double tol = 1e-10, int kmax = -1);

/// Output basis: index 0 is |0⟩, index 1 + kmax + j is |n + j⟩ for j = −kmax..2.
HighFockLabels poisson_limit_labels(int kmax);

/// Large-n channel on the code space; small-photon-number states swap across the splitter.
KrausChannel poisson_limit_channel(const PoissonOutputs& out, double vacuum_weight);
KrausChannel poisson_limit_channel(double lambda, double vacuum_weight);

/// |⟨m₂, m₁|U|m₁, m₂⟩ − (−1)^{m₁}| at η = λ/n.
double swap_limit_check(int m1, int m2, int n, double lambda);

struct FidelityBound {
  double vacuum_weight;  ///< 1/(2e+1)
  double closed_form;
  double decoder_applied;  ///< explicit decoder on the k ≤ 3 outputs, no completion
  double channel_ic;       ///< I_c(I/2) of the limit channel at this weight
  double decoded_ic;       ///< I_c(I/2) after the completed decoder
};

/// λ = 1 construction.
FidelityBound fidelity_bound();

struct AlphaPoint {
  double lambda;
  double vacuum_weight;
  double ic;  ///< I_c(I/2) of the limit channel

  bool operator==(const AlphaPoint&) const = default;
};

/// Golden-section search over |α|² ∈ [0, 1] for each λ.
AlphaPoint optimize_alpha(double lambda, double tol = 1e-6);
std::vector<AlphaPoint> optimize_alpha(const std::vector<double>& lambdas, int workers = 1);

/// I_c(I/2) of the exact channel.
double exact_ic(const HighFockSpec& spec);

}  // namespace peaqc
