#pragma once

#include "peaqc/channels.hpp"
#include "peaqc/comb.hpp"
#include "peaqc/optimizer.hpp"

namespace peaqc {

/// Petz map R_k = σ^{1/2} K_k† Λ(σ)^{-1/2} on the support of Λ(σ).  With `complete`, every
/// direction orthogonal to that support is sent to |0_L⟩ so the decoder is CPTP.
KrausChannel petz_decoder(const KrausChannel& ch, const DensityMatrix& sigma, bool complete = true,
                          double cutoff = 1e-10);
KrausChannel petz_decoder(const KrausChannel& ch, bool complete = true);

/// R_k = Σ_μ (f*_{k+μ}/|f_{k+μ}|) |μ⟩⟨ξ(μ,k)| on the coordinates of `ideal_kraus`.
KrausChannel comb_decoder(const CombSpec& spec);

/// Output-basis positions of |∅⟩ and |n⟩; |n±1⟩, |n±2⟩ sit next to |n⟩.
struct HighFockLabels {
  int empty;
  int n;
  int out_dim;
};

/// The three-operator decoder for the {|0⟩,|2⟩} code with α|∅⟩ + β|n⟩ environments.
KrausChannel highfock_decoder(const HighFockLabels& labels, bool complete = true);

/// Fidelity-optimal decoder from the ADMM solver, lifted back to the full output space.
KrausChannel optimal_decoder(const KrausChannel& ch, const SdpOptions& opt = {});

}  // namespace peaqc
