#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "peaqc/channels.hpp"
#include "peaqc/fock.hpp"
#include "peaqc/metrics.hpp"

namespace peaqc {

/// maximize Tr(C X) subject to X ⪰ 0 and Tr_out X = I_in, X a Choi matrix (in, out).
struct SdpProblem {
  Mat cost;
  int in_dim;
  int out_dim;
};

struct SdpOptions {
  int max_iterations = 5000;
  double tol = 1e-7;
  double rho = 1.0;
  /// Throw NonConvergence instead of returning the polished last iterate.
  bool require_convergence = true;
};

struct SdpResult {
  ChoiMatrix choi;   ///< feasible: PSD, Tr_out = I
  double objective;  ///< Tr(C X)
  int iterations;
  double primal_residual;
  double dual_residual;
  bool converged;
  Mat raw;  ///< unpolished PSD iterate, usable as a warm start
};

/// Two-block ADMM on the affine set {Tr_out X = I} and the PSD cone.
SdpResult sdp_linear_step(const SdpProblem& prob, const SdpOptions& opt = {},
                          const Mat* warm = nullptr);

/// C_D with F(D ∘ Λ) = Tr(J_D C_D)/d² for a d → out channel Λ.
Mat decoder_cost(const KrausChannel& encoded);
/// C_E with F(D ∘ N ∘ E) = Tr(J_E C_E)/d² for fixed decoder D and channel N.
Mat encoder_cost(const KrausChannel& decoder, const KrausChannel& channel);

/// Choi of a Haar-random isometry d → code_dim.
ChoiMatrix random_encoding_init(int d, int code_dim, std::uint64_t seed);

struct AlternatingOptions {
  int rounds = 150;
  int restarts = 8;
  std::uint64_t seed = 0;
  int step_iterations = 150;  ///< ADMM cap per convex step
  double step_tol = 1e-7;
  int code_nmax = 20;
  int workers = 1;
};

struct OptimizationTrace {
  std::vector<double> fidelity;  ///< after each round
  int rounds;
  std::uint64_t seed;
  bool converged;  ///< last 10 rounds moved F by less than 1e-6
  int rejected_steps;
};

struct AlternatingResult {
  ChoiMatrix encoding;
  ChoiMatrix decoding;
  OptimizationTrace trace;
  int best_restart;
  std::vector<double> restart_fidelities;
};

/// Optimizes encoding and decoding Chois for a fixed channel from code space to output.
AlternatingResult alternate_optimize(const KrausChannel& channel, int d, const AlternatingOptions& opt);

/// The channel is the assisted channel for `env` on Fock levels 0..code_nmax.
KrausChannel optimizer_channel(const StateSpec& env, double theta, int code_nmax);
AlternatingResult alternate_optimize(const StateSpec& env, double theta, int d,
                                     const AlternatingOptions& opt);

struct SchemeEvaluation {
  double fidelity;
  double ic_undecoded;      ///< I_c(I/d) of N ∘ E
  double ic_decoded;        ///< I_c(I/d) of D ∘ N ∘ E
  double ic_undecoded_max;  ///< maximized over the logical input
  double ic_decoded_max;
};

SchemeEvaluation evaluate_scheme(const KrausChannel& channel, const ChoiMatrix& encoding,
                                 const ChoiMatrix& decoding, const CapacityOptions& cap = {});

}  // namespace peaqc
