#pragma once

#include <utility>
#include <vector>

#include "peaqc/fock.hpp"
#include "peaqc/linalg.hpp"

namespace peaqc {

/// Unit-trace Hermitian PSD matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat m);
  static DensityMatrix maximally_mixed(int d);
  static DensityMatrix pure(const Vec& psi);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Mat m_;
};

/// Choi index convention: J = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|), row (i, a) -> i * out_dim + a.
enum class ChoiOrdering { InputMajor };

class ChoiMatrix {
 public:
  ChoiMatrix(Mat m, int in_dim, int out_dim);

  const Mat& matrix() const { return m_; }
  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  ChoiOrdering ordering() const { return ChoiOrdering::InputMajor; }

  double min_eigenvalue() const;
  /// Tr_out J, which is the identity for trace-preserving maps.
  Mat partial_trace_out() const;

 private:
  Mat m_;
  int in_, out_;
};

class KrausChannel {
 public:
  KrausChannel(std::vector<Mat> ops, int in_dim, int out_dim);

  const std::vector<Mat>& ops() const { return ops_; }
  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  int size() const { return static_cast<int>(ops_.size()); }

  /// Σ K†K.
  Mat gram() const;
  /// Largest |eigenvalue| of Σ K†K − I.
  double trace_deviation() const;
  /// Largest eigenvalue of Σ K†K − I, clipped at zero.
  double trace_excess() const;
  bool trace_preserving(double tol = 1e-8) const { return trace_deviation() < tol; }

  Mat apply(const Mat& rho) const;
  /// Complementary channel of the Stinespring isometry Σ_k K_k ⊗ |k⟩.
  KrausChannel complement() const;

 private:
  std::vector<Mat> ops_;
  int in_, out_;
};

struct ChannelPair {
  KrausChannel channel;
  KrausChannel complement;
};

KrausChannel identity_channel(int d);
KrausChannel unitary_channel(const Mat& u);

/// `second ∘ first`, reduced to a minimal Kraus set when the direct product is larger.
KrausChannel compose(const KrausChannel& first, const KrausChannel& second);

/// Restricts the output space to the support of Λ(I); entropies and fidelities are unchanged.
KrausChannel compress_output(const KrausChannel& ch, double rel_tol = 1e-13);

/// E_σ(ρ) = Tr_E[U_θ(ρ⊗σ)U_θ†] on the given input basis.  Kraus operators are indexed by
/// environment photon number and cut once the retained weight reaches 1 − cutoff.
KrausChannel env_assisted_channel(const FockKet& env, double theta, const TruncatedBasis& input,
                                  double cutoff = 1e-8);
KrausChannel env_assisted_channel(const DensityMatrix& env, double theta,
                                  const TruncatedBasis& input, double cutoff = 1e-8);
KrausChannel complementary_channel(const FockKet& env, double theta, const TruncatedBasis& input,
                                   double cutoff = 1e-8);
KrausChannel complementary_channel(const DensityMatrix& env, double theta,
                                   const TruncatedBasis& input, double cutoff = 1e-8);

/// The assisted channel precomposed with the linear map whose columns are `code`
/// (Fock amplitudes of the codewords).  Never materializes the full input basis.
KrausChannel encoded_env_assisted_channel(const Vec& env, double theta, const Mat& code,
                                          double cutoff = 1e-8);

/// Single Kraus C = |α⟩⟨0_L| + |−α⟩⟨1_L|.
KrausChannel cat_encoding(double alpha, const TruncatedBasis& basis);

ChoiMatrix kraus_to_choi(const KrausChannel& ch);
KrausChannel choi_to_kraus(const ChoiMatrix& j, double cutoff = 1e-12);

struct GramIsometry {
  Mat v;        ///< columns orthonormal
  int rank;
  int dropped;  ///< Gram directions below the cutoff
};

/// Löwdin orthonormalization A(A†A)^{-1/2}; rank-deficient input keeps only the
/// retained eigen-directions.
GramIsometry gram_isometry(const Mat& columns, double cutoff = 1e-10);
GramIsometry gram_isometry(const std::vector<FockKet>& kets, double cutoff = 1e-10);

/// ⟨a|b⟩ for coherent states.
cplx coherent_overlap(cplx a, cplx b);

/// One term w |a⟩_S |b⟩_E of a coherent-state dilation.
struct CoherentTerm {
  cplx weight;
  cplx system;
  cplx env;
};

/// Exact channel pair for dilations in which input μ maps to Σ_j w |a⟩|b⟩.  Both outputs
/// are expressed in orthonormal coordinates of the spans of the coherent states.
ChannelPair coherent_dilation(const std::vector<std::vector<CoherentTerm>>& branches,
                              double cutoff = 1e-10);

/// Cat encoding |±α⟩ with even-cat environment β through U_θ.
ChannelPair compressed_cat_channel(double alpha, double beta, double theta);
std::pair<ChoiMatrix, ChoiMatrix> compressed_cat_choi(double alpha, double beta, double theta);

/// Codewords |μ s_code⟩, μ < d, and environment Σ_j f_j |j s_env⟩ (renormalized).
struct CoherentComb {
  int d;
  double code_spacing;
  std::vector<cplx> f;
  double env_spacing;
};

ChannelPair compressed_comb_channel(const CoherentComb& comb, double theta);
std::pair<ChoiMatrix, ChoiMatrix> compressed_comb_choi(const CoherentComb& comb, double theta);

/// θ with cos²θ = η.
double theta_from_eta(double eta);

}  // namespace peaqc
