#pragma once

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "peaqc/lattice.hpp"
#include "peaqc/linalg.hpp"

namespace peaqc {

class TruncatedBasis {
 public:
  explicit TruncatedBasis(int n_max);
  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }
  bool operator==(const TruncatedBasis&) const = default;

 private:
  int n_max_;
};

/// Normalized ket over a truncated photon-number basis.
class FockKet {
 public:
  /// Normalizes the amplitudes; `leakage` is the norm lost to truncation upstream.
  FockKet(Vec amplitudes, TruncatedBasis basis, double leakage = 0.0);
  static FockKet number(int n, TruncatedBasis basis);

  const Vec& amplitudes() const { return amps_; }
  const TruncatedBasis& basis() const { return basis_; }
  double leakage() const { return leakage_; }
  cplx operator[](int n) const { return amps_(n); }
  cplx inner(const FockKet& other) const;

 private:
  Vec amps_;
  TruncatedBasis basis_;
  double leakage_;
};

class FockOperator {
 public:
  FockOperator(Mat matrix, TruncatedBasis out, TruncatedBasis in);
  FockOperator(Mat matrix, TruncatedBasis basis) : FockOperator(std::move(matrix), basis, basis) {}

  const Mat& matrix() const { return m_; }
  const TruncatedBasis& out_basis() const { return out_; }
  const TruncatedBasis& in_basis() const { return in_; }

  FockOperator operator*(const FockOperator& rhs) const;
  FockOperator adjoint() const;
  FockKet operator*(const FockKet& ket) const;

  /// max |(U†U − I)_ij| over the leading `retained` columns.
  double unitarity_defect(int retained) const;

 private:
  Mat m_;
  TruncatedBasis out_;
  TruncatedBasis in_;
};

struct ModeOperators {
  FockOperator a;
  FockOperator adag;
  FockOperator x;
  FockOperator p;
};

ModeOperators mode_operators(const TruncatedBasis& basis);

/// D(α) = exp(α a† − α* a) on the truncated space.
FockOperator displacement(cplx alpha, const TruncatedBasis& basis);

/// S(r) = exp((r/2)(a² − a†²)).
FockOperator squeeze(double r, const TruncatedBasis& basis);

/// R(φ) = exp(−iφ n).
FockOperator rotation(double phi, const TruncatedBasis& basis);

/// Two-mode beam splitter U_θ with U a₁† U† = cosθ a₁† − sinθ a₂†, stored as
/// exactly unitary blocks on each total-photon-number sector.
class BeamSplitter {
 public:
  BeamSplitter(double theta, int max_total);

  double theta() const { return theta_; }
  double eta() const;
  int max_total() const { return static_cast<int>(blocks_.size()) - 1; }
  /// Sector N block; row/column j is |j, N−j⟩.
  const RMat& sector(int n) const { return blocks_.at(n); }

  /// Applies U to a two-mode amplitude grid psi(n1, n2) and truncates back to the grid.
  Mat apply(const Mat& psi) const;

  /// Box-truncated matrix with index (n1, n2) -> n1 * dim2 + n2.
  Mat dense(const TruncatedBasis& b1, const TruncatedBasis& b2) const;

 private:
  double theta_;
  std::vector<RMat> blocks_;
};

BeamSplitter beam_splitter(double theta, const TruncatedBasis& b1, const TruncatedBasis& b2);

/// Calls visit(m1, column) for m1 = 0..m1_max, where column holds U_θ|m1, m2⟩ on
/// sector m1 + m2 indexed by mode-1 photons.  Built by raising-operator recursion,
/// which is exact and needs no matrix exponential.
void for_each_beam_splitter_column(double theta, int m1_max, int m2,
                                   const std::function<void(int, const RVec&)>& visit);

/// ⟨n|D(β) R(φ) S(r)|0⟩ for n = 0..n_max, by the three-term annihilator recurrence.
Vec gaussian_amplitudes(cplx beta, double r, double phi, int n_max);

// State descriptions.
struct Vacuum {};
struct Fock {
  int n;
};
struct Coherent {
  cplx alpha;
};
struct Cat {
  double alpha;
  int parity = 0;  ///< 0 even, 1 odd
};
struct SqueezedCat {
  double alpha;
  double r;
};
/// Σ_j f_j D(j·spacing) S(r)|0⟩, renormalized.
struct Comb {
  std::vector<cplx> f;
  double spacing;
  double r = 0.0;
};
/// Finite-energy GKP codeword |logical⟩ with envelope Δ.
struct ApproxGkp {
  LatticeKind lattice = LatticeKind::Square;
  double delta = 0.3;
  int logical = 0;
};
/// Σ c_n |n⟩, renormalized.
struct FockSuperposition {
  std::vector<std::pair<int, cplx>> terms;
};

using StateSpec =
    std::variant<Vacuum, Fock, Coherent, Cat, SqueezedCat, Comb, ApproxGkp, FockSuperposition>;

/// Smallest n_max with leakage below tol, and at least the Poisson-tail rule.
int suggest_nmax(const StateSpec& spec, double tol = 1e-10);

/// Builds the ket; throws TruncationTooSmall when leakage exceeds 1e-8.
FockKet make_state(const StateSpec& spec, const TruncatedBasis& basis);

/// Single-mode Gaussian unitary G with G† a G = u a + v a† + γ.
struct GaussianParams {
  cplx u{1.0, 0.0};
  cplx v{0.0, 0.0};
  cplx gamma{0.0, 0.0};
};

FockOperator gaussian_unitary(const GaussianParams& g, const TruncatedBasis& basis);

/// max |((G₁′⊗G₂′)† U_θ (G₁⊗G₂) − U_θ)|ψ⟩| over low-photon inputs |m1, m2⟩, m1, m2 ≤ 2.
double gaussian_conjugation_check(const GaussianParams& g1, const GaussianParams& g2,
                                  const GaussianParams& g1p, const GaussianParams& g2p,
                                  double theta, int n_max = 40);

}  // namespace peaqc
