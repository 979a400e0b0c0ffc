#pragma once

#include <vector>

#include "peaqc/channels.hpp"
#include "peaqc/linalg.hpp"

namespace peaqc {

/// Comb environment Σ_j f_j |j⟩ with d logical levels, m teeth and beam-splitter angle δ.
struct CombSpec {
  int d;
  int m;
  double delta;
  std::vector<cplx> f;
};

/// Throws InvalidSpec on bad d, m, δ or unnormalized f.  m ≥ d is not required.
void validate(const CombSpec& spec);

/// ξ(μ, k; δ) = μ cscδ + k cotδ cosδ.
double xi(int mu, int k, double delta);

struct CombCoordinate {
  int mu;
  int k;
  double xi;
  int index;  ///< row of this coordinate in the ideal output basis
};

/// All pairs with 0 ≤ k + μ ≤ m − 1, indexed k-major.  CoordinateCollision when two ξ agree
/// within 1e-9.
std::vector<CombCoordinate> comb_coordinates(const CombSpec& spec);

/// L_k = Σ_μ f_{k+μ} |ξ(μ,k)⟩⟨μ| for k = −(d−1) … m−1, on the labeled orthonormal coordinates.
KrausChannel ideal_kraus(const CombSpec& spec);

/// (1/d²) Σ_k (Σ_μ |f_{k+μ}|)².
double fidelity_quadratic_form(int d, const std::vector<cplx>& f);

/// T_ij = max(0, d − |i − j|).
RMat toeplitz_matrix(int d, int m);

struct ToeplitzMax {
  double lambda;
  RVec vector;  ///< unit norm, non-negative
};

ToeplitzMax toeplitz_max(int d, int m);

/// |f_j| = √(2/(m+1)) sin((j+1)π/(m+1)).
std::vector<cplx> optimal_f_d2(int m);

struct CapacityBound {
  RMat kappa;  ///< κ_ij = (1/d) Σ_k |f_{k+i} f_{k+j}|
  double value;  ///< log₂d − S(κ)
};

CapacityBound capacity_bound(int d, const std::vector<cplx>& f);

struct ClosedFormReport {
  int d;
  int m;
  double fidelity;
  double lambda_max;
  std::vector<cplx> f;
  double ic_bound;
  RMat kappa;
};

/// Optimal comb for (d, m): top Toeplitz eigenvector, its fidelity and capacity bound.
ClosedFormReport closed_form_report(int d, int m);

/// Coherent-comb realization at squeezing r: code spacing e^r/√2, environment spacing
/// e^r cotδ/√2.
CoherentComb finite_r_comb(const CombSpec& spec, double r);
ChannelPair finite_r_channel(const CombSpec& spec, double r, double theta);

struct FiniteRPoint {
  double delta;
  double eta;
  double ic_mixed;  ///< I_c(I/d)
  double q1;        ///< maximized over the logical input
};

/// One point per (δ, η); `with_q1 = false` skips the input maximization.
std::vector<FiniteRPoint> finite_r_scan(const CombSpec& spec, double r,
                                        const std::vector<double>& deltas,
                                        const std::vector<double>& etas, bool with_q1 = true,
                                        int workers = 1);

}  // namespace peaqc
