#include "peaqc/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "peaqc/error.hpp"

namespace peaqc {

namespace {

struct Support {
  Mat inside;   ///< orthonormal basis of the support
  Mat outside;  ///< orthonormal basis of its complement
  RVec values;  ///< eigenvalues on `inside`
};

Support split_support(const Mat& h, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> es(la::hermitian_part(h));
  const auto& ev = es.eigenvalues();
  const double top = std::max(ev(ev.size() - 1), 0.0);
  int keep = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff * top) ++keep;
  const int n = static_cast<int>(ev.size());
  return {es.eigenvectors().rightCols(keep), es.eigenvectors().leftCols(n - keep), ev.tail(keep)};
}

void add_sink(std::vector<Mat>& ops, const Mat& outside, int d) {
  for (int j = 0; j < outside.cols(); ++j) {
    Mat r = Mat::Zero(d, outside.rows());
    r.row(0) = outside.col(j).adjoint();
    ops.push_back(std::move(r));
  }
}

}  // namespace

KrausChannel petz_decoder(const KrausChannel& ch, const DensityMatrix& sigma, bool complete, double cutoff) {
  const int d = ch.in_dim(), dout = ch.out_dim();
  if (sigma.dim() != d) throw DimensionMismatch("petz_decoder: reference state dimension");
  Eigen::SelfAdjointEigenSolver<Mat> se(sigma.matrix(), Eigen::EigenvaluesOnly);
  if (se.eigenvalues()(0) <= cutoff * se.eigenvalues()(d - 1))
    throw NotPositive("petz_decoder: reference state is rank deficient on the code space");
  Mat s_half = la::sqrt_psd(sigma.matrix());
  Mat out = ch.apply(sigma.matrix());
  Support sup = split_support(out, cutoff);
  Mat inv = sup.inside * sup.values.cwiseSqrt().cwiseInverse().asDiagonal() * sup.inside.adjoint();
  std::vector<Mat> ops;
  for (const auto& k : ch.ops()) ops.push_back(s_half * k.adjoint() * inv);
  if (complete) add_sink(ops, sup.outside, d);
  return KrausChannel(std::move(ops), dout, d);
}

KrausChannel petz_decoder(const KrausChannel& ch, bool complete) {
  return petz_decoder(ch, DensityMatrix::maximally_mixed(ch.in_dim()), complete);
}

KrausChannel comb_decoder(const CombSpec& spec) {
  auto coords = comb_coordinates(spec);
  const int dout = static_cast<int>(coords.size());
  std::vector<Mat> ops;
  for (int k = -(spec.d - 1); k <= spec.m - 1; ++k) {
    Mat r = Mat::Zero(spec.d, dout);
    for (const auto& c : coords) {
      if (c.k != k) continue;
      const cplx f = spec.f[k + c.mu];
      r(c.mu, c.index) = std::abs(f) > 0 ? std::conj(f) / std::abs(f) : cplx(1);
    }
    ops.push_back(std::move(r));
  }
  return KrausChannel(std::move(ops), dout, spec.d);
}

KrausChannel highfock_decoder(const HighFockLabels& l, bool complete) {
  const std::set<int> labels{l.empty, l.n - 2, l.n - 1, l.n, l.n + 1, l.n + 2};
  if (labels.size() != 6) throw CoordinateCollision("highfock_decoder: support labels coincide");
  if (*labels.begin() < 0 || *labels.rbegin() >= l.out_dim)
    throw DimensionMismatch("highfock_decoder: labels outside the output space");
  const double a = std::sqrt(1.0 / 3), b = std::sqrt(2.0 / 3);
  Mat r0 = Mat::Zero(2, l.out_dim), r1 = r0, r2 = r0;
  r0(0, l.empty) = a;
  r0(0, l.n) = b;
  r0(1, l.n + 2) = 1;
  r1(0, l.n - 1) = 1;
  r1(1, l.n + 1) = -1;
  r2(0, l.n - 2) = 1;
  r2(1, l.empty) = b;
  r2(1, l.n) = -a;
  std::vector<Mat> ops{r0, r1, r2};
  if (complete) {
    Mat outside = Mat::Zero(l.out_dim, l.out_dim - 6);
    int c = 0;
    for (int i = 0; i < l.out_dim; ++i)
      if (!labels.count(i)) outside(i, c++) = 1;
    add_sink(ops, outside, 2);
  }
  return KrausChannel(std::move(ops), l.out_dim, 2);
}

KrausChannel optimal_decoder(const KrausChannel& ch, const SdpOptions& opt) {
  const int d = ch.in_dim();
  Mat out = Mat::Zero(ch.out_dim(), ch.out_dim());
  for (const auto& k : ch.ops()) out.noalias() += k * k.adjoint();
  Support sup = split_support(out, 1e-13);
  std::vector<Mat> small;
  for (const auto& k : ch.ops()) small.push_back(sup.inside.adjoint() * k);
  KrausChannel compressed(std::move(small), d, static_cast<int>(sup.inside.cols()));
  auto res = sdp_linear_step({decoder_cost(compressed), compressed.out_dim(), d}, opt);
  std::vector<Mat> ops;
  const KrausChannel small_dec = choi_to_kraus(res.choi);
  for (const auto& r : small_dec.ops()) ops.push_back(r * sup.inside.adjoint());
  add_sink(ops, sup.outside, d);
  return KrausChannel(std::move(ops), ch.out_dim(), d);
}

}  // namespace peaqc
