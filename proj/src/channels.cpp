#include "peaqc/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peaqc/error.hpp"

namespace peaqc {

DensityMatrix::DensityMatrix(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionMismatch("DensityMatrix: not square");
  if (la::max_abs(m_ - m_.adjoint()) > 1e-10) throw NotPositive("DensityMatrix: not Hermitian");
  m_ = la::hermitian_part(m_);
  if (std::abs(m_.trace().real() - 1) > 1e-10) throw NotPositive("DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-10) throw NotPositive("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  return DensityMatrix(Mat::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure(const Vec& psi) {
  Vec v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint());
}

ChoiMatrix::ChoiMatrix(Mat m, int in_dim, int out_dim) : m_(std::move(m)), in_(in_dim), out_(out_dim) {
  if (m_.rows() != in_ * out_ || m_.cols() != in_ * out_)
    throw DimensionMismatch("ChoiMatrix: shape does not match in_dim * out_dim");
  const double scale = std::max(1.0, la::max_abs(m_));
  if (la::max_abs(m_ - m_.adjoint()) > 1e-10 * scale) throw NotPositive("ChoiMatrix: not Hermitian");
  m_ = la::hermitian_part(m_);
}

double ChoiMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Mat ChoiMatrix::partial_trace_out() const { return la::ptrace_second(m_, in_, out_); }

KrausChannel::KrausChannel(std::vector<Mat> ops, int in_dim, int out_dim)
    : ops_(std::move(ops)), in_(in_dim), out_(out_dim) {
  if (ops_.empty()) throw InvalidSpec("KrausChannel: no Kraus operators");
  for (const auto& k : ops_)
    if (k.rows() != out_ || k.cols() != in_)
      throw DimensionMismatch("KrausChannel: Kraus operator shape mismatch");
}

Mat KrausChannel::gram() const {
  Mat g = Mat::Zero(in_, in_);
  for (const auto& k : ops_) g.noalias() += k.adjoint() * k;
  return g;
}

double KrausChannel::trace_deviation() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(la::hermitian_part(gram()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0) - 1), std::abs(ev(ev.size() - 1) - 1));
}

double KrausChannel::trace_excess() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(la::hermitian_part(gram()), Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(in_ - 1) - 1);
}

Mat KrausChannel::apply(const Mat& rho) const {
  if (rho.rows() != in_ || rho.cols() != in_) throw DimensionMismatch("KrausChannel::apply");
  Mat out = Mat::Zero(out_, out_);
  for (const auto& k : ops_) out.noalias() += k * rho * k.adjoint();
  return out;
}

KrausChannel KrausChannel::complement() const {
  const int nk = size();
  std::vector<Mat> c(out_, Mat::Zero(nk, in_));
  for (int k = 0; k < nk; ++k)
    for (int a = 0; a < out_; ++a) c[a].row(k) = ops_[k].row(a);
  return KrausChannel(std::move(c), in_, nk);
}

KrausChannel identity_channel(int d) { return KrausChannel({Mat::Identity(d, d)}, d, d); }

KrausChannel unitary_channel(const Mat& u) {
  return KrausChannel({u}, static_cast<int>(u.cols()), static_cast<int>(u.rows()));
}

KrausChannel compose(const KrausChannel& first, const KrausChannel& second) {
  if (first.out_dim() != second.in_dim()) throw DimensionMismatch("compose: dimension mismatch");
  const int din = first.in_dim(), dout = second.out_dim();
  const long direct = static_cast<long>(first.size()) * second.size();
  if (direct <= static_cast<long>(din) * dout) {
    std::vector<Mat> ops;
    ops.reserve(direct);
    for (const auto& r : second.ops())
      for (const auto& k : first.ops()) ops.push_back(r * k);
    return KrausChannel(std::move(ops), din, dout);
  }
  Mat stacked(first.out_dim(), static_cast<long>(din) * first.size());
  for (int k = 0; k < first.size(); ++k) stacked.middleCols(k * din, din) = first.ops()[k];
  Mat j = Mat::Zero(din * dout, din * dout);
  Mat z(din * dout, first.size());
  for (const auto& r : second.ops()) {
    Mat y = r * stacked;
    for (int k = 0; k < first.size(); ++k)
      for (int i = 0; i < din; ++i)
        for (int a = 0; a < dout; ++a) z(i * dout + a, k) = y(a, k * din + i);
    j.noalias() += z * z.adjoint();
  }
  return choi_to_kraus(ChoiMatrix(j, din, dout));
}

KrausChannel compress_output(const KrausChannel& ch, double rel_tol) {
  Mat out = Mat::Zero(ch.out_dim(), ch.out_dim());
  for (const auto& k : ch.ops()) out.noalias() += k * k.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(la::hermitian_part(out));
  const auto& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  int keep = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * top) ++keep;
  Mat p = es.eigenvectors().rightCols(keep);
  std::vector<Mat> ops;
  ops.reserve(ch.size());
  for (const auto& k : ch.ops()) ops.push_back(p.adjoint() * k);
  return KrausChannel(std::move(ops), ch.in_dim(), keep);
}

double theta_from_eta(double eta) {
  if (!(eta >= 0 && eta <= 1)) throw InvalidSpec("transmissivity must lie in [0, 1]");
  return std::acos(std::sqrt(eta));
}

KrausChannel encoded_env_assisted_channel(const Vec& env, double theta, const Mat& code, double cutoff) {
  if (!(theta >= 0 && theta <= kPi / 2 + 1e-15)) throw InvalidSpec("theta must lie in [0, pi/2]");
  if (env.size() < 1 || code.rows() < 1 || code.cols() < 1)
    throw DimensionMismatch("encoded_env_assisted_channel: empty input");
  if (!(cutoff >= 0 && cutoff < 1)) throw InvalidSpec("Kraus cutoff must lie in [0, 1)");
  const int n_in = static_cast<int>(code.rows()) - 1;
  const int n_env = static_cast<int>(env.size()) - 1;
  const int n_out = n_in + n_env;
  const int d = static_cast<int>(code.cols());
  std::vector<Mat> ops(n_out + 1, Mat::Zero(n_out + 1, d));
  std::vector<bool> live(n_in + 1);
  for (int m = 0; m <= n_in; ++m) live[m] = code.row(m).squaredNorm() > 0;
  for (int m2 = 0; m2 <= n_env; ++m2) {
    const cplx e = env(m2);
    if (e == cplx(0)) continue;
    for_each_beam_splitter_column(theta, n_in, m2, [&](int m1, const RVec& col) {
      if (!live[m1]) return;
      const int n = m1 + m2;
      for (int j = 0; j <= n; ++j) {
        const cplx amp = e * col(j);
        if (amp == cplx(0)) continue;
        ops[n - j].row(j) += amp * code.row(m1);
      }
    });
  }
  std::vector<double> w(ops.size());
  double total = 0;
  for (size_t k = 0; k < ops.size(); ++k) total += (w[k] = ops[k].squaredNorm());
  size_t keep = 0;
  double acc = 0;
  while (keep < ops.size() && acc < (1 - cutoff) * total) acc += w[keep++];
  keep = std::max<size_t>(keep, 1);
  if (total - acc > 1e-4 * total) throw TruncationTooSmall("Kraus cutoff discards too much weight");
  ops.resize(keep);
  return KrausChannel(std::move(ops), d, n_out + 1);
}

KrausChannel env_assisted_channel(const FockKet& env, double theta, const TruncatedBasis& input,
                                  double cutoff) {
  return encoded_env_assisted_channel(env.amplitudes(), theta,
                                      Mat::Identity(input.dim(), input.dim()), cutoff);
}

KrausChannel env_assisted_channel(const DensityMatrix& env, double theta,
                                  const TruncatedBasis& input, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> es(env.matrix());
  std::vector<Mat> ops;
  int out = 0;
  for (int i = static_cast<int>(env.dim()) - 1; i >= 0; --i) {
    const double p = es.eigenvalues()(i);
    if (p <= 1e-12) continue;
    KrausChannel part = encoded_env_assisted_channel(
        es.eigenvectors().col(i), theta, Mat::Identity(input.dim(), input.dim()), cutoff);
    out = part.out_dim();
    for (const auto& k : part.ops()) ops.push_back(std::sqrt(p) * k);
  }
  return KrausChannel(std::move(ops), input.dim(), out);
}

KrausChannel complementary_channel(const FockKet& env, double theta, const TruncatedBasis& input,
                                   double cutoff) {
  return env_assisted_channel(env, theta, input, cutoff).complement();
}

KrausChannel complementary_channel(const DensityMatrix& env, double theta,
                                   const TruncatedBasis& input, double cutoff) {
  return env_assisted_channel(env, theta, input, cutoff).complement();
}

KrausChannel cat_encoding(double alpha, const TruncatedBasis& basis) {
  if (!(alpha > 0)) throw InvalidSpec("cat encoding needs alpha > 0");
  Mat c(basis.dim(), 2);
  c.col(0) = make_state(Coherent{alpha}, basis).amplitudes();
  c.col(1) = make_state(Coherent{-alpha}, basis).amplitudes();
  return KrausChannel({c}, 2, basis.dim());
}

ChoiMatrix kraus_to_choi(const KrausChannel& ch) {
  const int din = ch.in_dim(), dout = ch.out_dim();
  Mat z(din * dout, ch.size());
  for (int k = 0; k < ch.size(); ++k)
    for (int i = 0; i < din; ++i)
      for (int a = 0; a < dout; ++a) z(i * dout + a, k) = ch.ops()[k](a, i);
  return ChoiMatrix(z * z.adjoint(), din, dout);
}

KrausChannel choi_to_kraus(const ChoiMatrix& j, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> es(j.matrix());
  const auto& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  if (ev(0) < -1e-9 * std::max(1.0, top)) throw NotPositive("choi_to_kraus: Choi matrix is not PSD");
  const int din = j.in_dim(), dout = j.out_dim();
  std::vector<Mat> ops;
  for (int e = static_cast<int>(ev.size()) - 1; e >= 0; --e) {
    if (ev(e) <= cutoff) break;
    Mat k(dout, din);
    const double s = std::sqrt(ev(e));
    for (int i = 0; i < din; ++i)
      for (int a = 0; a < dout; ++a) k(a, i) = s * es.eigenvectors()(i * dout + a, e);
    ops.push_back(std::move(k));
  }
  if (ops.empty()) ops.push_back(Mat::Zero(dout, din));
  return KrausChannel(std::move(ops), din, dout);
}

GramIsometry gram_isometry(const Mat& a, double cutoff) {
  if (a.cols() < 1) throw InvalidSpec("gram_isometry: no vectors");
  Mat g = la::hermitian_part(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const auto& ev = es.eigenvalues();
  int dropped = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) <= cutoff) ++dropped;
  const int rank = static_cast<int>(ev.size()) - dropped;
  if (dropped == 0) return {a * la::inv_sqrt_psd(g, cutoff), rank, 0};
  RVec inv = ev.tail(rank).cwiseSqrt().cwiseInverse();
  return {a * es.eigenvectors().rightCols(rank) * inv.asDiagonal(), rank, dropped};
}

GramIsometry gram_isometry(const std::vector<FockKet>& kets, double cutoff) {
  if (kets.empty()) throw InvalidSpec("gram_isometry: no kets");
  Mat a(kets[0].basis().dim(), static_cast<long>(kets.size()));
  for (size_t i = 0; i < kets.size(); ++i) {
    if (!(kets[i].basis() == kets[0].basis())) throw DimensionMismatch("gram_isometry: basis mismatch");
    a.col(static_cast<long>(i)) = kets[i].amplitudes();
  }
  return gram_isometry(a, cutoff);
}

cplx coherent_overlap(cplx a, cplx b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

namespace {

// Rows: orthonormal coordinates of each coherent state in the span of all of them.
Mat span_coordinates(const std::vector<cplx>& amps, double cutoff) {
  const int n = static_cast<int>(amps.size());
  Mat g(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) g(p, q) = coherent_overlap(amps[p], amps[q]);
  Eigen::SelfAdjointEigenSolver<Mat> es(la::hermitian_part(g));
  const auto& ev = es.eigenvalues();
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (ev(i) > cutoff) ++rank;
  RVec s = ev.tail(rank).cwiseSqrt();
  return s.asDiagonal() * es.eigenvectors().rightCols(rank).adjoint();
}

}  // namespace

ChannelPair coherent_dilation(const std::vector<std::vector<CoherentTerm>>& branches, double cutoff) {
  const int d = static_cast<int>(branches.size());
  if (d < 1) throw InvalidSpec("coherent_dilation: no input branches");
  std::vector<cplx> sa, sb;
  std::vector<std::pair<int, cplx>> owner;
  for (int mu = 0; mu < d; ++mu)
    for (const auto& t : branches[mu]) {
      sa.push_back(t.system);
      sb.push_back(t.env);
      owner.emplace_back(mu, t.weight);
    }
  if (sa.empty()) throw InvalidSpec("coherent_dilation: no terms");
  Mat ga = span_coordinates(sa, cutoff);
  Mat gb = span_coordinates(sb, cutoff);
  const int ra = static_cast<int>(ga.rows()), rb = static_cast<int>(gb.rows());
  std::vector<Mat> ops(rb, Mat::Zero(ra, d));
  for (size_t p = 0; p < owner.size(); ++p) {
    const auto [mu, w] = owner[p];
    for (int k = 0; k < rb; ++k) ops[k].col(mu) += w * gb(k, static_cast<long>(p)) * ga.col(static_cast<long>(p));
  }
  KrausChannel ch(std::move(ops), d, ra);
  KrausChannel comp = ch.complement();
  return {std::move(ch), std::move(comp)};
}

ChannelPair compressed_cat_channel(double alpha, double beta, double theta) {
  if (!(alpha > 0 && beta > 0)) throw InvalidSpec("compressed cat needs alpha, beta > 0");
  if (!(theta > 0 && theta < kPi / 2)) throw InvalidSpec("compressed cat needs theta in (0, pi/2)");
  const double c = std::cos(theta), s = std::sin(theta);
  const double norm = 1 / std::sqrt(2 * (1 + std::exp(-2 * beta * beta)));
  std::vector<std::vector<CoherentTerm>> br(2);
  for (int mu = 0; mu < 2; ++mu) {
    const double enc = mu == 0 ? alpha : -alpha;
    for (double env : {beta, -beta}) br[mu].push_back({norm, c * enc + s * env, -s * enc + c * env});
  }
  return coherent_dilation(br);
}

std::pair<ChoiMatrix, ChoiMatrix> compressed_cat_choi(double alpha, double beta, double theta) {
  auto pr = compressed_cat_channel(alpha, beta, theta);
  return {kraus_to_choi(pr.channel), kraus_to_choi(pr.complement)};
}

ChannelPair compressed_comb_channel(const CoherentComb& comb, double theta) {
  if (comb.d < 2) throw InvalidSpec("comb needs d >= 2");
  if (comb.f.empty()) throw InvalidSpec("comb needs at least one amplitude");
  double n2 = 0;
  for (auto v : comb.f) n2 += std::norm(v);
  if (std::abs(n2 - 1) > 1e-9) throw InvalidSpec("comb amplitudes must be normalized");
  if (!(theta >= 0 && theta <= kPi / 2)) throw InvalidSpec("theta must lie in [0, pi/2]");
  const int m = static_cast<int>(comb.f.size());
  cplx norm = 0;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      norm += std::conj(comb.f[j]) * comb.f[k] *
              coherent_overlap(j * comb.env_spacing, k * comb.env_spacing);
  const double nf = 1 / std::sqrt(norm.real());
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<std::vector<CoherentTerm>> br(comb.d);
  for (int mu = 0; mu < comb.d; ++mu) {
    const double enc = mu * comb.code_spacing;
    for (int j = 0; j < m; ++j) {
      if (comb.f[j] == cplx(0)) continue;
      const double env = j * comb.env_spacing;
      br[mu].push_back({nf * comb.f[j], c * enc + s * env, -s * enc + c * env});
    }
  }
  return coherent_dilation(br);
}

std::pair<ChoiMatrix, ChoiMatrix> compressed_comb_choi(const CoherentComb& comb, double theta) {
  auto pr = compressed_comb_channel(comb, theta);
  return {kraus_to_choi(pr.channel), kraus_to_choi(pr.complement)};
}

}  // namespace peaqc
