#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "peaqc/channels.hpp"
#include "peaqc/error.hpp"
#include "peaqc/metrics.hpp"

using namespace peaqc;

namespace {

double binom(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

Mat basis_op(int d, int i, int j) {
  Mat m = Mat::Zero(d, d);
  m(i, j) = 1;
  return m;
}

KrausChannel random_channel(int din, int dout, int nk, unsigned seed) {
  std::mt19937_64 rng(seed);
  Mat v = la::haar_isometry(dout * nk, din, rng);
  std::vector<Mat> ops;
  for (int k = 0; k < nk; ++k) ops.push_back(v.middleRows(k * dout, dout));
  return KrausChannel(ops, din, dout);
}

// Output of the two-mode product state through the dense box beam splitter, env traced out.
Mat brute_force_output(const Mat& rho_in, const Vec& env, double theta, int box) {
  TruncatedBasis b(box);
  const int d = b.dim();
  Mat u = beam_splitter(theta, b, b).dense(b, b);
  Mat r1 = Mat::Zero(d, d);
  r1.topLeftCorner(rho_in.rows(), rho_in.cols()) = rho_in;
  Vec e = Vec::Zero(d);
  e.head(env.size()) = env;
  Mat joint = u * la::kron(r1, e * e.adjoint()) * u.adjoint();
  return la::ptrace_second(joint, d, d);
}

}  // namespace

TEST_CASE("vacuum environment gives the analytic pure-loss channel") {
  const double eta = 0.6;
  TruncatedBasis in(15);
  FockKet vac = make_state(Vacuum{}, TruncatedBasis(1));
  auto ch = env_assisted_channel(vac, theta_from_eta(eta), in);
  double worst = 0;
  for (int k = 0; k < ch.size(); ++k) {
    Mat ref = Mat::Zero(ch.out_dim(), in.dim());
    for (int n = k; n < in.dim(); ++n)
      ref(n - k, n) = std::sqrt(binom(n, k) * std::pow(eta, n - k) * std::pow(1 - eta, k)) * (k % 2 ? -1.0 : 1.0);
    worst = std::max(worst, la::max_abs(ch.ops()[k] - ref));
  }
  CHECK(ch.size() == in.dim());
  CHECK(worst < 1e-9);
  CHECK(ch.trace_deviation() < 1e-8);
}

TEST_CASE("zero angle leaves the system untouched") {
  TruncatedBasis in(5);
  auto ch = env_assisted_channel(make_state(Vacuum{}, TruncatedBasis(1)), 0.0, in);
  REQUIRE(ch.size() == 1);
  CHECK(la::max_abs(ch.ops()[0].topRows(in.dim()) - Mat::Identity(in.dim(), in.dim())) < 1e-15);
  CHECK(la::max_abs(ch.ops()[0].bottomRows(ch.out_dim() - in.dim())) == 0.0);
}

TEST_CASE("Fock environment matches a brute-force partial trace") {
  const double theta = theta_from_eta(0.3);
  TruncatedBasis in(1);
  FockKet env = FockKet::number(1, TruncatedBasis(1));
  auto ch = env_assisted_channel(env, theta, in);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat rho = basis_op(2, i, j);
      Mat ref = brute_force_output(rho, env.amplitudes(), theta, 3);
      Mat got = ch.apply(rho);
      CHECK(la::max_abs(ref.topLeftCorner(got.rows(), got.cols()) - got) < 1e-12);
    }
}

TEST_CASE("mixed environment matches a brute-force partial trace") {
  const double theta = 0.8;
  TruncatedBasis in(2);
  Mat sigma = Mat::Zero(3, 3);
  sigma(0, 0) = 0.5;
  sigma(2, 2) = 0.3;
  sigma(1, 1) = 0.2;
  sigma(0, 2) = sigma(2, 0) = 0.1;
  auto ch = env_assisted_channel(DensityMatrix(sigma), theta, in);
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  Mat rho = Mat::Zero(3, 3);
  rho(0, 0) = 0.4;
  rho(2, 2) = 0.6;
  rho(0, 2) = 0.3;
  rho(2, 0) = 0.3;
  Mat ref = Mat::Zero(5, 5);
  for (int i = 0; i < 3; ++i) {
    Mat part = brute_force_output(rho, es.eigenvectors().col(i), theta, 4);
    ref += es.eigenvalues()(i) * part.topLeftCorner(5, 5);
  }
  CHECK(la::max_abs(ref - ch.apply(rho)) < 1e-12);
}

TEST_CASE("complementary channel") {
  TruncatedBasis in(4);
  FockKet vac = make_state(Vacuum{}, TruncatedBasis(1));

  auto swap_comp = complementary_channel(vac, kPi / 2, in);
  Mat rho = Mat::Zero(5, 5);
  rho(1, 1) = 0.25;
  rho(3, 3) = 0.75;
  Mat out = swap_comp.apply(rho);
  CHECK(la::max_abs(out.topLeftCorner(5, 5) - rho) < 1e-14);

  const double eta = 0.35;
  auto comp = complementary_channel(vac, theta_from_eta(eta), in);
  auto flipped = env_assisted_channel(vac, theta_from_eta(1 - eta), in);
  Mat parity = Mat::Zero(5, 5);
  for (int n = 0; n < 5; ++n) parity(n, n) = n % 2 ? -1.0 : 1.0;
  std::mt19937_64 rng(3);
  Vec psi = la::haar_isometry(5, 1, rng).col(0);
  Mat r = psi * psi.adjoint();
  Mat a = comp.apply(r), b = flipped.apply(parity * r * parity);
  CHECK(la::max_abs(b.topLeftCorner(a.rows(), a.cols()) - a) < 1e-12);
  CHECK(la::max_abs(b.bottomRightCorner(b.rows() - a.rows(), b.cols() - a.cols())) < 1e-14);

  FockKet one = FockKet::number(1, TruncatedBasis(1));
  auto ch = env_assisted_channel(one, 0.9, in);
  auto cc = complementary_channel(one, 0.9, in);
  DensityMatrix rr(r);
  const double direct = la::entropy(ch.apply(r)) - la::entropy(cc.apply(r));
  CHECK(std::abs(direct - coherent_information(rr, ch)) < 1e-10);
  CHECK(std::abs(direct - coherent_information(rr, ch, cc)) < 1e-10);
}

TEST_CASE("cat encoding") {
  const double alpha = 1.1;
  TruncatedBasis b(40);
  auto c = cat_encoding(alpha, b);
  Mat g = c.gram();
  CHECK(std::abs(g(0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(g(0, 1) - std::exp(-2 * alpha * alpha)) < 1e-10);
  CHECK(la::max_abs(cat_encoding(4.0, TruncatedBasis(60)).gram() - Mat::Identity(2, 2)) < 1e-10);

  Vec plus(2);
  plus << 1, 1;
  Vec enc = c.ops()[0] * plus;
  Vec cat = make_state(Cat{alpha}, b).amplitudes();
  CHECK(std::abs(std::abs(enc.normalized().dot(cat)) - 1) < 1e-12);
}

TEST_CASE("Choi conversions") {
  ChoiMatrix j = kraus_to_choi(identity_channel(2));
  Vec phi = Vec::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  CHECK(la::max_abs(j.matrix() - 2 * phi * phi.adjoint()) < 1e-15);

  auto ch = random_channel(3, 2, 3, 11);
  auto back = choi_to_kraus(kraus_to_choi(ch));
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      worst = std::max(worst, la::max_abs(ch.apply(basis_op(3, i, k)) - back.apply(basis_op(3, i, k))));
  CHECK(worst < 1e-9);
  CHECK(la::max_abs(kraus_to_choi(ch).partial_trace_out() - Mat::Identity(3, 3)) < 1e-12);

  Mat p0 = basis_op(2, 0, 0), p1 = basis_op(2, 1, 1);
  Mat jd = kraus_to_choi(KrausChannel({p0, p1}, 2, 2)).matrix();
  Mat off = jd;
  off.diagonal().setZero();
  CHECK(la::max_abs(off) == 0.0);

  Mat bad = -Mat::Identity(4, 4);
  CHECK_THROWS_AS(choi_to_kraus(ChoiMatrix(bad, 2, 2)), NotPositive);
}

TEST_CASE("composition through the Choi route matches the direct product") {
  auto a = random_channel(2, 5, 6, 1);
  auto b = random_channel(5, 2, 4, 2);
  auto c = compose(a, b);
  CHECK(c.size() <= 4);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      Mat x = basis_op(2, i, k);
      CHECK(la::max_abs(c.apply(x) - b.apply(a.apply(x))) < 1e-10);
    }
}

TEST_CASE("output compression preserves information quantities") {
  FockKet env = make_state(Cat{1.2}, TruncatedBasis(30));
  auto ch = env_assisted_channel(env, 1.0, TruncatedBasis(3));
  auto small = compress_output(ch);
  CHECK(small.out_dim() <= ch.out_dim());
  DensityMatrix rho = DensityMatrix::maximally_mixed(4);
  CHECK(std::abs(coherent_information(rho, ch) - coherent_information(rho, small)) < 1e-9);
}

TEST_CASE("gram isometry") {
  Mat e = Mat::Identity(5, 2);
  auto g = gram_isometry(e);
  CHECK(la::max_abs(g.v - e) < 1e-15);

  TruncatedBasis b(40);
  std::vector<FockKet> kets{make_state(Coherent{2.0}, b), make_state(Coherent{-2.0}, b)};
  auto gi = gram_isometry(kets);
  CHECK(gi.rank == 2);
  CHECK(la::max_abs(gi.v.adjoint() * gi.v - Mat::Identity(2, 2)) < 1e-10);
  Mat gram(2, 2);
  gram << 1, std::exp(-8.0), std::exp(-8.0), 1;
  CHECK(la::max_abs(kets[0].amplitudes().adjoint() * kets[1].amplitudes() - gram.block(0, 1, 1, 1)) < 1e-12);

  Vec v = Vec::Zero(5);
  v(2) = 3;
  auto single = gram_isometry(Mat(v));
  CHECK(std::abs(single.v(2, 0) - 1.0) < 1e-15);

  Mat dup(3, 2);
  dup << 1, 1, 0, 0, 0, 0;
  auto gd = gram_isometry(dup);
  CHECK(gd.rank == 1);
  CHECK(gd.dropped == 1);
}

TEST_CASE("compressed cat channel agrees with the Fock pipeline") {
  const double alpha = 1.5, beta = 3.0, theta = std::atan(alpha / beta);
  auto pr = compressed_cat_channel(alpha, beta, theta);
  auto [j, jc] = compressed_cat_choi(alpha, beta, theta);
  // tan θ = α/β sends the two mixed branches to the same system point.
  CHECK(j.out_dim() == 3);
  CHECK(jc.out_dim() == 4);
  CHECK(j.min_eigenvalue() > -1e-9);
  CHECK(jc.min_eigenvalue() > -1e-9);

  TruncatedBasis in(60), eb(60);
  Mat code(in.dim(), 2);
  code.col(0) = make_state(Coherent{alpha}, in).amplitudes();
  code.col(1) = make_state(Coherent{-alpha}, in).amplitudes();
  auto fock = encoded_env_assisted_channel(make_state(Cat{beta}, eb).amplitudes(), theta, code);
  DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  const double ic_fock = coherent_information(rho, fock);
  CHECK(std::abs(coherent_information(rho, pr.channel, pr.complement) - ic_fock) < 1e-6);
  CHECK(std::abs(coherent_information(rho, j) - ic_fock) < 1e-6);

  // Near θ = 0 the block traces reproduce the encoding Gram matrix.
  auto [j0, jc0] = compressed_cat_choi(alpha, beta, 1e-9);
  Mat blocks = la::ptrace_second(j0.matrix(), 2, j0.out_dim());
  CHECK(std::abs(blocks(0, 0) - 1.0) < 1e-9);
  CHECK(std::abs(blocks(0, 1) - std::exp(-2 * alpha * alpha)) < 1e-9);
}

TEST_CASE("compressed comb channel agrees with the Fock pipeline") {
  CoherentComb comb{2, 1.0, {0.6, 0.0, 0.8}, 0.8};
  const double theta = 0.7;
  auto pr = compressed_comb_channel(comb, theta);
  TruncatedBasis in(30), eb(40);
  Mat code(in.dim(), 2);
  code.col(0) = make_state(Coherent{0.0}, in).amplitudes();
  code.col(1) = make_state(Coherent{1.0}, in).amplitudes();
  auto env = make_state(Comb{comb.f, comb.env_spacing}, eb);
  auto fock = encoded_env_assisted_channel(env.amplitudes(), theta, code);
  DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  CHECK(std::abs(coherent_information(rho, pr.channel) - coherent_information(rho, fock)) < 1e-6);

  CoherentComb single{2, 1.5, {1.0}, 0.7};
  auto one = compressed_comb_channel(single, theta);
  CHECK(one.complement.out_dim() <= 2);
  auto [j, jc] = compressed_comb_choi(single, theta);
  CHECK(std::abs(j.matrix().trace().real() - j.partial_trace_out().trace().real()) < 1e-12);

  CHECK_THROWS_AS(compressed_comb_channel({1, 1.0, {1.0}, 1.0}, theta), InvalidSpec);
  CHECK_THROWS_AS(compressed_comb_channel({2, 1.0, {0.5, 0.5}, 1.0}, theta), InvalidSpec);
}
