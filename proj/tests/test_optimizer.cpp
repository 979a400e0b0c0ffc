#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "peaqc/error.hpp"
#include "peaqc/metrics.hpp"
#include "peaqc/optimizer.hpp"

using namespace peaqc;

namespace {

Mat su2(double a, double b, double c) {
  Mat rz1(2, 2), ry(2, 2), rz2(2, 2);
  rz1 << std::exp(cplx(0, -a / 2)), 0, 0, std::exp(cplx(0, a / 2));
  ry << std::cos(b / 2), -std::sin(b / 2), std::sin(b / 2), std::cos(b / 2);
  rz2 << std::exp(cplx(0, -c / 2)), 0, 0, std::exp(cplx(0, c / 2));
  return rz1 * ry * rz2;
}

Mat trace_out(const Mat& x, int din, int dout) {
  Mat t(din, din);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j) t(i, j) = x.block(i * dout, j * dout, dout, dout).trace();
  return t;
}

}  // namespace

TEST_CASE("SDP step on the identity fidelity functional") {
  Mat c = decoder_cost(identity_channel(2));
  auto res = sdp_linear_step({c, 2, 2});
  CHECK(res.converged);
  CHECK(std::abs(res.objective / 4 - 1) < 1e-6);
  CHECK(la::max_abs(res.choi.matrix() - kraus_to_choi(identity_channel(2)).matrix()) < 1e-5);
}

TEST_CASE("SDP step against a brute-force unitary grid") {
  const int g = 22;
  std::vector<Mat> grid;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) grid.push_back(su2(2 * kPi * i / g, kPi * j / (g - 1), 2 * kPi * k / g));
  REQUIRE(grid.size() >= 10000);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    Mat v = grid[std::uniform_int_distribution<size_t>(0, grid.size() - 1)(rng)];
    Mat c = decoder_cost(unitary_channel(v.adjoint()));
    double best = 0;
    for (const auto& w : grid) {
      Mat x = kraus_to_choi(unitary_channel(w)).matrix();
      best = std::max(best, c.cwiseProduct(x.transpose()).sum().real());
    }
    auto res = sdp_linear_step({c, 2, 2});
    CHECK(std::abs(res.objective - best) < 1e-4);
  }
}

TEST_CASE("SDP step output is feasible and reports non-convergence") {
  std::mt19937_64 rng(3);
  Mat a = la::haar_isometry(12, 12, rng);
  Mat c = la::hermitian_part(a * Eigen::VectorXd::LinSpaced(12, -1, 2).cast<cplx>().asDiagonal() * a.adjoint());
  auto res = sdp_linear_step({c, 3, 4});
  CHECK(res.choi.min_eigenvalue() > -1e-8);
  CHECK(la::max_abs(trace_out(res.choi.matrix(), 3, 4) - Mat::Identity(3, 3)) < 1e-7);

  SdpOptions tight;
  tight.max_iterations = 3;
  tight.tol = 1e-14;
  try {
    sdp_linear_step({c, 3, 4}, tight);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.primal_residual > 0);
    CHECK(e.dual_residual >= 0);
  }
  tight.require_convergence = false;
  auto partial = sdp_linear_step({c, 3, 4}, tight);
  CHECK_FALSE(partial.converged);
  CHECK(la::max_abs(trace_out(partial.choi.matrix(), 3, 4) - Mat::Identity(3, 3)) < 1e-7);
}

TEST_CASE("decoder step on the cat limit") {
  const double h = 1 / std::sqrt(2.0);
  Mat km = Mat::Zero(4, 2), k0 = Mat::Zero(4, 2), kp = Mat::Zero(4, 2);
  km(0, 1) = h;
  k0(1, 0) = h;
  k0(2, 1) = h;
  kp(3, 0) = h;
  KrausChannel cat({km, k0, kp}, 2, 4);
  auto res = sdp_linear_step({decoder_cost(cat), 4, 2});
  CHECK(std::abs(res.objective / 4 - 0.75) < 1e-4);
}

TEST_CASE("random encoding initialization") {
  auto a = random_encoding_init(2, 7, 5);
  auto b = random_encoding_init(2, 7, 5);
  auto c = random_encoding_init(2, 7, 6);
  CHECK(a.matrix() == b.matrix());
  CHECK(la::max_abs(a.partial_trace_out() - Mat::Identity(2, 2)) < 1e-12);
  CHECK((a.matrix() - c.matrix()).norm() > 1e-3);
}

TEST_CASE("alternating optimization") {
  AlternatingOptions opt;
  opt.rounds = 25;
  opt.restarts = 2;
  opt.code_nmax = 6;
  opt.seed = 11;

  const double theta = theta_from_eta(0.9);
  auto ch = optimizer_channel(Vacuum{}, theta, opt.code_nmax);
  auto res = alternate_optimize(ch, 2, opt);
  const auto& f = res.trace.fidelity;
  REQUIRE(static_cast<int>(f.size()) == opt.rounds);
  for (size_t i = 1; i < f.size(); ++i) CHECK(f[i] >= f[i - 1] - 1e-7);
  CHECK(res.encoding.min_eigenvalue() > -1e-8);
  CHECK(res.decoding.min_eigenvalue() > -1e-8);
  CHECK(la::max_abs(res.encoding.partial_trace_out() - Mat::Identity(2, 2)) < 1e-7);
  CHECK(la::max_abs(res.decoding.partial_trace_out() - Mat::Identity(ch.out_dim(), ch.out_dim())) < 1e-7);

  // Baseline: {|0⟩,|1⟩} with its own optimal decoder.
  Mat e01 = Mat::Zero(opt.code_nmax + 1, 2);
  e01(0, 0) = e01(1, 1) = 1;
  std::vector<Mat> base;
  for (const auto& k : ch.ops()) base.push_back(k * e01);
  KrausChannel baseline(base, 2, ch.out_dim());
  auto bres = sdp_linear_step({decoder_cost(baseline), ch.out_dim(), 2});
  MESSAGE("vacuum eta=0.9: optimized F " << f.back() << ", baseline " << bres.objective / 4);
  CHECK(f.back() > 0.95);
  CHECK(f.back() >= bres.objective / 4 - 1e-3);

  auto again = alternate_optimize(ch, 2, opt);
  CHECK(again.trace.fidelity == res.trace.fidelity);
  CHECK(again.restart_fidelities == res.restart_fidelities);
}

TEST_CASE("vacuum environment below one half has no decoded coherent information") {
  AlternatingOptions opt;
  opt.rounds = 20;
  opt.restarts = 2;
  opt.code_nmax = 6;
  opt.seed = 3;
  auto ch = optimizer_channel(Vacuum{}, theta_from_eta(0.3), opt.code_nmax);
  auto res = alternate_optimize(ch, 2, opt);
  auto ev = evaluate_scheme(ch, res.encoding, res.decoding);
  MESSAGE("vacuum eta=0.3: F " << ev.fidelity << ", decoded max I_c " << ev.ic_decoded_max);
  CHECK(ev.ic_decoded_max <= 1e-3);
  CHECK(ev.ic_undecoded_max <= 1e-3);
}
