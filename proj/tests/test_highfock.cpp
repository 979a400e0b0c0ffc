#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "peaqc/error.hpp"
#include "peaqc/highfock.hpp"
#include "peaqc/metrics.hpp"

using namespace peaqc;

namespace {

double max_limit_gap(int n) {
  auto o = poisson_limit_outputs(1.0);
  double gap = 0;
  for_each_beam_splitter_column(theta_from_eta(1.0 / n), 2, n, [&](int m1, const RVec& col) {
    if (m1 == 1) return;
    for (int k = 0; k <= 6; ++k) {
      const double lim = m1 == 0 ? o.zero_branch[k] : o.two_branch[k];
      gap = std::max(gap, std::abs(col(n + m1 - k) - lim));
    }
  });
  return gap;
}

}  // namespace

TEST_CASE("spec validation") {
  auto s = HighFockSpec::at_lambda(40, 0.2, 1.0);
  CHECK(s.eta == doctest::Approx(0.025));
  CHECK_THROWS_AS(HighFockSpec::at_lambda(40, 1.2, 1.0), InvalidSpec);
  CHECK_THROWS_AS(HighFockSpec::at_lambda(40, 0.2, 0.0), InvalidSpec);
  CHECK_THROWS_AS((HighFockSpec{40, 0.2, 1.0, 0.03}.validate()), InvalidSpec);
  CHECK_THROWS_AS(exact_channel(s, 45), TruncationTooSmall);
  auto pr = exact_channel(s, 46);
  CHECK(pr.channel.trace_deviation() < 1e-12);
  CHECK(pr.complement.in_dim() == 2);
}

TEST_CASE("Poisson-limit amplitudes") {
  auto o = poisson_limit_outputs(1.0);
  CHECK(std::abs(o.zero_branch[0] - std::exp(-0.5)) < 1e-15);
  double mass = 0;
  for (double p : o.p) mass += p;
  CHECK(std::abs(1 - mass) < 1e-10);
  CHECK(std::abs(o.two_deficit) < 1e-6);

  // Binomial-to-Poisson corrections are O(1/n).
  const double g200 = max_limit_gap(200), g2000 = max_limit_gap(2000);
  MESSAGE("limit gap n=200: " << g200 << ", n=2000: " << g2000);
  CHECK(g200 < 5e-3);
  CHECK(g2000 < 1e-3);
  CHECK(g2000 < g200 / 5);

  auto ch = poisson_limit_channel(1.0, 0.3);
  CHECK(ch.trace_deviation() < 1e-8);
}

TEST_CASE("small photon numbers swap") {
  CHECK(swap_limit_check(0, 0, 100, 1.0) < 1e-6);
  CHECK(swap_limit_check(1, 0, 100, 1.0) < 0.05);
  for (auto [m1, m2] : {std::pair{1, 0}, std::pair{2, 1}, std::pair{3, 3}}) {
    const double a = swap_limit_check(m1, m2, 50, 1.0), b = swap_limit_check(m1, m2, 100, 1.0),
                 c = swap_limit_check(m1, m2, 200, 1.0);
    CHECK(a > b);
    CHECK(b > c);
  }
}

TEST_CASE("lambda equals one construction") {
  auto f = fidelity_bound();
  CHECK(std::abs(f.vacuum_weight - 1 / (2 * std::exp(1.0) + 1)) < 1e-15);
  CHECK(std::abs(f.vacuum_weight - 0.15536) < 1e-5);
  CHECK(std::abs(f.closed_form - f.decoder_applied) < 1e-6);
  CHECK(std::round(f.closed_form * 100) / 100 == doctest::Approx(0.71));
  CHECK(std::abs(f.channel_ic - 0.39) < 0.01);
  MESSAGE("F " << f.closed_form << ", channel I_c " << f.channel_ic << ", decoded I_c " << f.decoded_ic);
  CHECK(f.decoded_ic <= f.channel_ic + 1e-9);
}

TEST_CASE("optimized vacuum weight") {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(0.9 + 0.02 * i);
  auto curve = optimize_alpha(grid, 2);
  REQUIRE(curve.size() == grid.size());
  auto best = curve[0];
  for (const auto& p : curve) {
    CHECK(p.ic <= 1);
    CHECK(p.ic >= -1);
    if (p.ic > best.ic) best = p;
  }
  CHECK(std::abs(best.lambda - 1.17) < 0.05);
  CHECK(std::abs(best.ic - 0.415) < 0.01);
  CHECK(curve == optimize_alpha(grid, 1));
  CHECK(optimize_alpha(0.02).ic < 0);
  CHECK_THROWS_AS(optimize_alpha(std::vector<double>{0.5, -1.0}), InvalidSpec);
}

TEST_CASE("exact channels depend on lambda only") {
  const double w = 1 / (2 * std::exp(1.0) + 1);
  const double a = exact_ic(HighFockSpec::at_lambda(30, w, 1.0));
  const double b = exact_ic(HighFockSpec::at_lambda(40, w, 1.0));
  const double c = exact_ic(HighFockSpec::at_lambda(60, w, 1.0));
  CHECK(std::abs(a - b) < 0.01);
  CHECK(std::abs(b - c) < 0.01);
  CHECK(std::abs(a - c) < 0.01);
}

TEST_CASE("exact sweeps") {
  double best = -2, at = 0;
  std::vector<double> pure;
  for (int i = 1; i <= 80; ++i) {
    const double l = 0.05 * i;
    const double v = exact_ic(HighFockSpec::at_lambda(40, 0.2, l));
    if (v > best) best = v, at = l;
    pure.push_back(exact_ic(HighFockSpec::at_lambda(30, 0.0, l)));
  }
  CHECK(best > 0.4);
  CHECK(at > 0.5);
  CHECK(at < 2.0);
  // Pure Fock environment: one dominant maximum on the first positive lobe (λ ≤ 1.7).
  int turns = 0;
  for (size_t i = 1; i + 1 < 34; ++i)
    if (pure[i] > pure[i - 1] && pure[i] > pure[i + 1]) ++turns;
  CHECK(turns == 1);
  const double top = *std::max_element(pure.begin(), pure.begin() + 34);
  CHECK(*std::max_element(pure.begin() + 34, pure.end()) < top / 3);
}
