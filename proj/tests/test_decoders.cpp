#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "peaqc/comb.hpp"
#include "peaqc/decoders.hpp"
#include "peaqc/error.hpp"
#include "peaqc/metrics.hpp"

using namespace peaqc;

namespace {

KrausChannel random_channel(int din, int dout, int nk, unsigned seed) {
  std::mt19937_64 rng(seed);
  Mat v = la::haar_isometry(dout * nk, din, rng);
  std::vector<Mat> ops;
  for (int k = 0; k < nk; ++k) ops.push_back(v.middleRows(k * dout, dout));
  return KrausChannel(ops, din, dout);
}

KrausChannel cat_ideal() {
  const double h = 1 / std::sqrt(2.0);
  return ideal_kraus({2, 2, 0.5, {h, h}});
}

}  // namespace

TEST_CASE("Petz decoder of a unitary channel is its inverse") {
  std::mt19937_64 rng(1);
  Mat u = la::haar_isometry(3, 3, rng);
  auto ch = unitary_channel(u);
  auto petz = petz_decoder(ch);
  CHECK(std::abs(entanglement_fidelity(compose(ch, petz)) - 1) < 1e-12);
  Vec psi = la::haar_isometry(3, 1, rng).col(0);
  Mat r = psi * psi.adjoint();
  CHECK(la::max_abs(petz.apply(r) - u.adjoint() * r * u) < 1e-12);
}

TEST_CASE("Petz decoder is trace preserving on the output support") {
  for (unsigned s = 0; s < 4; ++s) {
    auto ch = random_channel(2, 6, 2, s);
    auto petz = petz_decoder(ch);
    CHECK(petz.trace_deviation() < 1e-7);
    auto partial = petz_decoder(ch, false);
    Mat sup = ch.apply(Mat::Identity(2, 2));
    Mat p = la::hermitian_function(sup, [](double x) { return x > 1e-10 ? 1.0 : 0.0; });
    CHECK(la::max_abs(partial.gram() - p) < 1e-7);
  }
  Mat sigma = Mat::Zero(2, 2);
  sigma(0, 0) = 1;
  CHECK_THROWS_AS(petz_decoder(random_channel(2, 4, 2, 9), DensityMatrix(sigma)), NotPositive);
}

TEST_CASE("cat-limit Petz decoder") {
  auto ch = cat_ideal();
  auto petz = petz_decoder(ch);
  CHECK(std::abs(entanglement_fidelity(compose(ch, petz)) - 0.75) < 1e-12);
  // Direct form: R_k = Σ_μ |μ⟩⟨ξ(μ,k)| with unit weights on the listed coordinates.
  auto comb = comb_decoder({2, 2, 0.5, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Mat e = Mat::Zero(4, 4);
      e(i, j) = 1;
      CHECK(la::max_abs(petz.apply(e) - comb.apply(e)) < 1e-8);
    }
}

TEST_CASE("optimal decoder") {
  std::mt19937_64 rng(2);
  auto uch = unitary_channel(la::haar_isometry(2, 2, rng));
  CHECK(std::abs(entanglement_fidelity(compose(uch, optimal_decoder(uch))) - 1) < 1e-6);

  auto cat = cat_ideal();
  const double f_opt = entanglement_fidelity(compose(cat, optimal_decoder(cat)));
  const double f_petz = entanglement_fidelity(compose(cat, petz_decoder(cat)));
  CHECK(petz_optimality_check(qec_matrix(cat)).holds);
  CHECK(std::abs(f_opt - 0.75) < 1e-4);
  CHECK(std::abs(f_opt - f_petz) < 1e-5);

  for (unsigned s = 10; s < 14; ++s) {
    auto ch = random_channel(2, 5, 3, s);
    auto opt = optimal_decoder(ch);
    CHECK(opt.trace_deviation() < 1e-7);
    CHECK(entanglement_fidelity(compose(ch, opt)) >= entanglement_fidelity(compose(ch, petz_decoder(ch))) - 1e-6);
  }

  auto pr = compressed_cat_channel(1.5, 3.0, std::atan(0.5));
  auto petz = petz_decoder(pr.channel);
  auto best = optimal_decoder(pr.channel);
  const double fp = entanglement_fidelity(compose(pr.channel, petz));
  const double fo = entanglement_fidelity(compose(pr.channel, best));
  CHECK(fo >= fp - 1e-6);
  const double ic_petz = maximize_coherent_info(compose(pr.channel, petz)).value;
  const double ic_opt = maximize_coherent_info(compose(pr.channel, best)).value;
  MESSAGE("finite cat: F petz " << fp << ", F opt " << fo << ", max I_c petz " << ic_petz << ", opt " << ic_opt);
  CHECK(ic_petz > -1.0);
  CHECK(ic_opt > -1.0);
}

TEST_CASE("high-Fock decoder") {
  HighFockLabels l{0, 10, 14};
  auto dec = highfock_decoder(l, false);
  REQUIRE(dec.size() == 3);
  for (const auto& r : dec.ops()) CHECK(la::max_abs(r * r.adjoint() - Mat::Identity(2, 2)) < 1e-15);
  Eigen::SelfAdjointEigenSolver<Mat> es(dec.gram());
  CHECK(es.eigenvalues().maxCoeff() < 1 + 1e-14);
  CHECK(std::abs(dec.gram().trace().real() - 6) < 1e-14);
  CHECK(highfock_decoder(l).trace_deviation() < 1e-14);

  CHECK_THROWS_AS(highfock_decoder({0, 2, 8}), CoordinateCollision);
  CHECK_THROWS_AS(highfock_decoder({0, 10, 12}), DimensionMismatch);
}
