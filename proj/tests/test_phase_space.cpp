#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <sstream>

#include "peaqc/channels.hpp"
#include "peaqc/error.hpp"
#include "peaqc/phase_space.hpp"

using namespace peaqc;

namespace {

cplx laguerre_element(int m, int n, cplx b) {
  const double x = std::norm(b);
  const double g = std::exp(-x / 2);
  if (m >= n)
    return std::sqrt(boost::math::factorial<double>(n) / boost::math::factorial<double>(m)) *
           std::pow(b, m - n) * g * boost::math::laguerre(n, m - n, x);
  return std::sqrt(boost::math::factorial<double>(m) / boost::math::factorial<double>(n)) *
         std::pow(-std::conj(b), n - m) * g * boost::math::laguerre(m, n - m, x);
}

DensityMatrix pure(const FockKet& k) { return DensityMatrix(k.amplitudes() * k.amplitudes().adjoint()); }

}  // namespace

TEST_CASE("displacement elements against associated Laguerre polynomials") {
  for (cplx b : {cplx(0.3, -0.2), cplx(1.5, 0.8), cplx(-2.5, 3.0)}) {
    Mat d = displacement_elements(b, 30);
    double err = 0;
    for (int m = 0; m <= 30; ++m)
      for (int n = 0; n <= 30; ++n) err = std::max(err, std::abs(d(m, n) - laguerre_element(m, n, b)));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("vacuum characteristic function is Gaussian") {
  auto chi = char_func(StateSpec{Vacuum{}});
  for (double x : {-3.0, -0.5, 0.0, 1.2})
    for (double p : {-2.0, 0.3, 4.0}) CHECK(std::abs(chi({x, p}) - std::exp(-(x * x + p * p) / 4)) < 1e-12);
}

TEST_CASE("characteristic function properties") {
  TruncatedBasis b(40);
  auto psi = make_state(Cat{1.3, 1}, b);
  auto chi = char_func(psi);
  CHECK(std::abs(chi({0, 0}) - 1.0) < 1e-12);
  for (PhasePoint a : {PhasePoint{0.7, -1.1}, PhasePoint{2.0, 0.4}}) {
    CHECK(std::abs(chi({-a[0], -a[1]}) - std::conj(chi(a))) < 1e-12);
    CHECK(std::abs(chi(a)) <= 1 + 1e-12);
  }
  // Density-matrix and ket forms agree.
  auto chir = char_func(pure(psi));
  CHECK(std::abs(chir({0.9, -0.6}) - chi({0.9, -0.6})) < 1e-12);
}

TEST_CASE("translations obey the Weyl relation") {
  TruncatedBasis b(60);
  PhasePoint u{0.8, -0.5}, v{-0.3, 1.1};
  Mat tu = translation(u, b).matrix(), tv = translation(v, b).matrix();
  Mat tuv = translation({u[0] + v[0], u[1] + v[1]}, b).matrix();
  const double omega = u[0] * v[1] - u[1] * v[0];
  Mat lhs = (tu * tv).topLeftCorner(20, 20);
  Mat rhs = (std::exp(cplx(0, -omega / 2)) * tuv).topLeftCorner(20, 20);
  CHECK(la::max_abs(lhs - rhs) < 1e-9);
  Mat exact = displacement_elements(cplx(u[0], u[1]) / std::sqrt(2.0), 59);
  CHECK(la::max_abs(exact.topLeftCorner(30, 30) - tu.topLeftCorner(30, 30)) < 1e-9);
}

TEST_CASE("beam-splitter product rule against two-mode simulation") {
  TruncatedBasis b(30);
  auto sys = make_state(Coherent{cplx(0.7, 0.3)}, b);
  auto env = make_state(FockSuperposition{{{0, 1.0}, {1, cplx(0, 0.6)}, {2, 0.3}}}, TruncatedBasis(2));
  for (double eta : {0.3, 0.65}) {
    auto ch = env_assisted_channel(env, theta_from_eta(eta), b);
    auto comp = complementary_channel(env, theta_from_eta(eta), b);
    Mat rho = sys.amplitudes() * sys.amplitudes().adjoint();
    DensityMatrix out(ch.apply(rho));
    DensityMatrix envout(comp.apply(rho));
    auto [chi3, chi4] = beamsplitter_charfunc(char_func(sys), char_func(env), eta);
    auto sim3 = char_func(out), sim4 = char_func(envout);
    for (PhasePoint a : {PhasePoint{0.4, -0.9}, PhasePoint{-1.3, 0.2}, PhasePoint{1.0, 1.0}}) {
      CHECK(std::abs(chi3(a) - sim3(a)) < 1e-6);
      CHECK(std::abs(chi4(a) - sim4(a)) < 1e-6);
    }
  }
}

TEST_CASE("grid product rule") {
  GridSpec g{-2, 2, 9};
  auto chi = char_func(StateSpec{Fock{1}});
  auto grid = evaluate(chi, g);
  CHECK(std::abs(grid.values(4, 4) - 1.0) < 1e-12);
  auto [g3, g4] = beamsplitter_charfunc(grid, evaluate(char_func(StateSpec{Vacuum{}}), g), 1.0);
  CHECK(la::max_abs(g3.values - grid.values) < 1e-12);
  CHECK(std::abs(g4.values(4, 4) - 1.0) < 1e-12);
  CHECK_THROWS_AS(beamsplitter_charfunc(grid, grid, 0.3), DimensionMismatch);
  auto par = evaluate(chi, g, 3);
  CHECK(par.values == grid.values);

  std::ostringstream os;
  write_csv(os, grid, {"state=fock1"});
  CHECK(os.str().rfind("# state=fock1\nalpha_x,alpha_p,re,im\n", 0) == 0);
}

TEST_CASE("GKP codeword stabilizers and logical sign") {
  for (auto kind : {LatticeKind::Square, LatticeKind::Hexagonal}) {
    auto lat = gkp_lattice(kind);
    Mat code = gkp_code(kind, 0.3);
    const int n = static_cast<int>(code.rows()) - 1;
    TruncatedBasis b(n);
    auto expect = [&](const PhasePoint& p, int mu) {
      Vec c = code.col(mu);
      return c.dot(displacement_elements(cplx(p[0], p[1]) / std::sqrt(2.0), n) * c);
    };
    for (int mu = 0; mu < 2; ++mu) {
      CHECK(std::abs(expect(lat.u, mu)) > 0.6);
      CHECK(std::abs(expect(lat.v, mu)) > 0.6);
      const cplx z = expect(lat.logical_z(), mu);
      CHECK(z.real() * (mu == 0 ? 1 : -1) > 0.6);
    }
    CHECK(la::max_abs(code.adjoint() * code - Mat::Identity(2, 2)) < 1e-12);
  }
}

TEST_CASE("hiding diagnostic") {
  auto vac = hiding_report(Vacuum{}, 0.34, LatticeKind::Hexagonal);
  CHECK(vac.max_logical_magnitude > 0.02);

  auto weak = hiding_report(Fock{1}, 0.05, LatticeKind::Hexagonal);
  CHECK(weak.max_logical_magnitude > 0.02);

  auto rep = hiding_report(Fock{1}, 0.34, LatticeKind::Hexagonal);
  MESSAGE("Fock 1 at eta=0.34: rescaled " << rep.max_logical_magnitude << ", unscaled " << rep.max_logical_naive);
  CHECK(rep.max_logical_magnitude < 0.05);
  REQUIRE(rep.points.size() == 5);
  // The three logical points are equivalent on the hexagonal lattice.
  CHECK(std::abs(rep.points[0].magnitude - rep.points[2].magnitude) < 1e-9);
}

TEST_CASE("hexagonal GKP with a Fock environment") {
  const double ic = hex_gkp_fock_ic(1, 0.34, 0.3);
  MESSAGE("hex GKP, Fock 1, eta=0.34: I_c " << ic);
  CHECK(ic <= 1.0 + 1e-9);
  CHECK(ic >= -1.0 - 1e-9);
}

TEST_CASE("translation special cases") {
  TruncatedBasis b(40);
  CHECK(la::max_abs(translation({0, 0}, b).matrix() - Mat::Identity(41, 41)) < 1e-14);
  Mat t = translation({1, 0.5}, b).matrix();
  Mat d = displacement(cplx(1, 0.5) / std::sqrt(2.0), b).matrix();
  CHECK(la::max_abs(t - d) < 1e-9);
}

TEST_CASE("Fock characteristic function zero rings") {
  auto chi1 = char_func(StateSpec{Fock{1}});
  // |ᾱ|² = 1 on the first ring, i.e. α_x² + α_p² = 2.
  CHECK(std::abs(chi1({std::sqrt(2.0), 0})) < 1e-12);
  CHECK(std::abs(chi1({1, 1})) < 1e-12);
  CHECK(std::abs(chi1({1.3, 0}).real()) > 0.05);
  auto chi3 = char_func(StateSpec{Fock{3}});
  for (double root : {0.41577455678347908, 2.2942803602790417, 6.2899450829374792})
    CHECK(std::abs(chi3({std::sqrt(2 * root), 0})) < 1e-10);
}

TEST_CASE("lattice unit cells") {
  for (auto kind : {LatticeKind::Square, LatticeKind::Hexagonal}) {
    auto l = gkp_lattice(kind);
    CHECK(std::abs(std::abs(l.u[0] * l.v[1] - l.u[1] * l.v[0]) - 4 * kPi) < 1e-10);
  }
}

TEST_CASE("hexagonal GKP envelope dependence") {
  const double a = hex_gkp_fock_ic(1, 0.35, 0.2);
  const double b = hex_gkp_fock_ic(1, 0.35, 0.3);
  MESSAGE("eta=0.35: delta 0.2 " << a << ", delta 0.3 " << b);
  // Tighter envelopes lose rate against a Fock environment below one half.
  CHECK(a > 0);
  CHECK(b > a);
}

TEST_CASE("hexagonal GKP under pure loss above one half") {
  const double a = hex_gkp_fock_ic(0, 0.8, 0.4), b = hex_gkp_fock_ic(0, 0.8, 0.3);
  CHECK(a > 0);
  CHECK(b > a);
}
