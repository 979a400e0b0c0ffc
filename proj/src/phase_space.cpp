#include "peaqc/phase_space.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

#include "peaqc/error.hpp"
#include "peaqc/metrics.hpp"

namespace peaqc {

namespace {

cplx to_beta(const PhasePoint& u) { return cplx(u[0], u[1]) / std::sqrt(2.0); }

}  // namespace

FockOperator translation(const PhasePoint& u, const TruncatedBasis& basis) {
  return displacement(to_beta(u), basis);
}

Mat displacement_elements(cplx beta, int n) {
  Mat d = Mat::Zero(n + 1, n + 1);
  const double x = std::norm(beta);
  if (x == 0) return Mat::Identity(n + 1, n + 1);
  const double lb = 0.5 * std::log(x);
  const cplx ph = beta / std::sqrt(x);
  // ⟨m|D|k⟩ = √(k!/m!) β^{m−k} e^{−x/2} L_k^{(m−k)}(x) for m ≥ k; the upper triangle uses −β*.
  for (int a = 0; a <= n; ++a) {
    double lm1 = 0, l = 1;
    for (int k = 0; k + a <= n; ++k) {
      if (k == 1) {
        lm1 = 1;
        l = 1 + a - x;
      } else if (k > 1) {
        const double next = ((2 * k - 1 + a - x) * l - (k - 1 + a) * lm1) / k;
        lm1 = l;
        l = next;
      }
      const int m = k + a;
      const double mag = std::exp(0.5 * (std::lgamma(k + 1.0) - std::lgamma(m + 1.0)) + a * lb - x / 2);
      d(m, k) = mag * l * std::pow(ph, a);
      if (a > 0) d(k, m) = mag * l * std::pow(-std::conj(ph), a);
    }
  }
  return d;
}

CharFunction char_func(const DensityMatrix& rho) {
  Mat r = rho.matrix();
  const int n = rho.dim() - 1;
  return [r, n](const PhasePoint& a) { return r.cwiseProduct(displacement_elements(to_beta(a), n).transpose()).sum(); };
}

CharFunction char_func(const FockKet& psi) {
  Vec v = psi.amplitudes();
  const int n = static_cast<int>(v.size()) - 1;
  return [v, n](const PhasePoint& a) { return v.dot(displacement_elements(to_beta(a), n) * v); };
}

CharFunction char_func(const StateSpec& spec) {
  return char_func(make_state(spec, TruncatedBasis(std::max(1, suggest_nmax(spec)))));
}

PhaseGrid evaluate(const CharFunction& chi, const GridSpec& grid, int workers) {
  if (grid.points < 1 || !(grid.hi >= grid.lo)) throw InvalidSpec("evaluate: bad grid");
  Mat out(grid.points, grid.points);
  auto row = [&](int i) {
    for (int j = 0; j < grid.points; ++j) out(i, j) = chi({grid.at(i), grid.at(j)});
  };
  workers = std::max(1, workers);
  if (workers == 1) {
    for (int i = 0; i < grid.points; ++i) row(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < grid.points; i += workers) row(i);
      });
    for (auto& t : pool) t.join();
  }
  return {grid, out};
}

std::pair<CharFunction, CharFunction> beamsplitter_charfunc(CharFunction chi1, CharFunction chi2, double eta) {
  if (!(eta >= 0 && eta <= 1)) throw InvalidSpec("transmissivity must lie in [0, 1]");
  const double c = std::sqrt(eta), s = std::sqrt(1 - eta);
  CharFunction chi3 = [=](const PhasePoint& a) { return chi1({c * a[0], c * a[1]}) * chi2({s * a[0], s * a[1]}); };
  CharFunction chi4 = [=](const PhasePoint& a) { return chi1({-s * a[0], -s * a[1]}) * chi2({c * a[0], c * a[1]}); };
  return {chi3, chi4};
}

namespace {

int node_of(const GridSpec& g, double x) {
  if (g.points == 1) return std::abs(x - g.lo) < 1e-12 ? 0 : -1;
  const double step = (g.hi - g.lo) / (g.points - 1);
  const long i = std::lround((x - g.lo) / step);
  if (i < 0 || i >= g.points || std::abs(g.at(static_cast<int>(i)) - x) > 1e-9 * std::max(1.0, step)) return -1;
  return static_cast<int>(i);
}

cplx sample(const PhaseGrid& g, double x, double p) {
  const int i = node_of(g.grid, x), j = node_of(g.grid, p);
  if (i < 0 || j < 0) throw DimensionMismatch("beamsplitter_charfunc: rescaled point is off the grid; evaluate from source states");
  return g.values(i, j);
}

}  // namespace

std::pair<PhaseGrid, PhaseGrid> beamsplitter_charfunc(const PhaseGrid& g1, const PhaseGrid& g2, double eta) {
  if (!(g1.grid == g2.grid)) throw DimensionMismatch("beamsplitter_charfunc: grids differ");
  if (!(eta >= 0 && eta <= 1)) throw InvalidSpec("transmissivity must lie in [0, 1]");
  const double c = std::sqrt(eta), s = std::sqrt(1 - eta);
  const GridSpec& gs = g1.grid;
  Mat v3(gs.points, gs.points), v4(gs.points, gs.points);
  for (int i = 0; i < gs.points; ++i)
    for (int j = 0; j < gs.points; ++j) {
      const double x = gs.at(i), p = gs.at(j);
      v3(i, j) = sample(g1, c * x, c * p) * sample(g2, s * x, s * p);
      v4(i, j) = sample(g1, -s * x, -s * p) * sample(g2, c * x, c * p);
    }
  return {{gs, v3}, {gs, v4}};
}

HidingReport hiding_report(const StateSpec& env, double eta, LatticeKind lattice, double threshold) {
  if (!(eta >= 0 && eta < 1)) throw InvalidSpec("hiding_report: transmissivity must lie in [0, 1)");
  const GkpLattice lat = gkp_lattice(lattice);
  CharFunction chi = char_func(env);
  const double scaled = std::sqrt(eta / (1 - eta)), naive = std::sqrt(eta);
  HidingReport rep{eta, threshold, {}, 0.0, 0.0};
  auto add = [&](const std::string& label, const PhasePoint& p, bool logical) {
    const double m = std::abs(chi({scaled * p[0], scaled * p[1]}));
    const double mn = std::abs(chi({naive * p[0], naive * p[1]}));
    rep.points.push_back({label, p, logical, m, mn, m < threshold});
    if (logical) {
      rep.max_logical_magnitude = std::max(rep.max_logical_magnitude, m);
      rep.max_logical_naive = std::max(rep.max_logical_naive, mn);
    }
  };
  add("X", lat.logical_x(), true);
  add("Y", lat.logical_y(), true);
  add("Z", lat.logical_z(), true);
  add("S_u", lat.u, false);
  add("S_v", lat.v, false);
  return rep;
}

Mat gkp_code(LatticeKind lattice, double delta, int n_max) {
  if (n_max <= 0)
    n_max = std::max(suggest_nmax(ApproxGkp{lattice, delta, 0}), suggest_nmax(ApproxGkp{lattice, delta, 1}));
  TruncatedBasis b(n_max);
  std::vector<FockKet> kets{make_state(ApproxGkp{lattice, delta, 0}, b), make_state(ApproxGkp{lattice, delta, 1}, b)};
  auto g = gram_isometry(kets);
  if (g.rank != 2) throw InvalidSpec("gkp_code: codewords are linearly dependent");
  return g.v;
}

double hex_gkp_fock_ic(int n, double eta, double delta, int n_max) {
  if (n < 0) throw InvalidSpec("hex_gkp_fock_ic: negative photon number");
  Mat code = gkp_code(LatticeKind::Hexagonal, delta, n_max);
  Vec env = Vec::Zero(n + 1);
  env(n) = 1;
  auto ch = encoded_env_assisted_channel(env, theta_from_eta(eta), code);
  return coherent_information(DensityMatrix::maximally_mixed(2), ch);
}

void write_csv(std::ostream& os, const PhaseGrid& g, const std::vector<std::string>& meta) {
  for (const auto& m : meta) os << "# " << m << '\n';
  os << "alpha_x,alpha_p,re,im\n";
  os << std::setprecision(12);
  for (int i = 0; i < g.grid.points; ++i)
    for (int j = 0; j < g.grid.points; ++j)
      os << g.grid.at(i) << ',' << g.grid.at(j) << ',' << g.values(i, j).real() << ',' << g.values(i, j).imag()
         << '\n';
}

}  // namespace peaqc
