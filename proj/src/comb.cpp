#include "peaqc/comb.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "peaqc/error.hpp"
#include "peaqc/metrics.hpp"

namespace peaqc {

namespace {

cplx f_at(const std::vector<cplx>& f, int j) {
  return j >= 0 && j < static_cast<int>(f.size()) ? f[j] : cplx(0);
}

}  // namespace

void validate(const CombSpec& spec) {
  if (spec.d < 2) throw InvalidSpec("comb needs d >= 2");
  if (spec.m < 1) throw InvalidSpec("comb needs m >= 1");
  if (static_cast<int>(spec.f.size()) != spec.m) throw InvalidSpec("comb amplitudes must have length m");
  if (!(spec.delta > 0 && spec.delta <= kPi / 4 + 1e-15)) throw InvalidSpec("comb angle must lie in (0, pi/4]");
  double n = 0;
  for (auto v : spec.f) n += std::norm(v);
  if (std::abs(n - 1) > 1e-12) throw InvalidSpec("comb amplitudes must be normalized");
}

double xi(int mu, int k, double delta) {
  return mu / std::sin(delta) + k * std::cos(delta) / std::tan(delta);
}

std::vector<CombCoordinate> comb_coordinates(const CombSpec& spec) {
  validate(spec);
  std::vector<CombCoordinate> out;
  for (int k = -(spec.d - 1); k <= spec.m - 1; ++k)
    for (int mu = 0; mu < spec.d; ++mu)
      if (k + mu >= 0 && k + mu <= spec.m - 1)
        out.push_back({mu, k, xi(mu, k, spec.delta), static_cast<int>(out.size())});
  std::vector<CombCoordinate> sorted = out;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.xi < b.xi; });
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].xi - sorted[i - 1].xi < 1e-9)
      throw CoordinateCollision("xi(" + std::to_string(sorted[i - 1].mu) + "," +
                                std::to_string(sorted[i - 1].k) + ") coincides with xi(" +
                                std::to_string(sorted[i].mu) + "," + std::to_string(sorted[i].k) + ")");
  return out;
}

KrausChannel ideal_kraus(const CombSpec& spec) {
  auto coords = comb_coordinates(spec);
  const int dout = static_cast<int>(coords.size());
  std::vector<Mat> ops;
  for (int k = -(spec.d - 1); k <= spec.m - 1; ++k) {
    Mat op = Mat::Zero(dout, spec.d);
    for (const auto& c : coords)
      if (c.k == k) op(c.index, c.mu) = f_at(spec.f, k + c.mu);
    ops.push_back(std::move(op));
  }
  return KrausChannel(std::move(ops), spec.d, dout);
}

double fidelity_quadratic_form(int d, const std::vector<cplx>& f) {
  const int m = static_cast<int>(f.size());
  double s = 0;
  for (int k = -(d - 1); k <= m - 1; ++k) {
    double row = 0;
    for (int mu = 0; mu < d; ++mu) row += std::abs(f_at(f, k + mu));
    s += row * row;
  }
  return s / (static_cast<double>(d) * d);
}

RMat toeplitz_matrix(int d, int m) {
  RMat t(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) t(i, j) = std::max(0, d - std::abs(i - j));
  return t;
}

ToeplitzMax toeplitz_max(int d, int m) {
  if (m < 1) throw InvalidSpec("toeplitz_max needs m >= 1");
  Eigen::SelfAdjointEigenSolver<RMat> es(toeplitz_matrix(d, m));
  RVec v = es.eigenvectors().col(m - 1);
  if (v.sum() < 0) v = -v;
  v = v.cwiseMax(0.0);
  return {es.eigenvalues()(m - 1), v.normalized()};
}

std::vector<cplx> optimal_f_d2(int m) {
  if (m < 1) throw InvalidSpec("optimal_f_d2 needs m >= 1");
  std::vector<cplx> f(m);
  for (int j = 0; j < m; ++j) f[j] = std::sqrt(2.0 / (m + 1)) * std::sin((j + 1) * kPi / (m + 1));
  return f;
}

CapacityBound capacity_bound(int d, const std::vector<cplx>& f) {
  const int m = static_cast<int>(f.size());
  RMat kappa = RMat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = -(d - 1); k <= m - 1; ++k) kappa(i, j) += std::abs(f_at(f, k + i) * f_at(f, k + j));
  kappa /= d;
  Eigen::SelfAdjointEigenSolver<RMat> es(kappa);
  return {kappa, std::log2(static_cast<double>(d)) - la::entropy_of_spectrum(es.eigenvalues())};
}

ClosedFormReport closed_form_report(int d, int m) {
  auto top = toeplitz_max(d, m);
  std::vector<cplx> f(m);
  for (int j = 0; j < m; ++j) f[j] = top.vector(j);
  auto cb = capacity_bound(d, f);
  return {d, m, fidelity_quadratic_form(d, f), top.lambda, f, cb.value, cb.kappa};
}

CoherentComb finite_r_comb(const CombSpec& spec, double r) {
  validate(spec);
  const double s = std::exp(r) / std::sqrt(2.0);
  return {spec.d, s, spec.f, s / std::tan(spec.delta)};
}

ChannelPair finite_r_channel(const CombSpec& spec, double r, double theta) {
  return compressed_comb_channel(finite_r_comb(spec, r), theta);
}

std::vector<FiniteRPoint> finite_r_scan(const CombSpec& spec, double r, const std::vector<double>& deltas,
                                        const std::vector<double>& etas, bool with_q1, int workers) {
  std::vector<FiniteRPoint> out(deltas.size() * etas.size());
  auto job = [&](size_t idx) {
    CombSpec s = spec;
    s.delta = deltas[idx / etas.size()];
    const double eta = etas[idx % etas.size()];
    auto pr = finite_r_channel(s, r, theta_from_eta(eta));
    DensityMatrix mixed = DensityMatrix::maximally_mixed(s.d);
    FiniteRPoint p{s.delta, eta, coherent_information(mixed, pr.channel, pr.complement), 0.0};
    if (with_q1) p.q1 = maximize_coherent_info(pr.channel, pr.complement).value;
    out[idx] = p;
  };
  workers = std::max(1, workers);
  if (workers == 1) {
    for (size_t i = 0; i < out.size(); ++i) job(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < out.size(); i += workers) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace peaqc
