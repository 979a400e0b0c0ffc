#include "peaqc/highfock.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "peaqc/error.hpp"
#include "peaqc/metrics.hpp"

namespace peaqc {

HighFockSpec HighFockSpec::at_lambda(int n, double vacuum_weight, double lambda) {
  HighFockSpec s{n, vacuum_weight, lambda, n > 0 ? lambda / n : 0.0};
  s.validate();
  return s;
}

void HighFockSpec::validate() const {
  if (n < 1) throw InvalidSpec("HighFockSpec: n must be positive");
  if (!(vacuum_weight >= 0 && vacuum_weight <= 1)) throw InvalidSpec("HighFockSpec: |α|² must lie in [0, 1]");
  if (!(lambda > 0)) throw InvalidSpec("HighFockSpec: λ must be positive");
  if (!(eta >= 0 && eta <= 1)) throw InvalidSpec("HighFockSpec: η must lie in [0, 1]");
  if (std::abs(eta * n - lambda) > 1e-9) throw InvalidSpec("HighFockSpec: η n differs from λ");
}

Vec HighFockSpec::environment() const {
  Vec e = Vec::Zero(n + 1);
  e(0) = std::sqrt(vacuum_weight);
  e(n) += std::sqrt(1 - vacuum_weight);
  return e;
}

namespace {

Mat code_02() {
  Mat c = Mat::Zero(3, 2);
  c(0, 0) = 1;
  c(2, 1) = 1;
  return c;
}

}  // namespace

ChannelPair exact_channel(const HighFockSpec& spec, int n_max) {
  spec.validate();
  if (n_max < spec.n + 6) throw TruncationTooSmall("exact_channel: n_max must be at least n + 6");
  auto ch = encoded_env_assisted_channel(spec.environment(), theta_from_eta(spec.eta), code_02(), 0.0);
  return {ch, ch.complement()};
}

double exact_ic(const HighFockSpec& spec) {
  auto pr = exact_channel(spec, spec.n + 6);
  return coherent_information(DensityMatrix::maximally_mixed(2), pr.channel, pr.complement);
}

PoissonOutputs poisson_limit_outputs(double lambda, double tol, int kmax) {
  if (!(lambda > 0)) throw InvalidSpec("poisson_limit_outputs: λ must be positive");
  PoissonOutputs o{lambda, 0, {}, {}, {}, 1.0, 1.0};
  double pk = std::exp(-lambda), mass = 0;
  for (int k = 0;; ++k) {
    if (k > 0) pk *= lambda / k;
    o.p.push_back(pk);
    mass += pk;
    const double poly = 1 - 2.0 * k / lambda + k * (k - 1.0) / (lambda * lambda);
    o.zero_branch.push_back(std::sqrt(pk));
    o.two_branch.push_back(lambda / std::sqrt(2.0) * std::sqrt(pk) * poly);
    o.zero_deficit -= pk;
    o.two_deficit -= o.two_branch.back() * o.two_branch.back();
    o.kmax = k;
    if (kmax >= 0 ? k >= kmax : (mass >= 1 - tol && k >= 3)) break;
    if (k > 400) break;
  }
  return o;
}

HighFockLabels poisson_limit_labels(int kmax) { return {0, 1 + kmax, kmax + 4}; }

KrausChannel poisson_limit_channel(const PoissonOutputs& o, double vacuum_weight) {
  if (!(vacuum_weight >= 0 && vacuum_weight <= 1)) throw InvalidSpec("poisson_limit_channel: |α|² must lie in [0, 1]");
  const auto lab = poisson_limit_labels(o.kmax);
  const double a = std::sqrt(vacuum_weight), b = std::sqrt(1 - vacuum_weight);
  const int nk = std::max(o.kmax, 2) + 1;
  std::vector<Mat> ops(nk, Mat::Zero(lab.out_dim, 2));
  ops[0](lab.empty, 0) += a;
  ops[2](lab.empty, 1) += a;
  for (int k = 0; k <= o.kmax; ++k) {
    ops[k](lab.n - k, 0) += b * o.zero_branch[k];
    ops[k](lab.n + 2 - k, 1) += b * o.two_branch[k];
  }
  return KrausChannel(std::move(ops), 2, lab.out_dim);
}

KrausChannel poisson_limit_channel(double lambda, double vacuum_weight) {
  return poisson_limit_channel(poisson_limit_outputs(lambda, 1e-12), vacuum_weight);
}

double swap_limit_check(int m1, int m2, int n, double lambda) {
  if (m1 < 0 || m2 < 0 || n < 1 || !(lambda > 0 && lambda <= n)) throw InvalidSpec("swap_limit_check: bad arguments");
  double amp = 0;
  for_each_beam_splitter_column(theta_from_eta(lambda / n), m1, m2, [&](int i, const RVec& col) {
    if (i == m1) amp = col(m2);
  });
  return std::abs(amp - (m1 % 2 ? -1.0 : 1.0));
}

FidelityBound fidelity_bound() {
  const double e = std::exp(1.0);
  FidelityBound f{};
  f.vacuum_weight = 1 / (2 * e + 1);
  const double s3 = std::sqrt(3.0) + 1, s2 = std::sqrt(2.0) + 1, s32 = std::sqrt(1.5) + 1;
  f.closed_form = (s3 * s3 + s2 * s2 + s32 * s32) / (4 * (2 * e + 1));

  auto outs = poisson_limit_outputs(1.0, 0.0, 3);
  auto ch = poisson_limit_channel(outs, f.vacuum_weight);
  const auto lab = poisson_limit_labels(outs.kmax);
  f.decoder_applied = entanglement_fidelity_raw(compose(ch, highfock_decoder(lab, false)));

  auto full = poisson_limit_channel(1.0, f.vacuum_weight);
  const auto flab = poisson_limit_labels((full.out_dim() - 4));
  const auto mixed = DensityMatrix::maximally_mixed(2);
  f.channel_ic = coherent_information(mixed, full);
  f.decoded_ic = coherent_information(mixed, compose(full, highfock_decoder(flab, true)));
  return f;
}

AlphaPoint optimize_alpha(double lambda, double tol) {
  const auto outs = poisson_limit_outputs(lambda, 1e-12);
  const auto mixed = DensityMatrix::maximally_mixed(2);
  auto ic = [&](double w) { return coherent_information(mixed, poisson_limit_channel(outs, w)); };
  const double g = (std::sqrt(5.0) - 1) / 2;
  double lo = 0, hi = 1;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = ic(x1), f2 = ic(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = ic(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = ic(x1);
    }
  }
  AlphaPoint best{lambda, (lo + hi) / 2, ic((lo + hi) / 2)};
  for (double edge : {0.0, 1.0}) {
    const double v = ic(edge);
    if (v > best.ic) best = {lambda, edge, v};
  }
  return best;
}

std::vector<AlphaPoint> optimize_alpha(const std::vector<double>& lambdas, int workers) {
  for (double l : lambdas)
    if (!(l > 0)) throw InvalidSpec("optimize_alpha: λ must be positive");
  std::vector<AlphaPoint> out(lambdas.size());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(lambdas.size())));
  std::vector<std::exception_ptr> errs(workers);
  auto run = [&](int w) {
    try {
      for (size_t i = w; i < lambdas.size(); i += workers) out[i] = optimize_alpha(lambdas[i]);
    } catch (...) {
      errs[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace peaqc
