#include "peaqc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "peaqc/error.hpp"

namespace peaqc {

namespace {

Mat trace_out(const Mat& x, int din, int dout) {
  Mat t(din, din);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j) t(i, j) = x.block(i * dout, j * dout, dout, dout).trace();
  return t;
}

void add_kron_identity(Mat& x, const Mat& a, int dout) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int q = 0; q < dout; ++q) x(i * dout + q, j * dout + q) += a(i, j);
}

// Rescale so Tr_out = I exactly; the result stays PSD.
Mat polish(const Mat& z, int din, int dout) {
  Mat t = la::hermitian_part(trace_out(z, din, dout));
  Mat ti = la::hermitian_function(t, [](double x) { return 1 / std::sqrt(std::max(x, 1e-12)); });
  Mat b = la::kron(ti, Mat::Identity(dout, dout));
  return la::hermitian_part(b * z * b);
}

}  // namespace

SdpResult sdp_linear_step(const SdpProblem& prob, const SdpOptions& opt, const Mat* warm) {
  const int din = prob.in_dim, dout = prob.out_dim, n = din * dout;
  if (prob.cost.rows() != n || prob.cost.cols() != n) throw DimensionMismatch("sdp_linear_step: cost size");
  if (la::max_abs(prob.cost - prob.cost.adjoint()) > 1e-9 * std::max(1.0, la::max_abs(prob.cost)))
    throw InvalidSpec("sdp_linear_step: cost must be Hermitian");
  Mat c = la::hermitian_part(prob.cost);
  Eigen::SelfAdjointEigenSolver<Mat> ce(c, Eigen::EigenvaluesOnly);
  const double scale = std::max(std::abs(ce.eigenvalues()(0)), std::abs(ce.eigenvalues()(n - 1)));
  const Mat eye_in = Mat::Identity(din, din);

  Mat z = warm ? *warm : Mat(Mat::Identity(n, n) / dout);
  if (z.rows() != n) throw DimensionMismatch("sdp_linear_step: warm start size");
  if (!(scale > 0)) {
    Mat x = Mat::Identity(n, n) / dout;
    return {ChoiMatrix(x, din, dout), 0.0, 0, 0.0, 0.0, true, x};
  }
  c /= scale;

  Mat u = Mat::Zero(n, n);
  double rho = opt.rho, rp = 0, rd = 0;
  int it = 0;
  bool converged = false;
  Eigen::SelfAdjointEigenSolver<Mat> es(n);
  for (; it < opt.max_iterations; ++it) {
    Mat x = la::hermitian_part(z - u + c / rho);
    add_kron_identity(x, (eye_in - trace_out(x, din, dout)) / dout, dout);
    es.compute(x + u);
    RVec w = es.eigenvalues().cwiseMax(0.0);
    Mat zn = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    u += x - zn;
    rp = (x - zn).norm();
    rd = rho * (zn - z).norm();
    z = std::move(zn);
    if (rp < opt.tol && rd < opt.tol) {
      converged = true;
      ++it;
      break;
    }
    if (it % 10 == 0) {
      if (rp > 10 * rd) {
        rho *= 2;
        u /= 2;
      } else if (rd > 10 * rp) {
        rho /= 2;
        u *= 2;
      }
    }
  }
  if (!converged && opt.require_convergence)
    throw NonConvergence("sdp_linear_step: ADMM did not converge", rp, rd);
  Mat xf = polish(z, din, dout);
  const double obj = (prob.cost.cwiseProduct(xf.transpose())).sum().real();
  return {ChoiMatrix(xf, din, dout), obj, it, rp, rd, converged, z};
}

Mat decoder_cost(const KrausChannel& encoded) {
  const int d = encoded.in_dim(), dout = encoded.out_dim();
  Mat a(dout * d, encoded.size());
  for (int k = 0; k < encoded.size(); ++k)
    for (int x = 0; x < dout; ++x)
      for (int mu = 0; mu < d; ++mu) a(x * d + mu, k) = encoded.ops()[k](x, mu);
  return a.conjugate() * a.transpose();
}

Mat encoder_cost(const KrausChannel& decoder, const KrausChannel& channel) {
  if (decoder.in_dim() != channel.out_dim()) throw DimensionMismatch("encoder_cost: decoder input");
  const int d = decoder.out_dim(), nc = channel.in_dim();
  Mat a(d * nc, static_cast<long>(decoder.size()) * channel.size());
  int col = 0;
  for (const auto& r : decoder.ops())
    for (const auto& k : channel.ops()) {
      Mat p = r * k;
      for (int mu = 0; mu < d; ++mu)
        for (int c = 0; c < nc; ++c) a(mu * nc + c, col) = p(mu, c);
      ++col;
    }
  return a.conjugate() * a.transpose();
}

ChoiMatrix random_encoding_init(int d, int code_dim, std::uint64_t seed) {
  if (d < 1 || code_dim < d) throw InvalidSpec("random_encoding_init needs 1 <= d <= code_dim");
  std::mt19937_64 rng(seed);
  KrausChannel enc({la::haar_isometry(code_dim, d, rng)}, d, code_dim);
  return kraus_to_choi(enc);
}

namespace {

KrausChannel encoded(const KrausChannel& channel, const KrausChannel& enc) {
  std::vector<Mat> ops;
  for (const auto& k : channel.ops())
    for (const auto& e : enc.ops()) ops.push_back(k * e);
  return KrausChannel(std::move(ops), enc.in_dim(), channel.out_dim());
}

double objective(const Mat& cost, const Mat& x) { return cost.cwiseProduct(x.transpose()).sum().real(); }

struct Run {
  ChoiMatrix enc;
  ChoiMatrix dec;
  OptimizationTrace trace;
};

Run single_run(const KrausChannel& channel, int d, const AlternatingOptions& opt, std::uint64_t seed) {
  const int nc = channel.in_dim(), dout = channel.out_dim();
  SdpOptions so;
  so.max_iterations = opt.step_iterations;
  so.tol = opt.step_tol;
  so.require_convergence = false;
  ChoiMatrix enc = random_encoding_init(d, nc, seed);
  std::optional<ChoiMatrix> dec;
  Mat enc_raw = enc.matrix(), dec_raw;
  OptimizationTrace tr{{}, 0, seed, false, 0};
  const double d2 = static_cast<double>(d) * d;
  for (int r = 0; r < opt.rounds; ++r) {
    Mat cd = decoder_cost(encoded(channel, choi_to_kraus(enc)));
    auto sd = sdp_linear_step({cd, dout, d}, so, dec ? &dec_raw : nullptr);
    if (!dec || sd.objective >= objective(cd, dec->matrix())) {
      dec = sd.choi;
      dec_raw = sd.raw;
    } else {
      ++tr.rejected_steps;
    }
    Mat ce = encoder_cost(choi_to_kraus(*dec), channel);
    auto se = sdp_linear_step({ce, d, nc}, so, &enc_raw);
    double f = objective(ce, enc.matrix());
    if (se.objective >= f) {
      enc = se.choi;
      enc_raw = se.raw;
      f = se.objective;
    } else {
      ++tr.rejected_steps;
    }
    tr.fidelity.push_back(f / d2);
  }
  tr.rounds = opt.rounds;
  const int n = static_cast<int>(tr.fidelity.size());
  tr.converged = n >= 10 && tr.fidelity[n - 1] - tr.fidelity[n - 10] < 1e-6;
  if (!dec) dec = kraus_to_choi(KrausChannel({Mat::Zero(d, dout)}, dout, d));
  return {enc, *dec, tr};
}

}  // namespace

AlternatingResult alternate_optimize(const KrausChannel& channel, int d, const AlternatingOptions& opt) {
  if (opt.rounds < 1 || opt.restarts < 1) throw InvalidSpec("alternate_optimize needs rounds, restarts >= 1");
  std::vector<std::optional<Run>> runs(opt.restarts);
  auto job = [&](int r) { runs[r] = single_run(channel, d, opt, opt.seed * 1000003ULL + r); };
  const int workers = std::clamp(opt.workers, 1, opt.restarts);
  if (workers == 1) {
    for (int r = 0; r < opt.restarts; ++r) job(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int r = w; r < opt.restarts; r += workers) job(r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  int best = 0;
  std::vector<double> finals;
  for (int r = 0; r < opt.restarts; ++r) {
    finals.push_back(runs[r]->trace.fidelity.back());
    if (finals[r] > finals[best]) best = r;
  }
  return {runs[best]->enc, runs[best]->dec, runs[best]->trace, best, finals};
}

KrausChannel optimizer_channel(const StateSpec& env, double theta, int code_nmax) {
  FockKet e = make_state(env, TruncatedBasis(std::max(1, suggest_nmax(env))));
  return compress_output(env_assisted_channel(e, theta, TruncatedBasis(code_nmax)));
}

AlternatingResult alternate_optimize(const StateSpec& env, double theta, int d, const AlternatingOptions& opt) {
  return alternate_optimize(optimizer_channel(env, theta, opt.code_nmax), d, opt);
}

SchemeEvaluation evaluate_scheme(const KrausChannel& channel, const ChoiMatrix& encoding,
                                 const ChoiMatrix& decoding, const CapacityOptions& cap) {
  const int d = encoding.in_dim();
  KrausChannel und = encoded(channel, choi_to_kraus(encoding));
  KrausChannel dec = compose(und, choi_to_kraus(decoding));
  DensityMatrix mixed = DensityMatrix::maximally_mixed(d);
  SchemeEvaluation ev;
  ev.fidelity = entanglement_fidelity(dec);
  ev.ic_undecoded = coherent_information(mixed, und);
  ev.ic_decoded = coherent_information(mixed, dec);
  ev.ic_undecoded_max = maximize_coherent_info(und, cap).value;
  ev.ic_decoded_max = maximize_coherent_info(dec, cap).value;
  return ev;
}

}  // namespace peaqc
