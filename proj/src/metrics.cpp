#include "peaqc/metrics.hpp"

#include <cmath>
#include <random>

#include "peaqc/error.hpp"

namespace peaqc {

double von_neumann_entropy(const DensityMatrix& rho) { return la::entropy(rho.matrix()); }

double entanglement_fidelity_raw(const KrausChannel& ch) {
  if (ch.in_dim() != ch.out_dim()) throw DimensionMismatch("entanglement fidelity needs in_dim == out_dim");
  const double d = ch.in_dim();
  double s = 0;
  for (const auto& k : ch.ops()) s += std::norm(k.trace());
  return s / (d * d);
}

double entanglement_fidelity(const KrausChannel& ch) {
  const double raw = entanglement_fidelity_raw(ch);
  double tr = 0;
  for (const auto& k : ch.ops()) tr += k.squaredNorm();
  tr /= ch.in_dim();
  if (!(tr > 0)) throw NotPositive("entanglement fidelity: channel annihilates every input");
  return raw / tr;
}

double entanglement_fidelity(const ChoiMatrix& j) {
  if (j.in_dim() != j.out_dim()) throw DimensionMismatch("entanglement fidelity needs in_dim == out_dim");
  const int d = j.in_dim();
  cplx s = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s += j.matrix()(a * d + a, b * d + b);
  const double tr = j.matrix().trace().real();
  if (!(tr > 0)) throw NotPositive("entanglement fidelity: zero Choi matrix");
  return s.real() / (d * tr);
}

namespace {

Mat stacked_factor(const KrausChannel& ch, const Mat& sqrt_rho) {
  const int din = ch.in_dim();
  Mat w(ch.out_dim(), static_cast<long>(din) * ch.size());
  for (int k = 0; k < ch.size(); ++k) w.middleCols(k * din, din).noalias() = ch.ops()[k] * sqrt_rho;
  return w;
}

}  // namespace

double coherent_information(const DensityMatrix& rho, const KrausChannel& ch, const KrausChannel& comp) {
  if (rho.dim() != ch.in_dim() || rho.dim() != comp.in_dim())
    throw DimensionMismatch("coherent_information: input dimension mismatch");
  Mat s = la::sqrt_psd(rho.matrix());
  return la::entropy_of_factor(stacked_factor(ch, s)) - la::entropy_of_factor(stacked_factor(comp, s));
}

double coherent_information(const DensityMatrix& rho, const KrausChannel& ch) {
  if (rho.dim() != ch.in_dim()) throw DimensionMismatch("coherent_information: input dimension mismatch");
  Mat s = la::sqrt_psd(rho.matrix());
  const int din = ch.in_dim(), dout = ch.out_dim(), nk = ch.size();
  Mat ws = stacked_factor(ch, s);
  Mat we(nk, static_cast<long>(dout) * din);
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < din; ++i)
      for (int a = 0; a < dout; ++a) we(k, a * din + i) = ws(a, k * din + i);
  return la::entropy_of_factor(ws) - la::entropy_of_factor(we);
}

double coherent_information(const DensityMatrix& rho, const ChoiMatrix& j) {
  const int din = j.in_dim(), dout = j.out_dim();
  if (rho.dim() != din) throw DimensionMismatch("coherent_information: input dimension mismatch");
  Mat rt = rho.matrix().transpose();
  Mat out = la::ptrace_first(la::kron(rt, Mat::Identity(dout, dout)) * j.matrix(), din, dout);
  Mat sr = la::kron(la::sqrt_psd(rt), Mat::Identity(dout, dout));
  Mat joint = sr * j.matrix() * sr;
  return la::entropy(la::hermitian_part(out)) - la::entropy(la::hermitian_part(joint));
}

QecMatrix qec_matrix(const Mat& kets, const KrausChannel& ch) {
  if (kets.rows() != ch.in_dim()) throw DimensionMismatch("qec_matrix: kets do not match channel input");
  const int d = static_cast<int>(kets.cols()), nk = ch.size();
  Mat l(ch.out_dim(), static_cast<long>(nk) * d);
  for (int k = 0; k < nk; ++k) l.middleCols(k * d, d).noalias() = ch.ops()[k] * kets;
  Mat g = l.adjoint() * l;
  Mat m(d * nk, d * nk);
  for (int mu = 0; mu < d; ++mu)
    for (int k = 0; k < nk; ++k)
      for (int nu = 0; nu < d; ++nu)
        for (int q = 0; q < nk; ++q) m(mu * nk + k, nu * nk + q) = g(k * d + mu, q * d + nu);
  return {m, d, nk};
}

QecMatrix qec_matrix(const KrausChannel& ch) {
  return qec_matrix(Mat::Identity(ch.in_dim(), ch.in_dim()), ch);
}

namespace {

Mat trace_logical(const Mat& x, int d, int nk) {
  Mat t = Mat::Zero(nk, nk);
  for (int mu = 0; mu < d; ++mu) t += x.block(mu * nk, mu * nk, nk, nk);
  return t;
}

}  // namespace

PetzCheck petz_optimality_check(const QecMatrix& m) {
  Mat s = la::sqrt_psd(m.m);
  Mat b = la::kron(Mat::Identity(m.d, m.d), trace_logical(s, m.d, m.k));
  const double n = (s * b - b * s).norm();
  return {n, n < 1e-8};
}

OptimalFidelity optimal_fidelity_from_M(const QecMatrix& m) {
  Mat t = trace_logical(la::sqrt_psd(m.m), m.d, m.k);
  const double v = t.squaredNorm() / (static_cast<double>(m.d) * m.d);
  return {v, petz_optimality_check(m).holds};
}

namespace {

// ρ = TT†/Tr(TT†) with T lower triangular; real diagonal, complex below.
Mat rho_from_params(const RVec& x, int d) {
  Mat t = Mat::Zero(d, d);
  int p = 0;
  for (int i = 0; i < d; ++i) t(i, i) = x(p++);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) {
      t(i, j) = cplx(x(p), x(p + 1));
      p += 2;
    }
  Mat r = t * t.adjoint();
  return r / r.trace().real();
}

template <class F>
struct Ascent {
  F f;
  const CapacityOptions& opt;
  int iterations = 0;

  double run(RVec& x) {
    double fx = f(x);
    double step = 0.1;
    for (int it = 0; it < opt.max_iterations; ++it) {
      ++iterations;
      RVec g(x.size());
      for (int i = 0; i < x.size(); ++i) {
        RVec y = x;
        y(i) += opt.fd_step;
        g(i) = (f(y) - fx) / opt.fd_step;
      }
      const double gn = g.norm();
      if (!(gn > 1e-12)) break;
      bool moved = false;
      while (step > 1e-12) {
        RVec y = x + (step / gn) * g;
        const double fy = f(y);
        if (fy > fx + 1e-4 * step * gn) {
          const double gain = fy - fx;
          x = y;
          fx = fy;
          moved = true;
          step *= 2;
          if (gain < opt.tol) return fx;
          break;
        }
        step /= 2;
      }
      if (!moved) break;
    }
    return fx;
  }
};

}  // namespace

CapacityEstimate maximize_coherent_info(const KrausChannel& ch, const KrausChannel& comp,
                                        const CapacityOptions& opt) {
  const int d = ch.in_dim();
  if (d > 4) throw InvalidSpec("maximize_coherent_info supports d <= 4");
  if (comp.in_dim() != d) throw DimensionMismatch("maximize_coherent_info: complement input mismatch");
  auto f = [&](const RVec& x) {
    return coherent_information(DensityMatrix(la::hermitian_part(rho_from_params(x, d))), ch, comp);
  };
  Ascent<decltype(f)> ascent{f, opt};
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CapacityEstimate est{-1e300, Mat(), 0.0, {}, 0, 0};
  for (int s = 0; s < opt.starts; ++s) {
    RVec x = RVec::Zero(d * d);
    if (s == 0) {
      x.head(d).setConstant(1 / std::sqrt(static_cast<double>(d)));
    } else if (s <= d) {
      x(s - 1) = 1;
    } else {
      for (int i = 0; i < x.size(); ++i) x(i) = nd(rng);
      x.head(d) = x.head(d).cwiseAbs();
    }
    if (s == 0) est.mixed_baseline = f(x);
    const double v = ascent.run(x);
    est.start_values.push_back(v);
    if (v > est.value) {
      est.value = v;
      est.argmax = rho_from_params(x, d);
    }
  }
  est.starts = opt.starts;
  est.iterations = ascent.iterations;
  return est;
}

CapacityEstimate maximize_coherent_info(const KrausChannel& ch, const CapacityOptions& opt) {
  return maximize_coherent_info(ch, ch.complement(), opt);
}

}  // namespace peaqc
