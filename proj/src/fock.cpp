#include "peaqc/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peaqc/error.hpp"

namespace peaqc {

TruncatedBasis::TruncatedBasis(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw InvalidSpec("TruncatedBasis: n_max must be at least 1");
}

FockKet::FockKet(Vec amplitudes, TruncatedBasis basis, double leakage)
    : amps_(std::move(amplitudes)), basis_(basis), leakage_(leakage) {
  if (amps_.size() != basis_.dim())
    throw DimensionMismatch("FockKet: amplitude count does not match basis");
  double n = amps_.norm();
  if (!(n > 0)) throw InvalidSpec("FockKet: zero vector");
  amps_ /= n;
}

FockKet FockKet::number(int n, TruncatedBasis basis) {
  if (n < 0 || n > basis.n_max())
    throw TruncationTooSmall("Fock state |" + std::to_string(n) + "> outside basis");
  Vec v = Vec::Zero(basis.dim());
  v(n) = 1.0;
  return FockKet(v, basis);
}

cplx FockKet::inner(const FockKet& other) const {
  if (!(basis_ == other.basis_)) throw DimensionMismatch("FockKet::inner: basis mismatch");
  return amps_.dot(other.amps_);
}

FockOperator::FockOperator(Mat matrix, TruncatedBasis out, TruncatedBasis in)
    : m_(std::move(matrix)), out_(out), in_(in) {
  if (m_.rows() != out_.dim() || m_.cols() != in_.dim())
    throw DimensionMismatch("FockOperator: matrix shape does not match bases");
}

FockOperator FockOperator::operator*(const FockOperator& rhs) const {
  if (!(in_ == rhs.out_)) throw DimensionMismatch("FockOperator product: basis mismatch");
  return FockOperator(m_ * rhs.m_, out_, rhs.in_);
}

FockOperator FockOperator::adjoint() const { return FockOperator(m_.adjoint(), in_, out_); }

FockKet FockOperator::operator*(const FockKet& ket) const {
  if (!(in_ == ket.basis())) throw DimensionMismatch("FockOperator on ket: basis mismatch");
  return FockKet(m_ * ket.amplitudes(), out_);
}

double FockOperator::unitarity_defect(int retained) const {
  retained = std::min<int>(retained, static_cast<int>(m_.cols()));
  Mat c = m_.leftCols(retained);
  Mat g = c.adjoint() * c - Mat::Identity(retained, retained);
  return la::max_abs(g);
}

ModeOperators mode_operators(const TruncatedBasis& basis) {
  const int d = basis.dim();
  Mat a = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  Mat ad = a.adjoint();
  Mat x = (a + ad) / std::sqrt(2.0);
  Mat p = -kI * (a - ad) / std::sqrt(2.0);
  return {FockOperator(a, basis), FockOperator(ad, basis), FockOperator(x, basis),
          FockOperator(p, basis)};
}

FockOperator displacement(cplx alpha, const TruncatedBasis& basis) {
  const double r = std::abs(alpha);
  if (r * r + 6 * r + 10 > basis.n_max())
    throw TruncationTooSmall("displacement: |alpha|^2 + 6|alpha| + 10 exceeds n_max");
  if (r == 0) return FockOperator(Mat::Identity(basis.dim(), basis.dim()), basis);
  auto ops = mode_operators(basis);
  Mat g = alpha * ops.adag.matrix() - std::conj(alpha) * ops.a.matrix();
  return FockOperator(la::expm_antihermitian(g), basis);
}

FockOperator squeeze(double r, const TruncatedBasis& basis) {
  if (std::exp(2 * std::abs(r)) * 4 > basis.n_max())
    throw TruncationTooSmall("squeeze: 4 e^{2|r|} exceeds n_max");
  if (r == 0) return FockOperator(Mat::Identity(basis.dim(), basis.dim()), basis);
  auto ops = mode_operators(basis);
  const Mat& a = ops.a.matrix();
  const Mat& ad = ops.adag.matrix();
  Mat g = 0.5 * r * (a * a - ad * ad);
  return FockOperator(la::expm_antihermitian(g), basis);
}

FockOperator rotation(double phi, const TruncatedBasis& basis) {
  Vec d(basis.dim());
  for (int n = 0; n < basis.dim(); ++n) d(n) = std::exp(-kI * (phi * n));
  return FockOperator(Mat(d.asDiagonal()), basis);
}

BeamSplitter::BeamSplitter(double theta, int max_total) : theta_(theta) {
  if (!(theta >= 0 && theta <= kPi / 2 + 1e-15))
    throw InvalidSpec("beam splitter angle must lie in [0, pi/2]");
  if (max_total < 0) throw InvalidSpec("beam splitter: negative sector bound");
  blocks_.reserve(max_total + 1);
  for (int n = 0; n <= max_total; ++n) {
    // Generator a1† a2 − a1 a2† on |j, n−j⟩.
    Mat k = Mat::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) {
      double w = std::sqrt(static_cast<double>((j + 1) * (n - j)));
      k(j + 1, j) = w;
      k(j, j + 1) = -w;
    }
    blocks_.push_back(la::expm_antihermitian(theta * k).real());
  }
}

double BeamSplitter::eta() const { return std::cos(theta_) * std::cos(theta_); }

Mat BeamSplitter::apply(const Mat& psi) const {
  const int d1 = static_cast<int>(psi.rows()), d2 = static_cast<int>(psi.cols());
  if (d1 + d2 - 2 > max_total())
    throw DimensionMismatch("BeamSplitter::apply: grid exceeds stored sectors");
  Mat out = Mat::Zero(d1, d2);
  for (int n = 0; n <= d1 + d2 - 2; ++n) {
    const int lo = std::max(0, n - (d2 - 1)), hi = std::min(n, d1 - 1);
    const int len = hi - lo + 1;
    Vec x(len);
    for (int j = lo; j <= hi; ++j) x(j - lo) = psi(j, n - j);
    Vec y = blocks_[n].block(lo, lo, len, len).cast<cplx>() * x;
    for (int j = lo; j <= hi; ++j) out(j, n - j) = y(j - lo);
  }
  return out;
}

Mat BeamSplitter::dense(const TruncatedBasis& b1, const TruncatedBasis& b2) const {
  const int d1 = b1.dim(), d2 = b2.dim();
  if (d1 + d2 - 2 > max_total())
    throw DimensionMismatch("BeamSplitter::dense: bases exceed stored sectors");
  Mat u = Mat::Zero(d1 * d2, d1 * d2);
  for (int n = 0; n <= d1 + d2 - 2; ++n) {
    const int lo = std::max(0, n - (d2 - 1)), hi = std::min(n, d1 - 1);
    for (int i = lo; i <= hi; ++i)
      for (int j = lo; j <= hi; ++j) u(i * d2 + (n - i), j * d2 + (n - j)) = blocks_[n](i, j);
  }
  return u;
}

BeamSplitter beam_splitter(double theta, const TruncatedBasis& b1, const TruncatedBasis& b2) {
  return BeamSplitter(theta, b1.n_max() + b2.n_max());
}

void for_each_beam_splitter_column(double theta, int m1_max, int m2,
                                   const std::function<void(int, const RVec&)>& visit) {
  const double c = std::cos(theta), s = std::sin(theta);
  RVec v = RVec::Zero(m2 + 1);
  for (int j = 0; j <= m2; ++j) {
    if ((s == 0 && j > 0) || (c == 0 && j < m2)) continue;
    double lg = 0.5 * (std::lgamma(m2 + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m2 - j + 1.0));
    if (j > 0) lg += j * std::log(s);
    if (m2 - j > 0) lg += (m2 - j) * std::log(c);
    v(j) = std::exp(lg);
  }
  visit(0, v);
  for (int m1 = 0; m1 < m1_max; ++m1) {
    const int n = m1 + m2;
    RVec w = RVec::Zero(n + 2);
    const double inv = 1.0 / std::sqrt(m1 + 1.0);
    for (int j = 0; j <= n; ++j) {
      w(j + 1) += c * std::sqrt(j + 1.0) * v(j) * inv;
      w(j) -= s * std::sqrt(static_cast<double>(n - j + 1)) * v(j) * inv;
    }
    v.swap(w);
    visit(m1 + 1, v);
  }
}

Vec gaussian_amplitudes(cplx beta, double r, double phi, int n_max) {
  const cplx mu = std::exp(kI * phi) * std::cosh(r);
  const cplx nu = std::exp(-kI * phi) * std::sinh(r);
  const cplx gamma = mu * beta + nu * std::conj(beta);
  const cplx bc = std::conj(beta) * std::exp(-kI * phi);
  Vec c = Vec::Zero(n_max + 1);
  c(0) = std::exp(-0.5 * std::norm(beta) - 0.5 * std::tanh(r) * bc * bc) / std::sqrt(std::cosh(r));
  if (n_max >= 1) c(1) = gamma * c(0) / mu;
  for (int n = 1; n < n_max; ++n)
    c(n + 1) = (gamma * c(n) - nu * std::sqrt(static_cast<double>(n)) * c(n - 1)) /
               (mu * std::sqrt(n + 1.0));
  return c;
}

namespace {

struct PeakShape {
  double r;
  double phi;
};

// Squeezed vacuum R(φ)S(r)|0⟩ whose covariance is S_lat diag(Δ², Δ⁻²) S_latᵀ / 2.
PeakShape gkp_peak(const GkpLattice& lat, double delta) {
  const double sp = std::sqrt(kPi);
  Eigen::Matrix2d s;
  s << lat.v[0] / (2 * sp), lat.u[0] / (2 * sp), lat.v[1] / (2 * sp), lat.u[1] / (2 * sp);
  Eigen::Matrix2d v = s * Eigen::Vector2d(delta * delta, 1 / (delta * delta)).asDiagonal() *
                      s.transpose() / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(v);
  const double lmin = es.eigenvalues()(0);
  Eigen::Vector2d e = es.eigenvectors().col(0);
  return {-0.5 * std::log(2 * lmin), -std::atan2(e(1), e(0))};
}

double displacement_scale(const StateSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Coherent>) {
          return std::abs(s.alpha);
        } else if constexpr (std::is_same_v<T, Cat> || std::is_same_v<T, SqueezedCat>) {
          return std::abs(s.alpha);
        } else if constexpr (std::is_same_v<T, Comb>) {
          return std::abs(s.spacing) * (s.f.empty() ? 0.0 : s.f.size() - 1.0);
        } else {
          return 0.0;
        }
      },
      spec);
}

void validate(const StateSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Fock>) {
          if (s.n < 0) throw InvalidSpec("Fock: negative photon number");
        } else if constexpr (std::is_same_v<T, Cat>) {
          if (s.parity != 0 && s.parity != 1) throw InvalidSpec("Cat: parity must be 0 or 1");
          if (s.alpha == 0 && s.parity == 1) throw InvalidSpec("Cat: odd cat needs alpha != 0");
        } else if constexpr (std::is_same_v<T, Comb>) {
          if (s.f.empty()) throw InvalidSpec("Comb: empty amplitude list");
        } else if constexpr (std::is_same_v<T, ApproxGkp>) {
          if (!(s.delta > 0)) throw InvalidSpec("ApproxGkp: delta must be positive");
          if (s.logical != 0 && s.logical != 1) throw InvalidSpec("ApproxGkp: logical must be 0 or 1");
        } else if constexpr (std::is_same_v<T, FockSuperposition>) {
          if (s.terms.empty()) throw InvalidSpec("FockSuperposition: no terms");
          for (auto& t : s.terms)
            if (t.first < 0) throw InvalidSpec("FockSuperposition: negative photon number");
        }
      },
      spec);
}

int exact_support(const StateSpec& spec) {
  if (std::holds_alternative<Vacuum>(spec)) return 0;
  if (auto* f = std::get_if<Fock>(&spec)) return f->n;
  if (auto* fs = std::get_if<FockSuperposition>(&spec)) {
    int m = 0;
    for (auto& t : fs->terms) m = std::max(m, t.first);
    return m;
  }
  return -1;
}

Vec raw_amplitudes(const StateSpec& spec, int n) {
  return std::visit(
      [n](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Vacuum>) {
          Vec v = Vec::Zero(n + 1);
          v(0) = 1;
          return v;
        } else if constexpr (std::is_same_v<T, Fock>) {
          Vec v = Vec::Zero(n + 1);
          if (s.n <= n) v(s.n) = 1;
          return v;
        } else if constexpr (std::is_same_v<T, FockSuperposition>) {
          Vec v = Vec::Zero(n + 1);
          for (auto& t : s.terms)
            if (t.first <= n) v(t.first) += t.second;
          return v;
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return gaussian_amplitudes(s.alpha, 0, 0, n);
        } else if constexpr (std::is_same_v<T, Cat>) {
          const double sign = s.parity == 0 ? 1.0 : -1.0;
          return gaussian_amplitudes(s.alpha, 0, 0, n) + sign * gaussian_amplitudes(-s.alpha, 0, 0, n);
        } else if constexpr (std::is_same_v<T, SqueezedCat>) {
          const double b = s.alpha * std::exp(-s.r);
          return gaussian_amplitudes(b, s.r, 0, n) + gaussian_amplitudes(-b, s.r, 0, n);
        } else if constexpr (std::is_same_v<T, Comb>) {
          Vec v = Vec::Zero(n + 1);
          for (size_t j = 0; j < s.f.size(); ++j)
            if (s.f[j] != cplx(0))
              v += s.f[j] * gaussian_amplitudes(static_cast<double>(j) * s.spacing, s.r, 0, n);
          return v;
        } else {
          const GkpLattice lat = gkp_lattice(s.lattice);
          const PeakShape pk = gkp_peak(lat, s.delta);
          const double dv2 = lat.v[0] * lat.v[0] + lat.v[1] * lat.v[1];
          const double reach = std::sqrt(80.0 / (s.delta * s.delta * dv2 / 4)) + 2;
          Vec v = Vec::Zero(n + 1);
          for (int k = -static_cast<int>(reach); k <= static_cast<int>(reach); ++k) {
            const double t = (2 * k + s.logical) / 2.0;
            const double x = t * lat.v[0], p = t * lat.v[1];
            const double w = std::exp(-0.5 * s.delta * s.delta * (x * x + p * p));
            if (w < 1e-18) continue;
            v += w * gaussian_amplitudes(cplx(x, p) / std::sqrt(2.0), pk.r, pk.phi, n);
          }
          return v;
        }
      },
      spec);
}

// Amplitudes on a basis large enough that the top half carries negligible weight.
Vec converged_amplitudes(const StateSpec& spec, int at_least) {
  int n = std::max(64, at_least);
  for (;;) {
    Vec v = raw_amplitudes(spec, n);
    const double tot = v.squaredNorm();
    const double top = v.tail(n / 2).squaredNorm();
    if (tot > 0 && top <= 1e-18 * tot) return v;
    if (n > (1 << 15)) throw TruncationTooSmall("state energy too large to represent");
    n *= 2;
  }
}

int poisson_rule(const StateSpec& spec) {
  const double a = displacement_scale(spec);
  return static_cast<int>(std::ceil(a * a + 6 * a + 10));
}

}  // namespace

int suggest_nmax(const StateSpec& spec, double tol) {
  validate(spec);
  const int exact = exact_support(spec);
  if (exact >= 0) return std::max(1, exact);
  Vec v = converged_amplitudes(spec, 0);
  const double tot = v.squaredNorm();
  double tail = 0;
  int n = static_cast<int>(v.size()) - 1;
  while (n > 0 && tail + std::norm(v(n)) < tol * tot) {
    tail += std::norm(v(n));
    --n;
  }
  return std::max({1, n, poisson_rule(spec)});
}

FockKet make_state(const StateSpec& spec, const TruncatedBasis& basis) {
  validate(spec);
  const int exact = exact_support(spec);
  if (exact >= 0) {
    if (exact > basis.n_max())
      throw TruncationTooSmall("state support exceeds n_max = " + std::to_string(basis.n_max()));
    return FockKet(raw_amplitudes(spec, basis.n_max()), basis);
  }
  Vec v = converged_amplitudes(spec, basis.n_max() + 1);
  const double tot = v.squaredNorm();
  Vec head = v.head(basis.dim());
  const double leak = 1 - head.squaredNorm() / tot;
  if (leak > 1e-8)
    throw TruncationTooSmall("state leakage " + std::to_string(leak) + " at n_max = " +
                             std::to_string(basis.n_max()) + "; need about " +
                             std::to_string(suggest_nmax(spec)));
  return FockKet(head, basis, leak);
}

namespace {

struct GaussianFactors {
  double r, phi1, phi2;
};

GaussianFactors decompose(const GaussianParams& g) {
  if (std::abs(std::norm(g.u) - std::norm(g.v) - 1) > 1e-9)
    throw InvalidGaussianParams("Gaussian triple violates |u|^2 - |v|^2 = 1");
  const double r = std::asinh(std::abs(g.v));
  const double sum = -std::arg(g.u);
  const double diff = std::abs(g.v) > 0 ? -std::arg(-g.v) : 0.0;
  return {r, 0.5 * (sum + diff), 0.5 * (sum - diff)};
}

}  // namespace

FockOperator gaussian_unitary(const GaussianParams& g, const TruncatedBasis& basis) {
  auto f = decompose(g);
  // G = D(γ) R(φ1) S(r) R(φ2) has G† a G = e^{-i(φ1+φ2)} cosh r a − e^{-i(φ1−φ2)} sinh r a† + γ.
  auto ops = mode_operators(basis);
  Mat gd = g.gamma * ops.adag.matrix() - std::conj(g.gamma) * ops.a.matrix();
  const Mat& a = ops.a.matrix();
  const Mat& ad = ops.adag.matrix();
  Mat gs = 0.5 * f.r * (a * a - ad * ad);
  Mat m = la::expm_antihermitian(gd) * rotation(f.phi1, basis).matrix() *
          la::expm_antihermitian(gs) * rotation(f.phi2, basis).matrix();
  return FockOperator(m, basis);
}

double gaussian_conjugation_check(const GaussianParams& g1, const GaussianParams& g2,
                                  const GaussianParams& g1p, const GaussianParams& g2p,
                                  double theta, int n_max) {
  if (!(theta > 0 && theta < kPi / 2))
    throw InvalidGaussianParams("conjugation check needs theta in (0, pi/2)");
  TruncatedBasis b(n_max);
  const Mat G1 = gaussian_unitary(g1, b).matrix();
  const Mat G2 = gaussian_unitary(g2, b).matrix();
  const Mat G1p = gaussian_unitary(g1p, b).matrix();
  const Mat G2p = gaussian_unitary(g2p, b).matrix();
  BeamSplitter u = beam_splitter(theta, b, b);
  double worst = 0;
  for (int m1 = 0; m1 <= 2; ++m1)
    for (int m2 = 0; m2 <= 2; ++m2) {
      Mat psi = Mat::Zero(b.dim(), b.dim());
      psi(m1, m2) = 1;
      Mat lhs = u.apply(G1 * psi * G2.transpose());
      lhs = G1p.adjoint() * lhs * G2p.conjugate();
      Mat rhs = u.apply(psi);
      worst = std::max(worst, la::max_abs(lhs - rhs));
    }
  return worst;
}

}  // namespace peaqc
