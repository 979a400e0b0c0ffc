#include "peaqc/linalg.hpp"

#include <cmath>

#include "peaqc/error.hpp"

namespace peaqc::la {

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat hermitian_function(const Mat& h, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  RVec ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = f(ev(i));
  const Mat& v = es.eigenvectors();
  return v * ev.asDiagonal() * v.adjoint();
}

Mat sqrt_psd(const Mat& a) {
  return hermitian_function(a, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

Mat inv_sqrt_psd(const Mat& a, double cutoff, int* dropped) {
  int n_drop = 0;
  Mat r = hermitian_function(a, [&](double x) {
    if (x <= cutoff) {
      ++n_drop;
      return 0.0;
    }
    return 1.0 / std::sqrt(x);
  });
  if (dropped) *dropped = n_drop;
  return r;
}

Mat project_psd(const Mat& a) {
  return hermitian_function(a, [](double x) { return x > 0 ? x : 0.0; });
}

Mat expm_antihermitian(const Mat& g) {
  Mat h = hermitian_part(kI * g);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec& ev = es.eigenvalues();
  Vec ph(ev.size());
  for (int i = 0; i < ev.size(); ++i) ph(i) = std::exp(-kI * ev(i));
  const Mat& v = es.eigenvectors();
  return v * ph.asDiagonal() * v.adjoint();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Mat ptrace_second(const Mat& x, int da, int db) {
  if (x.rows() != da * db || x.cols() != da * db)
    throw DimensionMismatch("ptrace_second: operator is not da*db square");
  Mat r = Mat::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) r(i, j) = x.block(i * db, j * db, db, db).trace();
  return r;
}

Mat ptrace_first(const Mat& x, int da, int db) {
  if (x.rows() != da * db || x.cols() != da * db)
    throw DimensionMismatch("ptrace_first: operator is not da*db square");
  Mat r = Mat::Zero(db, db);
  for (int i = 0; i < da; ++i) r += x.block(i * db, i * db, db, db);
  return r;
}

double binary_entropy(double p) {
  double h = 0;
  if (p > 0) h -= p * std::log2(p);
  if (p < 1) h -= (1 - p) * std::log2(1 - p);
  return h;
}

double entropy_of_spectrum(const RVec& ev, double floor) {
  double s = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > floor) s -= ev(i) * std::log2(ev(i));
  return s;
}

double entropy(const Mat& rho, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
  RVec ev = es.eigenvalues();
  double tr = ev.sum();
  if (tr <= 0) throw NotPositive("entropy: state has non-positive trace");
  return entropy_of_spectrum(ev / tr, floor);
}

double entropy_of_factor(const Mat& w, double floor) {
  Mat g = w.rows() <= w.cols() ? Mat(w * w.adjoint()) : Mat(w.adjoint() * w);
  return entropy(g, floor);
}

double max_abs(const Mat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

Mat haar_isometry(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) z(i, j) = cplx(nd(rng), nd(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ() * Mat::Identity(rows, cols);
  Mat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace peaqc::la
