#pragma once

#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace peaqc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

namespace la {

Mat hermitian_part(const Mat& a);

/// f applied to the spectrum of the Hermitian part of h.
Mat hermitian_function(const Mat& h, const std::function<double(double)>& f);

/// Square root of a PSD matrix; negative eigenvalues are clipped to zero.
Mat sqrt_psd(const Mat& a);

/// Pseudo-inverse square root: eigenvalues at or below cutoff are dropped.
Mat inv_sqrt_psd(const Mat& a, double cutoff = 1e-10, int* dropped = nullptr);

/// Nearest PSD matrix in Frobenius norm.
Mat project_psd(const Mat& a);

/// exp(g) for anti-Hermitian g, computed from the spectrum of i g so the result is unitary.
Mat expm_antihermitian(const Mat& g);

Mat kron(const Mat& a, const Mat& b);

/// Tr_B of an operator on A⊗B, index (i, b) -> i*db + b.
Mat ptrace_second(const Mat& x, int da, int db);
/// Tr_A of an operator on A⊗B.
Mat ptrace_first(const Mat& x, int da, int db);

double binary_entropy(double p);

/// Shannon entropy in bits of a spectrum; values below floor are ignored.
double entropy_of_spectrum(const RVec& ev, double floor = 1e-12);

/// Entropy in bits of a Hermitian PSD matrix after normalization to unit trace.
double entropy(const Mat& rho, double floor = 1e-12);

/// Entropy of W W† / Tr(W W†), using whichever Gram matrix of W is smaller.
double entropy_of_factor(const Mat& w, double floor = 1e-12);

double max_abs(const Mat& a);

/// Haar-distributed isometry with the given shape (rows >= cols).
Mat haar_isometry(int rows, int cols, std::mt19937_64& rng);

}  // namespace la
}  // namespace peaqc
