// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace rgw {

/// Minimum allowed |Im(z)| for a pole. Poles on the real axis make the
/// mother wavelet non-integrable.
inline constexpr double kPoleGuard = 1e-3;

/// Learnable state of a rational Gaussian wavelet filter bank.
///
/// The mother wavelet is
///
///   psi(t) = C * t * prod_k (t - t_k)(t + t_k)
///              / prod_j (t - z_j)(t + z_j)(t - z~_j)(t + z~_j) * exp(-t^2 / 2)
///
/// with real zeros t_k, complex poles z_j and z~ = -Re(z) + i Im(z). Each of
/// the m filters is the mother wavelet dilated by lambda_k = exp(ell_k).
struct WaveletParams {
  std::vector<double> poly_zeros;
  std::vector<std::complex<double>> poles;
  std::vector<double> log_dilations;

  int num_zeros() const { return static_cast<int>(poly_zeros.size()); }
  int num_poles() const { return static_cast<int>(poles.size()); }
  int num_scales() const { return static_cast<int>(log_dilations.size()); }

  /// p + 2n + m: every learnable real scalar of the bank.
  int num_learnable() const { return num_zeros() + 2 * num_poles() + num_scales(); }

  /// p + 2n + 1: the columns of a single kernel's Jacobian.
  int kernel_jacobian_width() const { return num_zeros() + 2 * num_poles() + 1; }

  /// Dilation lambda_k of the 1-based scale index.
  double dilation(int scale_index) const;

  /// Throws InvalidParameterError if any structural invariant or the pole
  /// guard is violated.
  void validate() const;

  /// Moves every pole with |Im(z)| < kPoleGuard onto the guard, keeping the
  /// sign (zero goes to +kPoleGuard). Returns the number of poles touched.
  int apply_pole_guard();
};

/// One dilated, sampled and L2-normalized filter.
struct SampledKernel {
  std::vector<double> values;
  std::vector<double> grid;
  double dilation = 1.0;
  double norm_constant = 1.0;
};

/// Unnormalized mother wavelet P(t) v(t) exp(-t^2/2) (C = 1). Normalization
/// is a property of the sampled kernel, see sample_kernel().
double eval_mother(const WaveletParams& params, double t);

/// Denominator prod_j |t^2 - z_j^2|^2 of the rational term at real t.
double pole_denominator(const WaveletParams& params, double t);

/// Centered unit-step grid j - (M - 1)/2, j = 0..M-1.
std::vector<double> kernel_grid(int kernel_length);

/// Samples lambda^{-1/2} psi(grid / lambda) for the 1-based scale index and
/// rescales it to unit L2 norm.
SampledKernel sample_kernel(const WaveletParams& params, int scale_index, int kernel_length);

/// d(values)/d(theta), an M x (p + 2n + 1) matrix. Columns follow
/// [t_1..t_p, Re z_1, Im z_1, .., Re z_n, Im z_n, ell_k]. The derivative is
/// taken of the normalized kernel.
Eigen::MatrixXd kernel_jacobian(const WaveletParams& params, int scale_index, int kernel_length);

/// Samples the kernel and its Jacobian in one pass.
struct KernelWithJacobian {
  SampledKernel kernel;
  Eigen::MatrixXd jacobian;
};
KernelWithJacobian sample_kernel_with_jacobian(const WaveletParams& params, int scale_index,
                                               int kernel_length);

/// Packs params as [t.., (Re z, Im z).., ell..], the layout used for gradients.
std::vector<double> flatten(const WaveletParams& params);

/// Inverse of flatten() for the given (p, n, m).
WaveletParams unflatten(const double* data, int num_zeros, int num_poles, int num_scales);

}  // namespace rgw
