// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

void check_poles(const WaveletParams& params) {
  if (params.poles.empty()) {
    throw InvalidParameterError("wavelet needs at least one pole (n >= 1)");
  }
  for (std::size_t j = 0; j < params.poles.size(); ++j) {
    const auto z = params.poles[j];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw InvalidParameterError("pole " + std::to_string(j + 1) + " is not finite");
    }
    if (std::abs(z.imag()) < kPoleGuard) {
      throw InvalidParameterError("pole " + std::to_string(j + 1) +
                                  " is on or too near the real axis (|Im z| < 1e-3)");
    }
  }
}

// |s^2 - z^2|^2 for real s, written in real arithmetic:
// with z = a + ib, u = s^2 - a^2 + b^2 the quartic factor is u^2 + 4 a^2 b^2.
struct QuarticFactor {
  double value;
  double d_a;
  double d_b;
  double d_s;
};

QuarticFactor quartic(double s, std::complex<double> z) {
  const double a = z.real();
  const double b = z.imag();
  const double u = s * s - a * a + b * b;
  return {u * u + 4.0 * a * a * b * b,
          -4.0 * a * u + 8.0 * a * b * b,
          4.0 * b * u + 8.0 * a * a * b,
          4.0 * s * u};
}

void check_scale(const WaveletParams& params, int scale_index, int kernel_length) {
  if (scale_index < 1 || scale_index > params.num_scales()) {
    throw IndexError("scale index " + std::to_string(scale_index) + " outside 1.." +
                     std::to_string(params.num_scales()));
  }
  if (kernel_length < 2) {
    throw InvalidParameterError("kernel length must be at least 2");
  }
}

// Samples the raw wavelet (and, if requested, its raw parameter derivatives)
// on the dilated grid. All samples share one positive factor exp(s0^2 / 2),
// s0 = min |s|, which keeps the Gaussian away from underflow; normalization
// removes it again.
KernelWithJacobian sample_impl(const WaveletParams& params, int scale_index, int kernel_length,
                               bool with_jacobian) {
  params.validate();
  check_scale(params, scale_index, kernel_length);

  const int p = params.num_zeros();
  const int n = params.num_poles();
  const int width = params.kernel_jacobian_width();
  const double lambda = params.dilation(scale_index);

  KernelWithJacobian out;
  SampledKernel& kernel = out.kernel;
  kernel.grid = kernel_grid(kernel_length);
  kernel.dilation = lambda;
  kernel.values.resize(kernel_length);

  double s0 = std::numeric_limits<double>::infinity();
  for (double g : kernel.grid) s0 = std::min(s0, std::abs(g) / lambda);

  Eigen::MatrixXd raw_jac;
  if (with_jacobian) raw_jac.setZero(kernel_length, width);

  std::vector<double> zero_terms(p);
  for (int row = 0; row < kernel_length; ++row) {
    const double s = kernel.grid[row] / lambda;
    const double s2 = s * s;
    const double gauss = std::exp(-(s2 - s0 * s0) / 2.0);

    double zeros_prod = 1.0;
    for (int k = 0; k < p; ++k) {
      zero_terms[k] = s2 - params.poly_zeros[k] * params.poly_zeros[k];
      zeros_prod *= zero_terms[k];
    }
    double denom = 1.0;
    double log_denom_ds = 0.0;
    for (int j = 0; j < n; ++j) {
      const QuarticFactor q = quartic(s, params.poles[j]);
      denom *= q.value;
      log_denom_ds += q.d_s / q.value;
    }
    const double poly = s * zeros_prod;
    const double r = poly * gauss / denom;
    kernel.values[row] = r;
    if (!with_jacobian) continue;

    const double scale = gauss / denom;
    // d/dt_k: remove factor k from the product instead of dividing by it,
    // so samples sitting exactly on a zero stay well defined.
    double poly_ds = zeros_prod;
    for (int k = 0; k < p; ++k) {
      double others = 1.0;
      for (int i = 0; i < p; ++i) {
        if (i != k) others *= zero_terms[i];
      }
      raw_jac(row, k) = -2.0 * params.poly_zeros[k] * s * others * scale;
      poly_ds += 2.0 * s2 * others;
    }
    for (int j = 0; j < n; ++j) {
      const QuarticFactor q = quartic(s, params.poles[j]);
      raw_jac(row, p + 2 * j) = -r * q.d_a / q.value;
      raw_jac(row, p + 2 * j + 1) = -r * q.d_b / q.value;
    }
    // ds/d(ell) = -s since s = grid * exp(-ell).
    const double dr_ds = scale * (poly_ds - s * poly - poly * log_denom_ds);
    raw_jac(row, width - 1) = -s * dr_ds;
  }

  double sum_sq = 0.0;
  for (double v : kernel.values) sum_sq += v * v;
  const double norm = std::sqrt(sum_sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidParameterError("sampled kernel at scale " + std::to_string(scale_index) +
                                " has zero or non-finite norm");
  }
  for (double& v : kernel.values) v /= norm;
  kernel.norm_constant = std::sqrt(lambda) * std::exp(s0 * s0 / 2.0) / norm;

  if (with_jacobian) {
    // d(r / |r|) = (I - v v^T) dr / |r|
    const Eigen::Map<const Eigen::VectorXd> v(kernel.values.data(), kernel_length);
    raw_jac /= norm;
    const Eigen::RowVectorXd proj = v.transpose() * raw_jac;
    out.jacobian = raw_jac - v * proj;
  }
  return out;
}

}  // namespace

double WaveletParams::dilation(int scale_index) const {
  if (scale_index < 1 || scale_index > num_scales()) {
    throw IndexError("scale index " + std::to_string(scale_index) + " outside 1.." +
                     std::to_string(num_scales()));
  }
  return std::exp(log_dilations[scale_index - 1]);
}

void WaveletParams::validate() const {
  if (log_dilations.empty()) {
    throw InvalidParameterError("wavelet bank needs at least one scale (m >= 1)");
  }
  for (double t : poly_zeros) {
    if (!std::isfinite(t)) throw InvalidParameterError("polynomial zero is not finite");
  }
  for (double ell : log_dilations) {
    if (!std::isfinite(ell)) throw InvalidParameterError("log-dilation is not finite");
  }
  check_poles(*this);
}

int WaveletParams::apply_pole_guard() {
  int touched = 0;
  for (auto& z : poles) {
    if (std::abs(z.imag()) < kPoleGuard) {
      z.imag(z.imag() < 0.0 ? -kPoleGuard : kPoleGuard);
      ++touched;
    }
  }
  return touched;
}

double pole_denominator(const WaveletParams& params, double t) {
  double denom = 1.0;
  for (const auto& z : params.poles) denom *= quartic(t, z).value;
  return denom;
}

double eval_mother(const WaveletParams& params, double t) {
  check_poles(params);
  double poly = t;
  for (double tk : params.poly_zeros) poly *= (t - tk) * (t + tk);
  return poly * std::exp(-t * t / 2.0) / pole_denominator(params, t);
}

std::vector<double> kernel_grid(int kernel_length) {
  std::vector<double> grid(static_cast<std::size_t>(std::max(kernel_length, 0)));
  const double center = (kernel_length - 1) / 2.0;
  for (int j = 0; j < kernel_length; ++j) grid[j] = j - center;
  return grid;
}

SampledKernel sample_kernel(const WaveletParams& params, int scale_index, int kernel_length) {
  return sample_impl(params, scale_index, kernel_length, false).kernel;
}

Eigen::MatrixXd kernel_jacobian(const WaveletParams& params, int scale_index, int kernel_length) {
  return sample_impl(params, scale_index, kernel_length, true).jacobian;
}

KernelWithJacobian sample_kernel_with_jacobian(const WaveletParams& params, int scale_index,
                                               int kernel_length) {
  return sample_impl(params, scale_index, kernel_length, true);
}

std::vector<double> flatten(const WaveletParams& params) {
  std::vector<double> out;
  out.reserve(params.num_learnable());
  out.insert(out.end(), params.poly_zeros.begin(), params.poly_zeros.end());
  for (const auto& z : params.poles) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
  out.insert(out.end(), params.log_dilations.begin(), params.log_dilations.end());
  return out;
}

WaveletParams unflatten(const double* data, int num_zeros, int num_poles, int num_scales) {
  WaveletParams params;
  params.poly_zeros.assign(data, data + num_zeros);
  data += num_zeros;
  params.poles.resize(num_poles);
  for (int j = 0; j < num_poles; ++j) params.poles[j] = {data[2 * j], data[2 * j + 1]};
  data += 2 * num_poles;
  params.log_dilations.assign(data, data + num_scales);
  return params;
}

}  // namespace rgw
