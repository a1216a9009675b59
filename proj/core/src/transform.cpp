// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

struct RowMoments {
  double center = 0.0;
  double scale = 0.0;  // multiplier applied after centering; 0 => zero row
};

RowMoments standardize_row(double* row, Eigen::Index length, Normalization mode) {
  if (mode == Normalization::kNone) return {0.0, 1.0};
  double mean = 0.0;
  for (Eigen::Index i = 0; i < length; ++i) mean += row[i];
  mean /= static_cast<double>(length);
  double var = 0.0;
  for (Eigen::Index i = 0; i < length; ++i) {
    const double d = row[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(length);
  const double sd = std::sqrt(var);
  if (sd < kStdFloor) {
    std::fill(row, row + length, 0.0);
    return {mean, 0.0};
  }
  const double scale = mode == Normalization::kStd ? 1.0 / sd : 1.0 / var;
  for (Eigen::Index i = 0; i < length; ++i) row[i] = (row[i] - mean) * scale;
  return {mean, scale};
}

void check_pool_size(int q, Eigen::Index length) {
  if (q < 1 || q > length) {
    throw ShapeError("pool size Q=" + std::to_string(q) + " must lie in [1, " +
                     std::to_string(length) + "]");
  }
}

void pool_row(const double* row, Eigen::Index length, int q, double* values, int* indices,
              std::vector<int>& order) {
  order.resize(static_cast<std::size_t>(length));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + q, order.end(), [row](int a, int b) {
    const double ma = std::abs(row[a]);
    const double mb = std::abs(row[b]);
    return ma > mb || (ma == mb && a < b);
  });
  for (int i = 0; i < q; ++i) {
    indices[i] = order[i];
    values[i] = std::abs(row[order[i]]);
  }
}

struct SampledBank {
  RowMatrix kernels;
  std::vector<Eigen::MatrixXd> jacobians;
};

SampledBank sample_bank(const WaveletParams& params, int kernel_length) {
  SampledBank bank;
  bank.kernels.resize(params.num_scales(), kernel_length);
  bank.jacobians.reserve(params.num_scales());
  for (int k = 0; k < params.num_scales(); ++k) {
    auto sampled = sample_kernel_with_jacobian(params, k + 1, kernel_length);
    for (int j = 0; j < kernel_length; ++j) bank.kernels(k, j) = sampled.kernel.values[j];
    bank.jacobians.push_back(std::move(sampled.jacobian));
  }
  return bank;
}

}  // namespace

RowMatrix convolve_valid(std::span<const double> signal, const RowMatrix& kernels) {
  const auto n = static_cast<Eigen::Index>(signal.size());
  const Eigen::Index m = kernels.cols();
  if (m < 1 || n < m) {
    throw ShapeError("segment length " + std::to_string(n) + " is shorter than kernel length " +
                     std::to_string(m));
  }
  const Eigen::Index out_len = n - m + 1;
  RowMatrix out = RowMatrix::Zero(kernels.rows(), out_len);
  for (Eigen::Index k = 0; k < kernels.rows(); ++k) {
    double* dst = out.row(k).data();
    // Tap-outer order: every output accumulates j = 0..M-1 in sequence,
    // identical to the textbook double loop, while the inner loop vectorizes.
    for (Eigen::Index j = 0; j < m; ++j) {
      const double tap = kernels(k, m - 1 - j);
      const double* src = signal.data() + j;
      for (Eigen::Index tau = 0; tau < out_len; ++tau) dst[tau] += src[tau] * tap;
    }
  }
  return out;
}

RowMatrix sample_kernels(const WaveletParams& params, int kernel_length) {
  params.validate();
  RowMatrix kernels(params.num_scales(), kernel_length);
  for (int k = 0; k < params.num_scales(); ++k) {
    const SampledKernel kernel = sample_kernel(params, k + 1, kernel_length);
    for (int j = 0; j < kernel_length; ++j) kernels(k, j) = kernel.values[j];
  }
  return kernels;
}

FeatureMap wavelet_transform(std::span<const double> segment, const WaveletParams& params,
                             int kernel_length) {
  if (static_cast<int>(segment.size()) < kernel_length) {
    throw ShapeError("segment length " + std::to_string(segment.size()) +
                     " is shorter than kernel length " + std::to_string(kernel_length));
  }
  FeatureMap map;
  map.coefficients = convolve_valid(segment, sample_kernels(params, kernel_length));
  map.scales.reserve(params.num_scales());
  for (int k = 1; k <= params.num_scales(); ++k) map.scales.push_back(params.dilation(k));
  return map;
}

FeatureMap standardize(const FeatureMap& map, Normalization mode) {
  if (mode != Normalization::kNone && map.cols() < 2) {
    throw ShapeError("standardize needs at least 2 columns");
  }
  FeatureMap out = map;
  for (Eigen::Index k = 0; k < out.coefficients.rows(); ++k) {
    standardize_row(out.coefficients.row(k).data(), out.coefficients.cols(), mode);
  }
  return out;
}

PooledFeatures topq_pool(const FeatureMap& map, int q) {
  check_pool_size(q, map.coefficients.cols());
  PooledFeatures pooled;
  pooled.values.resize(map.coefficients.rows(), q);
  pooled.source_indices.resize(map.coefficients.rows(), q);
  std::vector<int> order;
  for (Eigen::Index k = 0; k < map.coefficients.rows(); ++k) {
    pool_row(map.coefficients.row(k).data(), map.coefficients.cols(), q,
             pooled.values.row(k).data(), pooled.source_indices.row(k).data(), order);
  }
  return pooled;
}

ConvPoolStage::ConvPoolStage(RowMatrix kernels, int pool_size, Normalization mode)
    : kernels_(std::move(kernels)), pool_size_(pool_size), mode_(mode) {
  if (kernels_.rows() < 1 || kernels_.cols() < 1) throw ShapeError("empty kernel bank");
  if (pool_size_ < 1) throw ShapeError("pool size must be positive");
}

PooledFeatures ConvPoolStage::forward(std::span<const double> segment,
                                      TransformCache* cache) const {
  RowMatrix coeffs = convolve_valid(segment, kernels_);
  const Eigen::Index length = coeffs.cols();
  check_pool_size(pool_size_, length);
  if (mode_ != Normalization::kNone && length < 2) {
    throw ShapeError("standardize needs at least 2 columns");
  }

  std::vector<double> centers(coeffs.rows());
  std::vector<double> scales(coeffs.rows());
  for (Eigen::Index k = 0; k < coeffs.rows(); ++k) {
    const RowMoments mom = standardize_row(coeffs.row(k).data(), length, mode_);
    centers[k] = mom.center;
    scales[k] = mom.scale;
  }

  PooledFeatures pooled;
  pooled.values.resize(coeffs.rows(), pool_size_);
  pooled.source_indices.resize(coeffs.rows(), pool_size_);
  std::vector<int> order;
  for (Eigen::Index k = 0; k < coeffs.rows(); ++k) {
    pool_row(coeffs.row(k).data(), length, pool_size_, pooled.values.row(k).data(),
             pooled.source_indices.row(k).data(), order);
  }

  if (cache != nullptr) {
    cache->segment.assign(segment.begin(), segment.end());
    cache->standardized = std::move(coeffs);
    cache->row_scale = std::move(scales);
    cache->row_center = std::move(centers);
    cache->source_indices = pooled.source_indices;
    cache->valid = true;
  }
  return pooled;
}

RowMatrix ConvPoolStage::backward_taps(const RowMatrix& grad_pooled,
                                       const TransformCache& cache) const {
  if (!cache.valid) throw StateError("backward called without a cached forward pass");
  const Eigen::Index rows = kernels_.rows();
  const Eigen::Index taps = kernels_.cols();
  const Eigen::Index length = cache.standardized.cols();
  if (grad_pooled.rows() != rows || grad_pooled.cols() != pool_size_ ||
      cache.standardized.rows() != rows) {
    throw ShapeError("upstream gradient shape does not match the pooled features");
  }

  RowMatrix grad_taps = RowMatrix::Zero(rows, taps);
  std::vector<double> grad_z(static_cast<std::size_t>(length));
  std::vector<double> grad_w(static_cast<std::size_t>(length));
  const double inv_len = 1.0 / static_cast<double>(length);

  for (Eigen::Index k = 0; k < rows; ++k) {
    const double scale = cache.row_scale[k];
    if (scale == 0.0) continue;
    const double* z = cache.standardized.row(k).data();

    // |.| routing: only the winners receive gradient, times sign(z); sign(0) = 0.
    std::fill(grad_z.begin(), grad_z.end(), 0.0);
    bool any = false;
    for (int q = 0; q < pool_size_; ++q) {
      const int idx = cache.source_indices(k, q);
      const double zi = z[idx];
      const double sign = zi > 0.0 ? 1.0 : (zi < 0.0 ? -1.0 : 0.0);
      grad_z[idx] += grad_pooled(k, q) * sign;
      any = any || (grad_pooled(k, q) != 0.0 && sign != 0.0);
    }
    if (!any) continue;

    switch (mode_) {
      case Normalization::kNone:
        grad_w = grad_z;
        break;
      case Normalization::kStd:
      case Normalization::kVariance: {
        double mean_g = 0.0;
        double mean_gz = 0.0;
        for (Eigen::Index i = 0; i < length; ++i) {
          mean_g += grad_z[i];
          mean_gz += grad_z[i] * z[i];
        }
        mean_g *= inv_len;
        mean_gz *= inv_len;
        // std:      dW = (g - mean(g) - z mean(g z)) / sd
        // variance: dW = (g - mean(g)) / var - 2 z mean(g z)
        const double z_coeff = mode_ == Normalization::kStd ? mean_gz * scale : 2.0 * mean_gz;
        for (Eigen::Index i = 0; i < length; ++i) {
          grad_w[i] = (grad_z[i] - mean_g) * scale - z[i] * z_coeff;
        }
        break;
      }
    }

    // out[tau] = sum_j x[tau + j] * kernel[M-1-j]
    //   => dkernel[M-1-j] = sum_tau dout[tau] * x[tau + j]
    for (Eigen::Index j = 0; j < taps; ++j) {
      const double* src = cache.segment.data() + j;
      double acc = 0.0;
      for (Eigen::Index tau = 0; tau < length; ++tau) acc += grad_w[tau] * src[tau];
      grad_taps(k, taps - 1 - j) = acc;
    }
  }
  return grad_taps;
}

RgwTransform::RgwTransform(WaveletParams params, int kernel_length, int pool_size,
                           Normalization mode)
    : params_(std::move(params)),
      kernel_length_(kernel_length),
      stage_([&] {
        SampledBank bank = sample_bank(params_, kernel_length_);
        jacobians_ = std::move(bank.jacobians);
        return ConvPoolStage(std::move(bank.kernels), pool_size, mode);
      }()) {}

PooledFeatures RgwTransform::forward(std::span<const double> segment,
                                     TransformCache* cache) const {
  return stage_.forward(segment, cache);
}

std::vector<double> RgwTransform::backward(const RowMatrix& grad_pooled,
                                           const TransformCache& cache) const {
  const RowMatrix grad_taps = stage_.backward_taps(grad_pooled, cache);
  const int shared = params_.num_zeros() + 2 * params_.num_poles();
  std::vector<double> grad(static_cast<std::size_t>(params_.num_learnable()), 0.0);
  for (int k = 0; k < params_.num_scales(); ++k) {
    const Eigen::VectorXd g = jacobians_[k].transpose() * grad_taps.row(k).transpose();
    for (int d = 0; d < shared; ++d) grad[d] += g[d];
    grad[shared + k] += g[shared];
  }
  return grad;
}

std::vector<double> transform_backward(const RowMatrix& grad_pooled, const TransformCache& cache,
                                       const RgwTransform& layer) {
  return layer.backward(grad_pooled, cache);
}

void write_feature_map_csv(std::ostream& out, const FeatureMap& map) {
  const auto old_precision = out.precision(17);
  out << "scale_index,lambda,tau,coefficient\n";
  for (Eigen::Index k = 0; k < map.coefficients.rows(); ++k) {
    const double lambda = k < static_cast<Eigen::Index>(map.scales.size()) ? map.scales[k] : 0.0;
    for (Eigen::Index tau = 0; tau < map.coefficients.cols(); ++tau) {
      out << (k + 1) << ',' << lambda << ',' << tau << ',' << map.coefficients(k, tau) << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace rgw
