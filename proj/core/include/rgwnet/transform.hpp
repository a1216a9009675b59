// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rgwnet/wavelet.hpp"

namespace rgw {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// m x L wavelet coefficients; row k belongs to scales[k].
struct FeatureMap {
  RowMatrix coefficients;
  std::vector<double> scales;

  int rows() const { return static_cast<int>(coefficients.rows()); }
  int cols() const { return static_cast<int>(coefficients.cols()); }
};

/// Per row, the Q largest magnitudes (descending) and the columns they came from.
struct PooledFeatures {
  RowMatrix values;
  IndexMatrix source_indices;
};

enum class Normalization {
  kStd,       // (W - mean) / std
  kVariance,  // (W - mean) / var, the literal form
  kNone,      // identity; for gradient tests
};

inline constexpr double kStdFloor = 1e-8;

/// Valid convolution of one signal with every row of `kernels` (m x M):
/// out[k][tau] = sum_j signal[tau + j] * kernels[k][M - 1 - j].
RowMatrix convolve_valid(std::span<const double> signal, const RowMatrix& kernels);

/// Samples all m kernels of the bank as an m x M matrix.
RowMatrix sample_kernels(const WaveletParams& params, int kernel_length);

/// The RGW layer transform: m x (N - M + 1) coefficients.
FeatureMap wavelet_transform(std::span<const double> segment, const WaveletParams& params,
                             int kernel_length);

/// Row-wise standardization. Rows whose std falls below kStdFloor become zero.
FeatureMap standardize(const FeatureMap& map, Normalization mode = Normalization::kStd);

/// Top-Q pooling of |coefficients|; ties go to the lower column.
PooledFeatures topq_pool(const FeatureMap& map, int q);

/// State kept by a forward pass for the matching backward pass.
struct TransformCache {
  std::vector<double> segment;
  RowMatrix standardized;        // after normalization (before |.|)
  std::vector<double> row_scale; // 1/std, 1/var, or 1; 0 marks a zeroed row
  std::vector<double> row_center;
  IndexMatrix source_indices;
  bool valid = false;
};

/// Convolution -> standardize -> top-Q pooling over an arbitrary kernel bank.
/// Shared by the RGW layer and the free-tap CNN baseline.
class ConvPoolStage {
 public:
  ConvPoolStage(RowMatrix kernels, int pool_size, Normalization mode = Normalization::kStd);

  PooledFeatures forward(std::span<const double> segment, TransformCache* cache = nullptr) const;

  /// dLoss/dkernels (m x M) given dLoss/dpooled (m x Q).
  RowMatrix backward_taps(const RowMatrix& grad_pooled, const TransformCache& cache) const;

  const RowMatrix& kernels() const { return kernels_; }
  int pool_size() const { return pool_size_; }
  Normalization normalization() const { return mode_; }

 private:
  RowMatrix kernels_;
  int pool_size_;
  Normalization mode_;
};

/// The learnable RGW feature layer. Kernels and their Jacobians are sampled
/// once at construction and reused for every segment.
class RgwTransform {
 public:
  RgwTransform(WaveletParams params, int kernel_length, int pool_size,
               Normalization mode = Normalization::kStd);

  PooledFeatures forward(std::span<const double> segment, TransformCache* cache = nullptr) const;

  /// Gradient for all p + 2n + m learnable scalars, in flatten() order.
  std::vector<double> backward(const RowMatrix& grad_pooled, const TransformCache& cache) const;

  const WaveletParams& params() const { return params_; }
  const ConvPoolStage& stage() const { return stage_; }
  int kernel_length() const { return kernel_length_; }

 private:
  WaveletParams params_;
  int kernel_length_;
  std::vector<Eigen::MatrixXd> jacobians_;
  ConvPoolStage stage_;
};

/// Free-function form of the RGW backward pass.
std::vector<double> transform_backward(const RowMatrix& grad_pooled, const TransformCache& cache,
                                       const RgwTransform& layer);

/// CSV with header `scale_index,lambda,tau,coefficient`, one record per
/// coefficient; scale_index is 1-based.
void write_feature_map_csv(std::ostream& out, const FeatureMap& map);

}  // namespace rgw
