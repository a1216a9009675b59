// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors
//
// Reference computations for the test suites. Everything here is written
// directly from the defining formulas and deliberately shares no code path
// with the library beyond plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "rgwnet/wavelet.hpp"

namespace rgw::oracle {

/// Mother wavelet from the literal complex product, in long double.
inline long double mother(const WaveletParams& params, long double t) {
  using C = std::complex<long double>;
  long double poly = t;
  for (double tk : params.poly_zeros) poly *= (t - tk) * (t + tk);
  C denom = 1.0L;
  for (const auto& zd : params.poles) {
    const C z(zd.real(), zd.imag());
    const C zt(-z.real(), z.imag());
    denom *= (C(t) - z) * (C(t) + z) * (C(t) - zt) * (C(t) + zt);
  }
  const C value = C(poly * std::exp(-t * t / 2.0L)) / denom;
  return value.real();
}

/// Pointwise lambda^{-1/2} psi(grid / lambda), renormalized to unit L2.
inline std::vector<double> kernel(const WaveletParams& params, double lambda, int length) {
  std::vector<long double> raw(length);
  long double sq = 0.0L;
  for (int j = 0; j < length; ++j) {
    const long double g = j - (length - 1) / 2.0L;
    raw[j] = mother(params, g / lambda) / std::sqrt(static_cast<long double>(lambda));
    sq += raw[j] * raw[j];
  }
  std::vector<double> out(length);
  const long double norm = std::sqrt(sq);
  for (int j = 0; j < length; ++j) out[j] = static_cast<double>(raw[j] / norm);
  return out;
}

/// Textbook double loop for the valid convolution.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& k) {
  const std::size_t n = x.size();
  const std::size_t m = k.size();
  std::vector<double> out(n - m + 1);
  for (std::size_t tau = 0; tau + m <= n; ++tau) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += x[tau + j] * k[m - 1 - j];
    out[tau] = acc;
  }
  return out;
}

/// Population-moment standardization, accumulated in long double.
inline std::vector<double> standardize(const std::vector<double>& row, bool use_variance = false) {
  const double n = static_cast<double>(row.size());
  long double mean = 0.0L;
  for (double v : row) mean += v;
  mean /= n;
  long double var = 0.0L;
  for (double v : row) var += (v - mean) * (v - mean);
  var /= n;
  const long double sd = std::sqrt(var);
  std::vector<double> out(row.size(), 0.0);
  if (sd < 1e-8L) return out;
  const long double div = use_variance ? var : sd;
  for (std::size_t i = 0; i < row.size(); ++i) out[i] = static_cast<double>((row[i] - mean) / div);
  return out;
}

/// Full sort on (|x| desc, index asc), then truncate.
inline std::pair<std::vector<double>, std::vector<int>> topq(const std::vector<double>& row, int q) {
  std::vector<std::pair<double, int>> all;
  for (int i = 0; i < static_cast<int>(row.size()); ++i) all.emplace_back(std::abs(row[i]), i);
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> values;
  std::vector<int> idx;
  for (int i = 0; i < q; ++i) {
    values.push_back(all[i].first);
    idx.push_back(all[i].second);
  }
  return {values, idx};
}

/// y = W x + b with W row-major (rows x cols).
inline std::vector<double> dense(const std::vector<double>& w, const std::vector<double>& b,
                                 const std::vector<double>& x) {
  const std::size_t rows = b.size();
  const std::size_t cols = x.size();
  std::vector<double> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    for (std::size_t c = 0; c < cols; ++c) acc += w[r * cols + c] * x[c];
    y[r] = acc;
  }
  return y;
}

inline std::vector<double> relu(std::vector<double> x) {
  for (double& v : x) v = std::max(v, 0.0);
  return x;
}

/// Central finite-difference gradient of f at x.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

/// max|a - b| / max|b| (denominator floored at `floor`).
inline double rel_error(const std::vector<double>& a, const std::vector<double>& b,
                        double floor = 1e-12) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / std::max(scale, floor);
}

/// Parameter draw from the same ranges the network initializer uses.
inline WaveletParams random_params(std::mt19937_64& rng, int p, int n, int m, int kernel_length) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WaveletParams params;
  for (int k = 0; k < p; ++k) params.poly_zeros.push_back(0.5 + 1.5 * u(rng));
  for (int j = 0; j < n; ++j) {
    const double im = 0.2 + 0.8 * u(rng);
    params.poles.emplace_back(-1.0 + 2.0 * u(rng), u(rng) < 0.5 ? -im : im);
  }
  const double top = std::log(std::max(kernel_length / 4.0, 1.0));
  for (int k = 0; k < m; ++k) {
    params.log_dilations.push_back(top * (m == 1 ? 0.5 : static_cast<double>(k) / (m - 1)) +
                                   0.1 * (u(rng) - 0.5));
  }
  return params;
}

}  // namespace rgw::oracle
