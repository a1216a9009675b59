// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

constexpr double kProbFloor = 1e-12;

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> activate(const Eigen::VectorXd& logits) {
  if (logits.size() == 1) return {sigmoid(logits[0])};
  const double mx = logits.maxCoeff();
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kWkNN: return "wknn";
    case ModelKind::kCnn: return "cnn";
    case ModelKind::kFcnn: return "fcnn";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "wknn") return ModelKind::kWkNN;
  if (name == "cnn") return ModelKind::kCnn;
  if (name == "fcnn") return ModelKind::kFcnn;
  throw ConfigError("unknown model kind '" + std::string(name) + "' (expected wknn|cnn|fcnn)");
}

std::string_view to_string(Normalization mode) {
  switch (mode) {
    case Normalization::kStd: return "std";
    case Normalization::kVariance: return "variance";
    case Normalization::kNone: return "none";
  }
  return "?";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "std") return Normalization::kStd;
  if (name == "variance") return Normalization::kVariance;
  if (name == "none") return Normalization::kNone;
  throw ConfigError("unknown normalization '" + std::string(name) +
                    "' (expected std|variance|none)");
}

void NetworkConfig::validate() const {
  if (segment_length < 1) throw ConfigError("segment length must be positive");
  if (num_classes < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (hidden < 1) throw ConfigError("hidden width must be positive");
  if (!has_front_end()) return;
  if (scales < 1 || kernel_length < 2 || pool_size < 1) {
    throw ConfigError("front end needs scales >= 1, kernel_length >= 2 and Q >= 1");
  }
  if (kind == ModelKind::kWkNN && (zeros < 0 || poles < 1)) {
    throw ConfigError("RGW front end needs p >= 0 and n >= 1");
  }
  if (kernel_length > segment_length) {
    throw ConfigError("kernel length " + std::to_string(kernel_length) +
                      " exceeds segment length " + std::to_string(segment_length));
  }
  if (pool_size > segment_length - kernel_length + 1) {
    throw ConfigError("Q=" + std::to_string(pool_size) + " exceeds the " +
                      std::to_string(segment_length - kernel_length + 1) +
                      " convolution outputs per scale");
  }
}

std::vector<TensorSlot> parameter_layout(const NetworkConfig& config) {
  std::vector<TensorSlot> slots;
  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    slots.push_back({std::move(name), offset, rows, cols});
    offset += static_cast<std::size_t>(rows) * cols;
  };
  switch (config.kind) {
    case ModelKind::kWkNN:
      add("rgw.zeros", 1, config.zeros);
      add("rgw.poles", config.poles, 2);
      add("rgw.log_dilations", 1, config.scales);
      break;
    case ModelKind::kCnn:
      add("conv.taps", config.scales, config.kernel_length);
      break;
    case ModelKind::kFcnn:
      break;
  }
  add("dense1.weight", config.hidden, config.input_width());
  add("dense1.bias", 1, config.hidden);
  add("dense2.weight", config.output_width(), config.hidden);
  add("dense2.bias", 1, config.output_width());
  return slots;
}

Network::Network(NetworkConfig config, std::vector<double> parameters)
    : config_(config), layout_(parameter_layout(config)), params_(std::move(parameters)) {
  config_.validate();
  const std::size_t expected = layout_.back().offset + layout_.back().size();
  if (params_.size() != expected) {
    throw ShapeError("parameter vector has " + std::to_string(params_.size()) +
                     " entries, layout expects " + std::to_string(expected));
  }
}

Network Network::initialize(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  const auto layout = parameter_layout(config);
  std::vector<double> params(layout.back().offset + layout.back().size(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  for (const TensorSlot& s : layout) {
    double* data = params.data() + s.offset;
    if (s.name == "rgw.zeros") {
      for (std::size_t i = 0; i < s.size(); ++i) data[i] = uniform(0.5, 2.0);
    } else if (s.name == "rgw.poles") {
      for (int j = 0; j < s.rows; ++j) {
        data[2 * j] = uniform(-1.0, 1.0);
        const double im = uniform(0.2, 1.0);
        data[2 * j + 1] = unit(rng) < 0.5 ? -im : im;
      }
    } else if (s.name == "rgw.log_dilations") {
      const double top = std::log(std::max(config.kernel_length / 4.0, 1.0));
      for (int k = 0; k < s.cols; ++k) {
        data[k] = s.cols == 1 ? 0.0 : top * k / (s.cols - 1);
      }
    } else if (s.name == "conv.taps" || s.name.ends_with(".weight")) {
      const double limit = std::sqrt(6.0 / s.cols);
      for (std::size_t i = 0; i < s.size(); ++i) data[i] = uniform(-limit, limit);
    }
  }
  return Network(config, std::move(params));
}

const TensorSlot& Network::slot(std::string_view name) const {
  for (const TensorSlot& s : layout_) {
    if (s.name == name) return s;
  }
  throw ConfigError("network has no tensor named '" + std::string(name) + "'");
}

std::span<const double> Network::tensor(std::string_view name) const {
  const TensorSlot& s = slot(name);
  return std::span<const double>(params_).subspan(s.offset, s.size());
}

int Network::front_end_parameter_count() const {
  switch (config_.kind) {
    case ModelKind::kWkNN: return config_.zeros + 2 * config_.poles + config_.scales;
    case ModelKind::kCnn: return config_.scales * config_.kernel_length;
    case ModelKind::kFcnn: return 0;
  }
  return 0;
}

WaveletParams Network::wavelet_params() const {
  if (config_.kind != ModelKind::kWkNN) throw ConfigError("network has no wavelet front end");
  return unflatten(params_.data(), config_.zeros, config_.poles, config_.scales);
}

int Network::apply_constraints() {
  if (config_.kind != ModelKind::kWkNN) return 0;
  const TensorSlot& s = slot("rgw.poles");
  int touched = 0;
  for (int j = 0; j < s.rows; ++j) {
    double& im = params_[s.offset + 2 * j + 1];
    if (std::abs(im) < kPoleGuard) {
      im = im < 0.0 ? -kPoleGuard : kPoleGuard;
      ++touched;
    }
  }
  return touched;
}

std::vector<double> Network::forward(std::span<const double> segment) const {
  return PreparedNetwork(*this).forward(segment);
}

int Network::predict(std::span<const double> segment) const {
  return predicted_class(forward(segment));
}

PreparedNetwork::PreparedNetwork(const Network& net) : net_(&net) {
  const NetworkConfig& cfg = net.config();
  if (cfg.kind == ModelKind::kWkNN) {
    rgw_.emplace(net.wavelet_params(), cfg.kernel_length, cfg.pool_size, cfg.normalization);
  } else if (cfg.kind == ModelKind::kCnn) {
    const auto taps = net.tensor("conv.taps");
    conv_.emplace(ConstRowMap(taps.data(), cfg.scales, cfg.kernel_length), cfg.pool_size,
                  cfg.normalization);
  }
}

std::vector<double> PreparedNetwork::forward(std::span<const double> segment,
                                             ForwardTrace* trace) const {
  const NetworkConfig& cfg = net_->config();
  if (static_cast<int>(segment.size()) != cfg.segment_length) {
    throw ShapeError("segment has " + std::to_string(segment.size()) +
                     " samples, network expects " + std::to_string(cfg.segment_length));
  }
  ForwardTrace local;
  ForwardTrace& t = trace != nullptr ? *trace : local;
  TransformCache* cache = trace != nullptr ? &t.front : nullptr;

  if (rgw_ || conv_) {
    const PooledFeatures pooled = rgw_ ? rgw_->forward(segment, cache) : conv_->forward(segment, cache);
    t.input = Eigen::Map<const Eigen::VectorXd>(pooled.values.data(), pooled.values.size());
  } else {
    t.input = Eigen::Map<const Eigen::VectorXd>(segment.data(), segment.size());
  }

  const auto w1 = net_->tensor("dense1.weight");
  const auto b1 = net_->tensor("dense1.bias");
  const auto w2 = net_->tensor("dense2.weight");
  const auto b2 = net_->tensor("dense2.bias");
  const int in = cfg.input_width();
  const int out = cfg.output_width();

  const Eigen::VectorXd a0 = t.input.cwiseMax(0.0);
  t.hidden = ConstRowMap(w1.data(), cfg.hidden, in) * a0 +
             Eigen::Map<const Eigen::VectorXd>(b1.data(), cfg.hidden);
  const Eigen::VectorXd a1 = t.hidden.cwiseMax(0.0);
  const Eigen::VectorXd logits =
      ConstRowMap(w2.data(), out, cfg.hidden) * a1 + Eigen::Map<const Eigen::VectorXd>(b2.data(), out);
  t.output = activate(logits);
  return t.output;
}

double PreparedNetwork::backward(const ForwardTrace& trace, int label,
                                 std::span<double> grad) const {
  const NetworkConfig& cfg = net_->config();
  if (grad.size() != net_->parameters().size()) {
    throw ShapeError("gradient buffer does not match the parameter vector");
  }
  if (label < 0 || label >= cfg.num_classes) {
    throw DataError("label " + std::to_string(label) + " outside [0, " +
                    std::to_string(cfg.num_classes) + ")");
  }
  const int in = cfg.input_width();
  const int out = cfg.output_width();
  const double loss = cross_entropy(trace.output, label);

  // Sigmoid+BCE and softmax+CE share the logit gradient p - y.
  Eigen::VectorXd d_logits(out);
  if (out == 1) {
    d_logits[0] = trace.output[0] - (label == 1 ? 1.0 : 0.0);
  } else {
    for (int i = 0; i < out; ++i) d_logits[i] = trace.output[i] - (i == label ? 1.0 : 0.0);
  }

  const TensorSlot& s_w1 = net_->slot("dense1.weight");
  const TensorSlot& s_b1 = net_->slot("dense1.bias");
  const TensorSlot& s_w2 = net_->slot("dense2.weight");
  const TensorSlot& s_b2 = net_->slot("dense2.bias");
  const auto params = net_->parameters();

  const Eigen::VectorXd a0 = trace.input.cwiseMax(0.0);
  const Eigen::VectorXd a1 = trace.hidden.cwiseMax(0.0);

  RowMap(grad.data() + s_w2.offset, out, cfg.hidden).noalias() += d_logits * a1.transpose();
  Eigen::Map<Eigen::VectorXd>(grad.data() + s_b2.offset, out) += d_logits;

  const ConstRowMap w2(params.data() + s_w2.offset, out, cfg.hidden);
  Eigen::VectorXd d_hidden = w2.transpose() * d_logits;
  for (int i = 0; i < cfg.hidden; ++i) {
    if (trace.hidden[i] <= 0.0) d_hidden[i] = 0.0;
  }

  RowMap(grad.data() + s_w1.offset, cfg.hidden, in).noalias() += d_hidden * a0.transpose();
  Eigen::Map<Eigen::VectorXd>(grad.data() + s_b1.offset, cfg.hidden) += d_hidden;

  if (!rgw_ && !conv_) return loss;

  const ConstRowMap w1(params.data() + s_w1.offset, cfg.hidden, in);
  Eigen::VectorXd d_input = w1.transpose() * d_hidden;
  for (int i = 0; i < in; ++i) {
    if (trace.input[i] <= 0.0) d_input[i] = 0.0;
  }
  const RowMatrix grad_pooled = Eigen::Map<const RowMatrix>(d_input.data(), cfg.scales, cfg.pool_size);

  if (rgw_) {
    const std::vector<double> g = rgw_->backward(grad_pooled, trace.front);
    const TensorSlot& first = net_->slot("rgw.zeros");
    for (std::size_t i = 0; i < g.size(); ++i) grad[first.offset + i] += g[i];
  } else {
    const RowMatrix g = conv_->backward_taps(grad_pooled, trace.front);
    const TensorSlot& taps = net_->slot("conv.taps");
    RowMap(grad.data() + taps.offset, cfg.scales, cfg.kernel_length) += g;
  }
  return loss;
}

int predicted_class(std::span<const double> output) {
  if (output.size() == 1) return output[0] >= 0.5 ? 1 : 0;
  return static_cast<int>(std::max_element(output.begin(), output.end()) - output.begin());
}

double cross_entropy(std::span<const double> probabilities, int label) {
  if (probabilities.size() == 1) {
    const double p = std::clamp(probabilities[0], kProbFloor, 1.0 - kProbFloor);
    const double y = label == 1 ? 1.0 : 0.0;
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  if (label < 0 || label >= static_cast<int>(probabilities.size())) {
    throw DataError("label " + std::to_string(label) + " outside the probability vector");
  }
  return -std::log(std::max(probabilities[label], kProbFloor));
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw ShapeError("parameter/gradient size mismatch");
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  } else if (m_.size() != params.size()) {
    throw StateError("optimizer state was created for a different parameter count");
  }
  ++t_;
  const auto& c = config_;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = c.beta1 * m_[i] + (1.0 - c.beta1) * grads[i];
    v_[i] = c.beta2 * v_[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = m_[i] / bias1;
    const double v_hat = v_[i] / bias2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

double clip_global_norm(std::span<double> grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

double batch_loss_and_gradient(const Network& net, std::span<const Segment* const> batch,
                               std::vector<double>& grad) {
  if (batch.empty()) throw DataError("empty batch");
  grad.assign(net.parameters().size(), 0.0);
  const PreparedNetwork prepared(net);
  ForwardTrace trace;
  double loss = 0.0;
  for (const Segment* seg : batch) {
    prepared.forward(seg->samples, &trace);
    loss += prepared.backward(trace, seg->label, grad);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= inv;
  return loss * inv;
}

double train_step(Network& net, std::span<const Segment* const> batch, AdamOptimizer& optimizer,
                  const TrainStepOptions& options) {
  std::vector<double> grad;
  const double loss = batch_loss_and_gradient(net, batch, grad);
  if (!std::isfinite(loss)) {
    throw TrainingError(options.batch_index,
                        "non-finite loss in batch " + std::to_string(options.batch_index));
  }
  const double norm = clip_global_norm(grad, options.clip_norm);
  if (!std::isfinite(norm)) {
    throw TrainingError(options.batch_index,
                        "non-finite gradient in batch " + std::to_string(options.batch_index));
  }
  optimizer.step(net.mutable_parameters(), grad);
  net.apply_constraints();
  return loss;
}

}  // namespace rgw
