/*
 * Copyright 2026 The reclab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reclab/numeric.hpp"

namespace reclab {

enum class Arch : std::uint32_t { kLinear = 0, kMlp = 1 };
enum class Activation : std::uint32_t { kRelu = 0, kTanh = 1 };

Arch parse_arch(std::string_view name);
Activation parse_activation(std::string_view name);
std::string_view to_string(Arch arch);
std::string_view to_string(Activation act);

// Parameters of a linear softmax classifier (Z = XW + b) or a one-hidden-layer
// MLP (Z = act(X W1 + b1) W2 + b2). All arrays live in one flat buffer in
// declaration order: W1 (D x H or D x C), b1, then for the MLP W2 (H x C), b2.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(Arch arch, std::size_t input_dim, std::size_t hidden, std::size_t num_classes,
              Activation act = Activation::kRelu);

  Arch arch() const noexcept { return arch_; }
  Activation activation() const noexcept { return act_; }
  std::size_t input_dim() const noexcept { return d_; }
  // 0 for the linear model.
  std::size_t hidden() const noexcept { return h_; }
  std::size_t num_classes() const noexcept { return c_; }

  // Width of the first affine layer's output.
  std::size_t first_width() const noexcept { return arch_ == Arch::kLinear ? c_ : h_; }

  std::span<double> w1() noexcept { return slice(0, d_ * first_width()); }
  std::span<double> b1() noexcept { return slice(d_ * first_width(), first_width()); }
  std::span<double> w2() noexcept { return slice(w2_offset(), h_ * c_); }
  std::span<double> b2() noexcept { return slice(w2_offset() + h_ * c_, c_); }
  std::span<const double> w1() const noexcept { return slice(0, d_ * first_width()); }
  std::span<const double> b1() const noexcept { return slice(d_ * first_width(), first_width()); }
  std::span<const double> w2() const noexcept { return slice(w2_offset(), h_ * c_); }
  std::span<const double> b2() const noexcept { return slice(w2_offset() + h_ * c_, c_); }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  std::size_t num_params() const noexcept { return data_.size(); }

  // A zeroed buffer of the same shape, used for gradients.
  ModelParams zeros_like() const;

  // FNV-1a over the raw parameter bytes and shape.
  std::uint64_t fingerprint() const noexcept;

  bool operator==(const ModelParams&) const = default;

 private:
  std::size_t w2_offset() const noexcept { return d_ * first_width() + first_width(); }
  std::span<double> slice(std::size_t off, std::size_t len) noexcept {
    return {data_.data() + off, len};
  }
  std::span<const double> slice(std::size_t off, std::size_t len) const noexcept {
    return {data_.data() + off, len};
  }

  Arch arch_ = Arch::kLinear;
  Activation act_ = Activation::kRelu;
  std::size_t d_ = 0;
  std::size_t h_ = 0;
  std::size_t c_ = 0;
  std::vector<double> data_;
};

// Uniform(-sqrt(3/fan_in), sqrt(3/fan_in)) weights, zero biases. The same
// seed always gives bit-identical parameters. `hidden` is ignored for the
// linear model.
ModelParams init_model(std::uint64_t seed, Arch arch, std::size_t input_dim, std::size_t hidden,
                       std::size_t num_classes, Activation act = Activation::kRelu);

struct ForwardCache {
  std::uint64_t params_fingerprint = 0;
  Matrix input;
  Matrix pre_activation;  // MLP only: X W1 + b1
  Matrix hidden;          // MLP only: act(pre_activation)
};

struct ForwardResult {
  Matrix logits;
  ForwardCache cache;
};

ForwardResult forward(const ModelParams& params, const Matrix& features);

// Logits only, without keeping the cache.
Matrix predict_logits(const ModelParams& params, const Matrix& features);

// Gradients of the loss with respect to every parameter given dZ =
// d(loss)/d(logits). Throws InvalidState if the cache came from different
// parameters.
ModelParams backward(const ModelParams& params, const ForwardCache& cache, const Matrix& dlogits);

// Binary checkpoint: 8-byte magic "RCLMODEL", then little-endian u32 arch,
// u64 D, u64 H, u64 C, u32 activation, then every parameter as a
// little-endian f64 in flat order.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace reclab
