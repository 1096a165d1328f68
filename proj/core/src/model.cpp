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

#include "reclab/model.hpp"

#include <cmath>

#include "binary_io.hpp"
#include "reclab/error.hpp"
#include "reclab/random.hpp"

namespace reclab {

namespace {

constexpr std::string_view kCheckpointMagic = "RCLMODEL";
constexpr std::uint64_t kModelStream = 0x6D6F64656CULL;

// out = A * B + bias (row-broadcast). A: n x k, B: k x m stored row-major.
Matrix affine(const Matrix& a, std::span<const double> b, std::span<const double> bias,
              std::size_t m) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    auto o = out.row(i);
    for (std::size_t j = 0; j < m; ++j) o[j] = bias[j];
    for (std::size_t t = 0; t < k; ++t) {
      const double av = a(i, t);
      if (av == 0.0) continue;
      const double* brow = b.data() + t * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += av * brow[j];
    }
  }
  return out;
}

// grad_w += A^T * G, grad_b += column sums of G.
void accumulate_affine_grads(const Matrix& a, const Matrix& g, std::span<double> grad_w,
                             std::span<double> grad_b) {
  const std::size_t k = a.cols();
  const std::size_t m = g.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto grow = g.row(i);
    for (std::size_t t = 0; t < k; ++t) {
      const double av = a(i, t);
      if (av == 0.0) continue;
      double* wrow = grad_w.data() + t * m;
      for (std::size_t j = 0; j < m; ++j) wrow[j] += av * grow[j];
    }
    for (std::size_t j = 0; j < m; ++j) grad_b[j] += grow[j];
  }
}

}  // namespace

Arch parse_arch(std::string_view name) {
  if (name == "linear") return Arch::kLinear;
  if (name == "mlp") return Arch::kMlp;
  throw InvalidInput("unknown architecture '" + std::string(name) + "' (expected linear or mlp)");
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw InvalidInput("unknown activation '" + std::string(name) + "' (expected relu or tanh)");
}

std::string_view to_string(Arch arch) { return arch == Arch::kLinear ? "linear" : "mlp"; }
std::string_view to_string(Activation act) { return act == Activation::kRelu ? "relu" : "tanh"; }

ModelParams::ModelParams(Arch arch, std::size_t input_dim, std::size_t hidden,
                         std::size_t num_classes, Activation act)
    : arch_(arch), act_(act), d_(input_dim), h_(arch == Arch::kLinear ? 0 : hidden),
      c_(num_classes) {
  if (d_ < 1 || c_ < 1) throw InvalidInput("model needs D >= 1 and C >= 1");
  if (arch_ == Arch::kMlp && h_ < 1) throw InvalidInput("mlp needs a hidden width >= 1");
  std::size_t n = d_ * first_width() + first_width();
  if (arch_ == Arch::kMlp) n += h_ * c_ + c_;
  data_.assign(n, 0.0);
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  std::fill(z.data_.begin(), z.data_.end(), 0.0);
  return z;
}

std::uint64_t ModelParams::fingerprint() const noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto eat = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  eat(static_cast<std::uint64_t>(arch_));
  eat(static_cast<std::uint64_t>(act_));
  eat(d_);
  eat(h_);
  eat(c_);
  for (double v : data_) eat(std::bit_cast<std::uint64_t>(v));
  return h;
}

ModelParams init_model(std::uint64_t seed, Arch arch, std::size_t input_dim, std::size_t hidden,
                       std::size_t num_classes, Activation act) {
  ModelParams p(arch, input_dim, hidden, num_classes, act);
  CounterRng rng(seed, kModelStream);
  const double bound1 = std::sqrt(3.0 / static_cast<double>(input_dim));
  for (double& w : p.w1()) w = rng.uniform(-bound1, bound1);
  if (arch == Arch::kMlp) {
    const double bound2 = std::sqrt(3.0 / static_cast<double>(p.hidden()));
    for (double& w : p.w2()) w = rng.uniform(-bound2, bound2);
  }
  return p;
}

ForwardResult forward(const ModelParams& params, const Matrix& features) {
  if (features.cols() != params.input_dim()) {
    throw InvalidInput("feature width " + std::to_string(features.cols()) +
                       " does not match model input " + std::to_string(params.input_dim()));
  }
  ForwardResult r;
  r.cache.params_fingerprint = params.fingerprint();
  r.cache.input = features;
  if (params.arch() == Arch::kLinear) {
    r.logits = affine(features, params.w1(), params.b1(), params.num_classes());
    return r;
  }
  r.cache.pre_activation = affine(features, params.w1(), params.b1(), params.hidden());
  r.cache.hidden = r.cache.pre_activation;
  for (double& v : r.cache.hidden.flat()) {
    v = params.activation() == Activation::kRelu ? (v > 0.0 ? v : 0.0) : std::tanh(v);
  }
  r.logits = affine(r.cache.hidden, params.w2(), params.b2(), params.num_classes());
  return r;
}

Matrix predict_logits(const ModelParams& params, const Matrix& features) {
  return forward(params, features).logits;
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     const Matrix& dlogits) {
  if (cache.params_fingerprint != params.fingerprint()) {
    throw InvalidState("forward cache does not belong to these parameters");
  }
  if (dlogits.rows() != cache.input.rows() || dlogits.cols() != params.num_classes()) {
    throw InvalidInput("dlogits shape does not match the cached forward pass");
  }
  ModelParams grads = params.zeros_like();
  if (params.arch() == Arch::kLinear) {
    accumulate_affine_grads(cache.input, dlogits, grads.w1(), grads.b1());
    return grads;
  }
  accumulate_affine_grads(cache.hidden, dlogits, grads.w2(), grads.b2());

  const std::size_t n = dlogits.rows();
  const std::size_t hdim = params.hidden();
  const std::size_t cdim = params.num_classes();
  const auto w2 = params.w2();
  Matrix dpre(n, hdim);
  for (std::size_t i = 0; i < n; ++i) {
    auto dz = dlogits.row(i);
    for (std::size_t j = 0; j < hdim; ++j) {
      double s = 0.0;
      const double* wrow = w2.data() + j * cdim;
      for (std::size_t c = 0; c < cdim; ++c) s += dz[c] * wrow[c];
      double deriv;
      if (params.activation() == Activation::kRelu) {
        deriv = cache.pre_activation(i, j) > 0.0 ? 1.0 : 0.0;
      } else {
        const double t = cache.hidden(i, j);
        deriv = 1.0 - t * t;
      }
      dpre(i, j) = s * deriv;
    }
  }
  accumulate_affine_grads(cache.input, dpre, grads.w1(), grads.b1());
  return grads;
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  detail::ByteWriter w;
  w.raw(kCheckpointMagic);
  w.uint(static_cast<std::uint32_t>(params.arch()));
  w.uint(static_cast<std::uint64_t>(params.input_dim()));
  w.uint(static_cast<std::uint64_t>(params.hidden()));
  w.uint(static_cast<std::uint64_t>(params.num_classes()));
  w.uint(static_cast<std::uint32_t>(params.activation()));
  for (double v : params.flat()) w.f64(v);
  detail::write_file_atomic(path, w.bytes());
}

ModelParams load_checkpoint(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  detail::ByteReader r(bytes);
  if (r.raw(kCheckpointMagic.size(), "magic") != kCheckpointMagic) {
    throw FormatError("not a model checkpoint (bad magic)", 0);
  }
  const auto arch_tag = r.uint<std::uint32_t>("arch tag");
  const std::size_t arch_off = r.offset() - 4;
  const auto d = r.uint<std::uint64_t>("input dim");
  const auto h = r.uint<std::uint64_t>("hidden width");
  const auto c = r.uint<std::uint64_t>("class count");
  const auto act_tag = r.uint<std::uint32_t>("activation tag");
  if (arch_tag > 1) throw FormatError("unknown arch tag " + std::to_string(arch_tag), arch_off);
  if (act_tag > 1) {
    throw FormatError("unknown activation tag " + std::to_string(act_tag), r.offset() - 4);
  }
  ModelParams p;
  try {
    p = ModelParams(static_cast<Arch>(arch_tag), d, h, c, static_cast<Activation>(act_tag));
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("invalid checkpoint shape: ") + e.what(), arch_off);
  }
  for (double& v : p.flat()) v = r.f64("parameters");
  if (r.remaining() != 0) throw FormatError("trailing bytes after parameters", r.offset());
  return p;
}

}  // namespace reclab
