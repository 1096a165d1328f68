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

#include "reclab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reclab/error.hpp"

namespace reclab {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("matrix data size " + std::to_string(data_.size()) +
                       " does not match shape " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
  }
}

void require_logits(const Matrix& logits) {
  if (logits.rows() < 1 || logits.cols() < 2) {
    throw InvalidInput("logits must be N x C with N >= 1 and C >= 2");
  }
  for (double v : logits.flat()) {
    if (!std::isfinite(v)) throw InvalidInput("logits contain a non-finite entry");
  }
}

Matrix softmax(const Matrix& logits) {
  require_logits(logits);
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    auto z = logits.row(n);
    auto p = out.row(n);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      p[c] = std::exp(z[c] - zmax);
      sum += p[c];
    }
    for (double& v : p) v /= sum;
  }
  return out;
}

Matrix log_softmax(const Matrix& logits) {
  require_logits(logits);
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    auto z = logits.row(n);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double lse = zmax + std::log(sum);
    auto o = out.row(n);
    for (std::size_t c = 0; c < z.size(); ++c) o[c] = z[c] - lse;
  }
  return out;
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(m.rows());
  for (std::size_t n = 0; n < m.rows(); ++n) {
    auto r = m.row(n);
    out[n] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

std::vector<double> finite_difference_gradient(const ScalarFunction& f,
                                               std::span<const double> x, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double fp = f(probe);
    probe[i] = orig - h;
    const double fm = f(probe);
    probe[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw OracleFailure("non-finite function value at coordinate " + std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                          double floor) {
  if (analytic.size() != numeric.size()) {
    throw InvalidInput("gradient length mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

}  // namespace reclab
