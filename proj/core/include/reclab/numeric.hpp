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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace reclab {

// Dense row-major matrix of doubles. Rows are samples, columns are classes
// (or features).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws InvalidInput unless every entry is finite and the shape is N >= 1,
// C >= 2.
void require_logits(const Matrix& logits);

// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);

// Row-wise log-softmax via log-sum-exp.
Matrix log_softmax(const Matrix& logits);

// Index of the largest entry in each row; ties go to the lowest index.
std::vector<int> argmax_rows(const Matrix& m);

using ScalarFunction = std::function<double(std::span<const double>)>;

inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;

// Central-difference gradient of f at x. Throws OracleFailure if f returns
// a non-finite value at any probe point.
std::vector<double> finite_difference_gradient(const ScalarFunction& f,
                                               std::span<const double> x,
                                               double h = kDefaultFiniteDifferenceStep);

// Largest per-coordinate relative error between an analytic and a numeric
// gradient. The denominator is max(|a|, |n|, floor) so coordinates whose
// true value is ~0 are compared on an absolute scale of `floor`.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                          double floor = 1e-3);

}  // namespace reclab
