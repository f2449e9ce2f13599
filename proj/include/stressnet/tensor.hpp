// Copyright 2026 The Stressnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace stressnet {

// Dense vector of 64-bit reals.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> span() { return data_; }
    std::span<const double> span() const { return data_; }
    const std::vector<double>& values() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    void fill(double value);
    Vector& operator+=(const Vector& other);

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> data_;
};

// Dense row-major matrix of 64-bit reals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    // Throws ShapeError when rows of the initializer are ragged.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    void fill(double value);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// m · v
Vector matvec(const Matrix& m, const Vector& v);
// mᵀ · v
Vector matvec_transposed(const Matrix& m, const Vector& v);
// m += a ⊗ b
void add_outer(Matrix& m, const Vector& a, const Vector& b);

double dot(const Vector& a, const Vector& b);

Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector mul(const Vector& a, const Vector& b);
Vector scale(const Vector& v, double factor);

Vector tanh(const Vector& v);
Vector sigmoid(const Vector& v);

// Stable softmax: logits are shifted by their maximum before exponentiation.
Vector softmax(const Vector& v);
// log Σ exp(v), shifted by the maximum.
double log_sum_exp(const Vector& v);

// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(const Vector& v);

bool all_finite(std::span<const double> values);

double sigmoid(double x);

// A named, trainable tensor with its gradient accumulator.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    Parameter() = default;
    Parameter(std::string n, std::size_t rows, std::size_t cols)
        : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

    void zero_grad() { grad.fill(0.0); }
};

// Flat view over one parameter, as consumed by the gradient checker.
struct ParamView {
    std::string name;
    std::span<double> value;
    std::span<const double> grad;
};

std::vector<ParamView> views_of(const std::vector<Parameter*>& params);

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t worst_index = 0;  // flat index within worst_parameter
    std::size_t checked = 0;
    bool passed = true;
};

// Compares the analytic gradient against central differences for every entry.
//
// `loss_and_grad` must be deterministic: it recomputes the loss from the
// current parameter values and overwrites the analytic gradient buffers that
// the views point to. Relative error is |a - n| / max(1e-8, |a| + |n|).
GradCheckReport check_gradients(const std::function<double()>& loss_and_grad,
                                const std::vector<ParamView>& params,
                                double epsilon,
                                double tolerance);

}  // namespace stressnet
