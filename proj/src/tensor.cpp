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

#include "stressnet/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "stressnet/errors.hpp"

namespace stressnet {

namespace {

void require_same_length(const Vector& a, const Vector& b, const char* op) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(op) + ": length mismatch " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    }
}

template <typename F>
Vector zip(const Vector& a, const Vector& b, const char* op, F f) {
    require_same_length(a, b, op);
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
    return out;
}

template <typename F>
Vector map(const Vector& v, F f) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = f(v[i]);
    return out;
}

}  // namespace

void Vector::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Vector& Vector::operator+=(const Vector& other) {
    require_same_length(*this, other, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other[i];
    return *this;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("matrix initializer has ragged rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.size()) {
        throw ShapeError("matvec: matrix has " + std::to_string(m.cols()) +
                         " columns, vector has length " + std::to_string(v.size()));
    }
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows() != v.size()) {
        throw ShapeError("matvec_transposed: matrix has " + std::to_string(m.rows()) +
                         " rows, vector has length " + std::to_string(v.size()));
    }
    Vector out(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        const double scale_r = v[r];
        if (scale_r == 0.0) continue;
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c] * scale_r;
    }
    return out;
}

void add_outer(Matrix& m, const Vector& a, const Vector& b) {
    if (m.rows() != a.size() || m.cols() != b.size()) throw ShapeError("add_outer: shape mismatch");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (a[r] == 0.0) continue;
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += a[r] * b[c];
    }
}

double dot(const Vector& a, const Vector& b) {
    require_same_length(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Vector add(const Vector& a, const Vector& b) {
    return zip(a, b, "add", [](double x, double y) { return x + y; });
}

Vector sub(const Vector& a, const Vector& b) {
    return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

Vector mul(const Vector& a, const Vector& b) {
    return zip(a, b, "mul", [](double x, double y) { return x * y; });
}

Vector scale(const Vector& v, double factor) {
    return map(v, [factor](double x) { return x * factor; });
}

double sigmoid(double x) {
    // Split by sign so exp never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Vector tanh(const Vector& v) {
    return map(v, [](double x) { return std::tanh(x); });
}

Vector sigmoid(const Vector& v) {
    return map(v, [](double x) { return sigmoid(x); });
}

Vector softmax(const Vector& v) {
    if (v.empty()) throw ShapeError("softmax of an empty vector");
    const double top = *std::max_element(v.begin(), v.end());
    Vector out(v.size());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - top);
        total += out[i];
    }
    for (double& x : out) x /= total;
    return out;
}

double log_sum_exp(const Vector& v) {
    if (v.empty()) throw ShapeError("log_sum_exp of an empty vector");
    const double top = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (double x : v) total += std::exp(x - top);
    return top + std::log(total);
}

std::size_t argmax(const Vector& v) {
    if (v.empty()) throw ShapeError("argmax of an empty vector");
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

std::vector<ParamView> views_of(const std::vector<Parameter*>& params) {
    std::vector<ParamView> views;
    views.reserve(params.size());
    for (Parameter* p : params) views.push_back({p->name, p->value.data(), p->grad.data()});
    return views;
}

GradCheckReport check_gradients(const std::function<double()>& loss_and_grad,
                                const std::vector<ParamView>& params,
                                double epsilon,
                                double tolerance) {
    if (!(epsilon > 0.0)) throw ConfigError("check_gradients: epsilon must be positive");

    const double base = loss_and_grad();
    if (!std::isfinite(base)) throw NumericError("check_gradients: non-finite loss");

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) analytic.emplace_back(p.grad.begin(), p.grad.end());

    GradCheckReport report;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        const auto& p = params[pi];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value[i];
            p.value[i] = saved + epsilon;
            const double plus = loss_and_grad();
            p.value[i] = saved - epsilon;
            const double minus = loss_and_grad();
            p.value[i] = saved;
            if (!std::isfinite(plus) || !std::isfinite(minus)) {
                throw NumericError("check_gradients: non-finite loss while perturbing " + p.name);
            }
            const double numeric = (plus - minus) / (2.0 * epsilon);
            const double a = analytic[pi][i];
            const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
            ++report.checked;
            if (rel > report.max_relative_error || report.worst_parameter.empty()) {
                report.max_relative_error = rel;
                report.worst_parameter = p.name;
                report.worst_index = i;
            }
        }
    }
    // Leave the analytic gradient buffers as they were on entry.
    loss_and_grad();
    report.passed = report.max_relative_error < tolerance;
    return report;
}

}  // namespace stressnet
