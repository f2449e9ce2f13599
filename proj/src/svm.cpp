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

#include "stressnet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include "stressnet/errors.hpp"
#include "stressnet/example.hpp"

namespace stressnet {

void EmbeddingTable::add(const std::string& token, Vector vector) {
    if (dim_ == 0) dim_ = vector.size();
    if (vector.size() != dim_ || dim_ == 0) {
        throw ShapeError("embedding for '" + token + "' has " + std::to_string(vector.size()) + " values, expected " +
                         std::to_string(dim_));
    }
    if (!all_finite(vector.span())) throw NumericError("embedding for '" + token + "' has non-finite values");
    vectors_[token] = std::move(vector);
}

const Vector* EmbeddingTable::find(const std::string& token) const {
    const auto it = vectors_.find(token);
    return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable EmbeddingTable::parse(std::istream& in, std::size_t expected_dim) {
    EmbeddingTable table(expected_dim);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token)) continue;
        std::vector<double> values;
        std::string field;
        while (fields >> field) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(field, &used));
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw ParseError("embedding line " + std::to_string(line_no) + ": bad number '" + field + "'");
            }
        }
        try {
            table.add(token, Vector(std::move(values)));
        } catch (const ShapeError& e) {
            throw ParseError("embedding line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, std::size_t expected_dim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file " + path.string());
    return parse(in, expected_dim);
}

Vector sentence_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
    Vector sum(table.dim());
    std::size_t found = 0;
    for (const auto& token : tokens) {
        if (const Vector* v = table.find(token)) {
            sum += *v;
            ++found;
        }
    }
    if (found == 0) throw CoverageError("no token of the utterance has an embedding");
    return scale(sum, 1.0 / static_cast<double>(found));
}

double rbf_kernel(const Vector& a, const Vector& b, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("RBF gamma must be positive");
    if (a.size() != b.size()) throw ShapeError("rbf_kernel: dimension mismatch");
    double dist = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        dist += d * d;
    }
    return std::exp(-gamma * dist);
}

double default_gamma(const std::vector<Vector>& vectors) {
    if (vectors.empty() || vectors.front().empty()) throw DataError("cannot derive gamma from no features");
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const auto& v : vectors) {
        for (double x : v) {
            sum += x;
            sum_sq += x * x;
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
    const double dim = static_cast<double>(vectors.front().size());
    return var > 0.0 ? 1.0 / (dim * var) : 1.0 / dim;
}

double SvmModel::decision(const Vector& x) const {
    if (!support_vectors.empty() && x.size() != dim()) throw ShapeError("svm: feature dimension mismatch");
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) f += coefficients[i] * rbf_kernel(support_vectors[i], x, gamma);
    return f;
}

int to_signed_label(int label) { return label == kStressed ? 1 : -1; }

int svm_predict(const SvmModel& model, const Vector& x) { return model.decision(x) > 0.0 ? kStressed : kUnstressed; }

SvmTrainResult svm_train(const std::vector<Vector>& vectors, const std::vector<int>& labels, const SvmParams& params) {
    const std::size_t n = vectors.size();
    if (labels.size() != n) throw DataError("svm_train: vectors and labels differ in length");
    if (n < 2) throw DataError("svm_train needs at least two examples");
    for (int y : labels) {
        if (y != 1 && y != -1) throw DataError("svm_train labels must be -1 or +1");
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0 || std::count(labels.begin(), labels.end(), -1) == 0) {
        throw DataError("svm_train needs examples of both classes");
    }
    for (const auto& v : vectors) {
        if (v.size() != vectors.front().size()) throw ShapeError("svm_train: ragged feature vectors");
    }
    if (!(params.c > 0.0)) throw ConfigError("svm C must be positive");
    if (!(params.tol > 0.0)) throw ConfigError("svm tol must be positive");
    const double gamma = params.gamma > 0.0 ? params.gamma : default_gamma(vectors);
    const double c = params.c;

    // Canonical order: sort by (features, label).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (vectors[a].values() != vectors[b].values()) return vectors[a].values() < vectors[b].values();
        return labels[a] < labels[b];
    });

    // q(i, j) = y_i y_j K(x_i, x_j)
    std::vector<double> y(n);
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[order[i]];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            q[i * n + j] = q[j * n + i] = y[i] * y[j] * rbf_kernel(vectors[order[i]], vectors[order[j]], gamma);
        }
    }

    // Dual: min 1/2 a'Qa - sum(a), 0 <= a <= C, y'a = 0. grad = Qa - 1.
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c; };

    std::size_t iterations = 0;
    while (iterations < params.max_iterations) {
        // Maximal violating pair.
        std::size_t i = n, j = n;
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > g_max) {
                g_max = v;
                i = t;
            }
            if (in_low(t) && v < g_min) {
                g_min = v;
                j = t;
            }
        }
        if (i == n || j == n || g_max - g_min < params.tol) break;
        ++iterations;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double* q_i = &q[i * n];
        const double* q_j = &q[j * n];
        if (y[i] != y[j]) {
            double quad = q_i[i] + q_j[j] + 2.0 * q_i[j];
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q_i[i] + q_j[j] - 2.0 * q_i[j];
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }
        const double d_i = alpha[i] - old_i;
        const double d_j = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q_i[t] * d_i + q_j[t] * d_j;
    }
    if (iterations == params.max_iterations) {
        warn("svm_train stopped at the iteration cap before reaching tol");
    }

    // Bias: mean over free support vectors, else the midpoint of the
    // interval the bounded ones allow.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (upper + lower);

    SvmTrainResult result;
    result.iterations = iterations;
    result.alphas.assign(n, 0.0);
    result.model.bias = -rho;
    result.model.gamma = gamma;
    result.model.c = c;
    for (std::size_t t = 0; t < n; ++t) {
        result.alphas[order[t]] = alpha[t];
        if (alpha[t] > 0.0) {
            result.model.support_vectors.push_back(vectors[order[t]]);
            result.model.coefficients.push_back(alpha[t] * y[t]);
        }
    }
    return result;
}

}  // namespace stressnet
