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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "stressnet/tensor.hpp"

namespace stressnet {

inline constexpr std::size_t kWordVectorDim = 300;

// Word vectors read from "token v1 ... vk" lines. All rows share one width.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    // Throws ShapeError on a width mismatch, NumericError on non-finite values.
    void add(const std::string& token, Vector vector);

    const Vector* find(const std::string& token) const;
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }

    // `expected_dim` of 0 accepts whatever width the first line has.
    static EmbeddingTable parse(std::istream& in, std::size_t expected_dim = 0);
    static EmbeddingTable load(const std::filesystem::path& path, std::size_t expected_dim = 0);

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, Vector> vectors_;
};

// Mean of the vectors of the tokens present in the table; absent tokens are
// skipped. Throws CoverageError when none is present.
Vector sentence_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table);

// exp(-gamma * |a - b|^2). Throws ConfigError unless gamma > 0.
double rbf_kernel(const Vector& a, const Vector& b, double gamma);

struct SvmParams {
    double c = 1.0;
    double gamma = 0.0;  // <= 0 selects 1 / (dim * var(features))
    double tol = 1e-3;  // stop when the KKT gap falls below this
    std::size_t max_iterations = 10000000;
};

// 1 / (dim * variance of every feature value pooled together).
double default_gamma(const std::vector<Vector>& vectors);

struct SvmModel {
    std::vector<Vector> support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i
    double bias = 0.0;
    double gamma = 1.0;
    double c = 1.0;

    double decision(const Vector& x) const;
    std::size_t dim() const { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
};

struct SvmTrainResult {
    SvmModel model;
    std::vector<double> alphas;  // one per training example, input order
    std::size_t iterations = 0;
};

// SMO on the soft-margin dual, selecting the maximal violating pair each
// iteration. Examples are processed in a canonical (sorted) order so the
// result does not depend on the input order. Labels are -1/+1. Throws
// DataError on single-class input and ConfigError unless C, tol > 0.
SvmTrainResult svm_train(const std::vector<Vector>& vectors, const std::vector<int>& labels, const SvmParams& params);

// Sign of the decision value mapped to 1 (stressed) / 0; zero maps to 0.
int svm_predict(const SvmModel& model, const Vector& x);

// +1 for label 1, -1 for label 0.
int to_signed_label(int label);

}  // namespace stressnet
