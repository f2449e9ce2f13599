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
#include <map>
#include <span>
#include <string>

namespace stressnet {

// Positive class is stressed (label 1).
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

// Throws DataError on a length mismatch, an empty input or a label outside {0, 1}.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

// Percentages in [0, 100]. A zero denominator yields 0 and sets the flag.
struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f_degenerate = false;

    // One-decimal, half-up renderings computed from the exact count ratios.
    std::string accuracy_text;
    std::string precision_text;
    std::string recall_text;
    std::string f_score_text;
};

// Throws DataError when the matrix is empty.
Metrics metrics(const ConfusionMatrix& cm);

// round-half-up(100 * numerator / denominator) to one decimal, e.g. "74.1".
std::string percent_one_decimal(std::size_t numerator, std::size_t denominator);

// method \t accuracy \t precision \t recall \t f-score
std::string format_metrics_tsv(const std::string& method, const Metrics& m);

// {"<method>": {"accuracy": .., "precision": .., "recall": .., "f_score": ..}, ...}
std::string format_metrics_json(const std::map<std::string, Metrics>& report);

}  // namespace stressnet
