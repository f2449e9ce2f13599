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

#include "stressnet/metrics.hpp"

#include <cstdint>

#include <json.hpp>

#include "stressnet/errors.hpp"

namespace stressnet {

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw DataError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(labels.size()) + " labels");
    }
    if (labels.empty()) throw DataError("confusion: no predictions");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int p = predictions[i];
        const int l = labels[i];
        if ((p != 0 && p != 1) || (l != 0 && l != 1)) throw DataError("confusion: labels must be 0 or 1");
        if (p == 1 && l == 1) ++cm.tp;
        else if (p == 1) ++cm.fp;
        else if (l == 1) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

std::string percent_one_decimal(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0) return "0.0";
    // tenths = floor((1000 * num + den / 2) / den), done in integers so that
    // exact halves round up.
    const auto num = static_cast<std::uint64_t>(numerator);
    const auto den = static_cast<std::uint64_t>(denominator);
    const std::uint64_t tenths = (2000 * num + den) / (2 * den);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

Metrics metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("metrics of an empty confusion matrix");
    Metrics m;
    const auto ratio = [](std::size_t num, std::size_t den) {
        return 100.0 * static_cast<double>(num) / static_cast<double>(den);
    };
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.accuracy_text = percent_one_decimal(cm.tp + cm.tn, cm.total());

    m.precision_degenerate = cm.tp + cm.fp == 0;
    m.precision = m.precision_degenerate ? 0.0 : ratio(cm.tp, cm.tp + cm.fp);
    m.precision_text = percent_one_decimal(cm.tp, cm.tp + cm.fp);

    m.recall_degenerate = cm.tp + cm.fn == 0;
    m.recall = m.recall_degenerate ? 0.0 : ratio(cm.tp, cm.tp + cm.fn);
    m.recall_text = percent_one_decimal(cm.tp, cm.tp + cm.fn);

    m.f_degenerate = m.precision + m.recall == 0.0;
    m.f_score = m.f_degenerate ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    // 2pr / (p + r) == 2tp / (2tp + fp + fn)
    m.f_score_text = m.f_degenerate ? "0.0" : percent_one_decimal(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    return m;
}

std::string format_metrics_tsv(const std::string& method, const Metrics& m) {
    return method + '\t' + m.accuracy_text + '\t' + m.precision_text + '\t' + m.recall_text + '\t' + m.f_score_text;
}

std::string format_metrics_json(const std::map<std::string, Metrics>& report) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [method, m] : report) {
        nlohmann::ordered_json entry;
        entry["accuracy"] = std::stod(m.accuracy_text);
        entry["precision"] = std::stod(m.precision_text);
        entry["recall"] = std::stod(m.recall_text);
        entry["f_score"] = std::stod(m.f_score_text);
        if (m.precision_degenerate || m.recall_degenerate || m.f_degenerate) entry["degenerate"] = true;
        out[method] = entry;
    }
    return out.dump(2);
}

}  // namespace stressnet
