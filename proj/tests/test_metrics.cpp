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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "stressnet/errors.hpp"
#include "stressnet/metrics.hpp"
#include "stressnet/random.hpp"

using namespace stressnet;

TEST_CASE("confusion counting") {
    const std::vector<int> labels{1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
    CHECK(confusion(labels, labels) == ConfusionMatrix{4, 0, 0, 6});
    std::vector<int> inverted;
    for (int l : labels) inverted.push_back(1 - l);
    const auto inv = confusion(inverted, labels);
    CHECK(inv.tp == 0);
    CHECK(inv.tn == 0);
    CHECK(confusion(std::vector<int>{1, 1, 0, 0, 1}, std::vector<int>{1, 0, 0, 1, 1}) == ConfusionMatrix{2, 1, 1, 1});

    CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<int>{1, 0}), DataError);
    CHECK_THROWS_AS(confusion(std::vector<int>{}, std::vector<int>{}), DataError);
    CHECK_THROWS_AS(confusion(std::vector<int>{2}, std::vector<int>{1}), DataError);
}

TEST_CASE("metrics examples") {
    const auto m = metrics({3, 1, 1, 5});
    CHECK(m.accuracy_text == "80.0");
    CHECK(m.precision_text == "75.0");
    CHECK(m.recall_text == "75.0");
    CHECK(m.f_score_text == "75.0");
    CHECK(m.accuracy == doctest::Approx(80.0));

    const auto negative = metrics(confusion(std::vector<int>{0, 0, 0, 0}, std::vector<int>{1, 0, 1, 0}));
    CHECK(negative.precision_degenerate);
    CHECK(negative.precision == 0.0);
    CHECK(negative.precision_text == "0.0");
    CHECK(negative.f_degenerate);
    CHECK(negative.f_score_text == "0.0");
    CHECK(negative.accuracy_text == "50.0");

    const auto perfect = metrics({7, 0, 0, 3});
    for (const auto* t : {&perfect.accuracy_text, &perfect.precision_text, &perfect.recall_text, &perfect.f_score_text}) {
        CHECK(*t == "100.0");
    }
    CHECK_THROWS_AS(metrics({}), DataError);
}

TEST_CASE("one-decimal half-up rounding") {
    CHECK(percent_one_decimal(1, 3) == "33.3");
    CHECK(percent_one_decimal(2, 3) == "66.7");
    CHECK(percent_one_decimal(1, 8) == "12.5");
    CHECK(percent_one_decimal(1, 16) == "6.3");   // 6.25 rounds up
    CHECK(percent_one_decimal(3, 16) == "18.8");  // 18.75 rounds up
    CHECK(percent_one_decimal(1, 2000) == "0.1"); // 0.05 rounds up
    CHECK(percent_one_decimal(237, 320) == "74.1");
    CHECK(percent_one_decimal(0, 5) == "0.0");
    CHECK(percent_one_decimal(0, 0) == "0.0");
}

TEST_CASE("report formats") {
    const auto m = metrics({3, 1, 1, 5});
    CHECK(format_metrics_tsv("BLSTM", m) == "BLSTM\t80.0\t75.0\t75.0\t75.0");
    const auto json = nlohmann::json::parse(format_metrics_json({{"SVM", m}}));
    CHECK(json["SVM"]["accuracy"] == 80.0);
    CHECK(json["SVM"]["f_score"] == 75.0);
    CHECK(!json["SVM"].contains("degenerate"));
    const auto degenerate = nlohmann::json::parse(format_metrics_json({{"x", metrics({0, 0, 2, 2})}}));
    CHECK(degenerate["x"]["degenerate"] == true);
}

TEST_CASE("metric properties on random predictions") {
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(60);
        std::vector<int> p(n), l(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = static_cast<int>(rng.uniform_index(2));
            l[i] = static_cast<int>(rng.uniform_index(2));
        }
        const auto m = metrics(confusion(p, l));
        for (double v : {m.accuracy, m.precision, m.recall, m.f_score}) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
        CHECK(m.f_score <= std::max(m.precision, m.recall) + 1e-12);
        if (m.precision > 0 && m.recall > 0) {
            CHECK(m.f_score == 2.0 * m.precision * m.recall / (m.precision + m.recall));
            CHECK(m.f_score >= std::min(m.precision, m.recall) - 1e-12);
        }

        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        std::vector<int> p2, l2;
        for (auto i : order) {
            p2.push_back(p[i]);
            l2.push_back(l[i]);
        }
        CHECK(confusion(p2, l2) == confusion(p, l));
        CHECK(format_metrics_tsv("m", metrics(confusion(p2, l2))) == format_metrics_tsv("m", m));
    }
}
