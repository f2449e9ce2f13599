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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stressnet/model_io.hpp"

namespace stressnet {

// Per-token attention weights for one utterance (unmasked positions only).
struct AttentionTrace {
    std::vector<std::string> tokens;
    std::vector<double> alphas;
    int predicted = 0;
    std::vector<double> probabilities;
    std::optional<int> label;
};

// Tokenizes, encodes and runs the model. Throws ConfigError when the model
// has no attention layer and DataError on text without tokens.
AttentionTrace explain(const NeuralBundle& bundle, const std::string& text);

// token:weight pairs with three decimals, space separated.
std::string format_trace(const AttentionTrace& trace);

// Self-contained SVG: one cell per token, fill opacity alpha / max(alpha).
std::string render_heatmap_svg(const AttentionTrace& trace);

// Runs the command line. Returns the process exit code:
// 0 success, 1 usage, 2 I/O, 3 data/config, 4 numeric.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stressnet
