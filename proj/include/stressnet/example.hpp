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
#include <vector>

namespace stressnet {

inline constexpr std::size_t kPadIndex = 0;
inline constexpr std::size_t kUnkIndex = 1;

inline constexpr int kUnstressed = 0;
inline constexpr int kStressed = 1;

// A padded token-index sequence. mask[t] == 1 marks a real token; masked
// positions hold kPadIndex.
struct EncodedSequence {
    std::vector<std::size_t> tokens;
    std::vector<std::uint8_t> mask;

    std::size_t length() const { return tokens.size(); }
    std::size_t real_count() const;

    bool operator==(const EncodedSequence&) const = default;
};

struct Example {
    EncodedSequence sequence;
    int label = kUnstressed;

    bool operator==(const Example&) const = default;
};

inline std::size_t EncodedSequence::real_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m != 0;
    return n;
}

}  // namespace stressnet
