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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stressnet/example.hpp"

namespace stressnet {

inline constexpr std::size_t kMaxSequenceLength = 35;
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";

// Lowercases ASCII, splits on whitespace and peels leading/trailing ASCII
// punctuation into one-character tokens. Inner punctuation ("don't") stays.
std::vector<std::string> tokenize(std::string_view text);

// Token <-> index map. Index 0 is <pad>, index 1 is <unk>.
class Vocabulary {
public:
    Vocabulary();

    // Builds from an explicit index-ordered token list whose first two
    // entries must be <pad> and <unk>. Throws DataError on duplicates.
    static Vocabulary from_tokens(std::vector<std::string> tokens);

    std::size_t size() const { return tokens_.size(); }

    // Unknown tokens map to kUnkIndex.
    std::size_t index_of(std::string_view token) const;
    bool contains(std::string_view token) const;

    // Throws VocabularyError when out of range.
    const std::string& token_at(std::size_t index) const;

    const std::vector<std::string>& tokens() const { return tokens_; }

    // FNV-1a over the newline-joined token list.
    std::uint64_t fingerprint() const;

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Tokens with count >= min_count, ordered by descending frequency then
// lexicographically. Throws DataError on empty input or min_count == 0.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpora, std::size_t min_count);

// Truncates to the first max_len tokens and pads the tail with PAD.
// Throws DataError on an empty token list.
EncodedSequence encode(const Vocabulary& vocab,
                       const std::vector<std::string>& tokens,
                       std::size_t max_len = kMaxSequenceLength);

// One token per line; line number - 1 is the index.
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace stressnet
