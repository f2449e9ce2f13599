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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stressnet/example.hpp"
#include "stressnet/text.hpp"

namespace stressnet {

struct RawUtterance {
    std::string text;
    int label = kUnstressed;
    std::optional<std::string> source;
    std::optional<std::string> speaker;

    bool operator==(const RawUtterance&) const = default;
};

enum class CorpusFormat { jsonl, tsv };

// Picks the format from the extension: ".tsv" is TSV, everything else JSONL.
CorpusFormat format_for(const std::filesystem::path& path);

// Malformed lines raise ParseError naming the line; bad labels or empty
// text raise DataError naming the line.
std::vector<RawUtterance> read_corpus(std::istream& in, CorpusFormat format);
void write_corpus(std::ostream& out, const std::vector<RawUtterance>& corpus, CorpusFormat format);

std::vector<RawUtterance> load_corpus(const std::filesystem::path& path);
std::vector<RawUtterance> load_corpus(const std::filesystem::path& path, CorpusFormat format);
void store_corpus(const std::filesystem::path& path, const std::vector<RawUtterance>& corpus);
void store_corpus(const std::filesystem::path& path, const std::vector<RawUtterance>& corpus, CorpusFormat format);

// Tokenizes every utterance. Utterances whose token list is empty are
// reported as DataError.
std::vector<Example> encode_corpus(const Vocabulary& vocab,
                                   const std::vector<RawUtterance>& corpus,
                                   std::size_t max_len = kMaxSequenceLength);

std::vector<std::vector<std::string>> tokenize_corpus(const std::vector<RawUtterance>& corpus);

struct SplitSpec {
    std::size_t test_per_class = 160;
    std::uint64_t seed = 42;
};

// Seeded uniform choice of exactly test_per_class utterances of each label
// for the test set; the remainder is the training set. Both halves keep
// the input order.
std::pair<std::vector<RawUtterance>, std::vector<RawUtterance>> split_interview(
    const std::vector<RawUtterance>& corpus, const SplitSpec& spec);

std::size_t count_label(const std::vector<RawUtterance>& corpus, int label);

}  // namespace stressnet
