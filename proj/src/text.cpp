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

#include "stressnet/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "stressnet/errors.hpp"

namespace stressnet {

namespace {

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

bool is_punct(unsigned char c) {
    return c < 0x80 && ((c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
                        (c >= '{' && c <= '~'));
}

char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

void peel_word(std::string_view word, std::vector<std::string>& out) {
    std::size_t begin = 0;
    std::size_t end = word.size();
    while (begin < end && is_punct(word[begin])) ++begin;
    // A token made only of punctuation is peeled entirely from the front.
    while (end > begin && is_punct(word[end - 1])) --end;

    for (std::size_t i = 0; i < begin; ++i) out.emplace_back(1, word[i]);
    if (begin < end) {
        std::string core(word.substr(begin, end - begin));
        for (char& c : core) c = lower(static_cast<unsigned char>(c));
        out.push_back(std::move(core));
    }
    for (std::size_t i = std::max(begin, end); i < word.size(); ++i) out.emplace_back(1, word[i]);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) peel_word(text.substr(start, i - start), out);
    }
    return out;
}

Vocabulary::Vocabulary() {
    tokens_ = {kPadToken, kUnkToken};
    index_ = {{kPadToken, kPadIndex}, {kUnkToken, kUnkIndex}};
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
    if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
        throw DataError("vocabulary must start with <pad> and <unk>");
    }
    Vocabulary vocab;
    vocab.tokens_ = std::move(tokens);
    vocab.index_.clear();
    for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
        if (!vocab.index_.emplace(vocab.tokens_[i], i).second) {
            throw DataError("duplicate vocabulary token '" + vocab.tokens_[i] + "'");
        }
    }
    return vocab;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    return it == index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.count(std::string(token)) != 0; }

const std::string& Vocabulary::token_at(std::size_t index) const {
    if (index >= tokens_.size()) {
        throw VocabularyError("index " + std::to_string(index) + " outside vocabulary of size " +
                              std::to_string(tokens_.size()));
    }
    return tokens_[index];
}

std::uint64_t Vocabulary::fingerprint() const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](unsigned char c) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    };
    for (const auto& token : tokens_) {
        for (unsigned char c : token) mix(c);
        mix('\n');
    }
    return hash;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpora, std::size_t min_count) {
    if (min_count == 0) throw DataError("min_count must be at least 1");
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& sentence : corpora) {
        for (const auto& token : sentence) {
            ++counts[token];
            ++total;
        }
    }
    if (total == 0) throw DataError("cannot build a vocabulary from an empty corpus");

    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [token, count] : counts) {
        if (count >= min_count && token != kPadToken && token != kUnkToken) kept.emplace_back(token, count);
    }
    // std::map iteration is already lexicographic; stable sort keeps that within equal counts.
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<std::string> tokens{kPadToken, kUnkToken};
    for (auto& [token, count] : kept) tokens.push_back(token);
    return Vocabulary::from_tokens(std::move(tokens));
}

EncodedSequence encode(const Vocabulary& vocab, const std::vector<std::string>& tokens, std::size_t max_len) {
    if (tokens.empty()) throw DataError("cannot encode an empty token sequence");
    if (max_len == 0) throw ConfigError("max_len must be positive");
    EncodedSequence seq;
    seq.tokens.assign(max_len, kPadIndex);
    seq.mask.assign(max_len, 0);
    const std::size_t n = std::min(tokens.size(), max_len);
    for (std::size_t t = 0; t < n; ++t) {
        seq.tokens[t] = vocab.index_of(tokens[t]);
        seq.mask[t] = 1;
    }
    return seq;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write vocabulary file " + path.string());
    for (const auto& token : vocab.tokens()) out << token << '\n';
    if (!out) throw IoError("failed writing vocabulary file " + path.string());
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary file " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        tokens.push_back(line);
    }
    return Vocabulary::from_tokens(std::move(tokens));
}

}  // namespace stressnet
