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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stressnet/corpus.hpp"

namespace stressnet {

// Label hashtags, lowercase, without the leading '#'.
class HashtagLexicon {
public:
    // Throws DataError when the two sets overlap or either is empty.
    HashtagLexicon(std::set<std::string> stressed, std::set<std::string> unstressed);

    // The 41 stressed and 15 unstressed tags used for distant supervision.
    static HashtagLexicon default_lexicon();

    // File with `[stressed]` and `[unstressed]` sections, one tag per line.
    static HashtagLexicon parse(std::istream& in);
    static HashtagLexicon load(const std::filesystem::path& path);

    const std::set<std::string>& stressed() const { return stressed_; }
    const std::set<std::string>& unstressed() const { return unstressed_; }

    // kStressed / kUnstressed for a lexicon tag, nothing otherwise.
    std::optional<int> label_of(std::string_view tag) const;

private:
    std::set<std::string> stressed_;
    std::set<std::string> unstressed_;
};

struct RawTweet {
    std::string text;
    bool has_media = false;
};

enum class RejectReason {
    url,
    media,
    hashtag_not_terminal,
    too_many_hashtags,
    no_label_tag,
    conflicting_tags,
    empty_after_cleaning,
    duplicate,
};

inline constexpr std::array<RejectReason, 8> kAllRejectReasons = {
    RejectReason::url,
    RejectReason::media,
    RejectReason::hashtag_not_terminal,
    RejectReason::too_many_hashtags,
    RejectReason::no_label_tag,
    RejectReason::conflicting_tags,
    RejectReason::empty_after_cleaning,
    RejectReason::duplicate,
};

std::string to_string(RejectReason reason);

struct FilterOutcome {
    bool kept = false;
    int label = kUnstressed;
    std::string text;  // cleaned text when kept
    RejectReason reason = RejectReason::url;
};

// Tweets carrying four or more hashtags are rejected.
inline constexpr std::size_t kMaxHashtags = 3;

// Checks, in order: URL, media flag, terminal hashtag, hashtag count, label
// tags (none / conflicting). Kept text drops lexicon hashtags, strips '#'
// from the others and collapses whitespace.
FilterOutcome filter_tweet(const RawTweet& tweet, const HashtagLexicon& lexicon);

bool contains_url(std::string_view text);

struct FilterReport {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::map<RejectReason, std::size_t> rejected;

    std::size_t rejected_total() const;
    // kept + every rejection counter == input
    bool is_partition() const;
};

struct TwitterCorpus {
    std::vector<RawUtterance> utterances;  // source = "twitter"
    FilterReport report;
};

// Filters each tweet and drops exact duplicates of already kept cleaned text.
TwitterCorpus build_twitter_corpus(const std::vector<RawTweet>& tweets, const HashtagLexicon& lexicon);

// JSONL tweets: {"text": ..., "has_media": bool?}
std::vector<RawTweet> read_tweets(std::istream& in);
std::vector<RawTweet> load_tweets(const std::filesystem::path& path);

std::string format_report(const FilterReport& report);

inline constexpr std::size_t kTweetsPerClass = 49000;

// Indices of a seeded sample of per_class items of each label, without
// replacement when the class is large enough and with replacement (plus a
// warning) otherwise. The result is shuffled. Throws DataError if a class is
// empty and ConfigError if per_class == 0.
std::vector<std::size_t> sample_balanced_indices(std::span<const int> labels, std::size_t per_class, std::uint64_t seed);

std::vector<RawUtterance> sample_balanced(const std::vector<RawUtterance>& corpus,
                                          std::size_t per_class,
                                          std::uint64_t seed);

}  // namespace stressnet
