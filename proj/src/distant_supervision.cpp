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

#include "stressnet/distant_supervision.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "stressnet/errors.hpp"
#include "stressnet/random.hpp"

namespace stressnet {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto space = [](char c) { return c == ' ' || (c >= '\t' && c <= '\r'); };
    while (i < text.size()) {
        while (i < text.size() && space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !space(text[i])) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

// "#Stressed!" -> "stressed"; empty when the token is not a hashtag.
std::string hashtag_of(std::string_view token) {
    if (token.size() < 2 || token[0] != '#') return {};
    std::string tag = lowercase(token.substr(1));
    while (!tag.empty()) {
        const unsigned char c = static_cast<unsigned char>(tag.back());
        if (c < 0x80 && !std::isalnum(c) && c != '_') {
            tag.pop_back();
        } else {
            break;
        }
    }
    if (!tag.empty() && tag[0] == '#') return {};
    return tag;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

HashtagLexicon::HashtagLexicon(std::set<std::string> stressed, std::set<std::string> unstressed)
    : stressed_(std::move(stressed)), unstressed_(std::move(unstressed)) {
    if (stressed_.empty() || unstressed_.empty()) throw DataError("hashtag lexicon needs tags for both classes");
    for (const auto& tag : stressed_) {
        if (unstressed_.count(tag)) throw DataError("hashtag '" + tag + "' is listed as both stressed and unstressed");
    }
}

HashtagLexicon HashtagLexicon::default_lexicon() {
    return HashtagLexicon(
        {
            "amstressed",      "busylife",       "collegestress",  "distress",           "distressed",
            "familystress",    "feelingbusy",    "feelingfrustrated", "feelingoverwhelmed", "feelingstress",
            "feelstress",      "feelstressed",   "frustrated",     "frustrating",        "frustration",
            "iamstressed",     "ifrustrated",    "imstressed",     "overwhelm",          "overwhelmed",
            "overwhelming",    "panic",          "sostress",       "sostressed",         "sostressful",
            "stress",          "stressed",       "stressedlife",   "stressedout",        "stresses",
            "stressful",       "stressfulllife", "stressingout",   "stresslife",         "stressor",
            "stressors",       "stresss",        "stressss",       "stresssss",          "verystressed",
            "workstress",
        },
        {
            "blessed", "comfort", "feelingrelax", "feelingrelaxed", "grateful",
            "iamblessed", "iamgrateful", "iamrelaxed", "imblessed", "imgrateful",
            "nostress", "peaceful", "relax", "relaxed", "relaxing",
        });
}

HashtagLexicon HashtagLexicon::parse(std::istream& in) {
    std::set<std::string> stressed;
    std::set<std::string> unstressed;
    std::set<std::string>* section = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == ';') continue;
        const std::string lowered = lowercase(line);
        if (lowered == "[stressed]") {
            section = &stressed;
        } else if (lowered == "[unstressed]") {
            section = &unstressed;
        } else if (section == nullptr) {
            throw ParseError("lexicon line " + std::to_string(line_no) + ": tag outside a [stressed]/[unstressed] section");
        } else {
            section->insert(lowercase(line[0] == '#' ? line.substr(1) : line));
        }
    }
    return HashtagLexicon(std::move(stressed), std::move(unstressed));
}

HashtagLexicon HashtagLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon file " + path.string());
    return parse(in);
}

std::optional<int> HashtagLexicon::label_of(std::string_view tag) const {
    const std::string key(tag);
    if (stressed_.count(key)) return kStressed;
    if (unstressed_.count(key)) return kUnstressed;
    return std::nullopt;
}

std::string to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::url: return "url";
        case RejectReason::media: return "media";
        case RejectReason::hashtag_not_terminal: return "hashtag-not-terminal";
        case RejectReason::too_many_hashtags: return "too-many-hashtags";
        case RejectReason::no_label_tag: return "no-label-tag";
        case RejectReason::conflicting_tags: return "conflicting-tags";
        case RejectReason::empty_after_cleaning: return "empty-after-cleaning";
        case RejectReason::duplicate: return "duplicate";
    }
    return "unknown";
}

bool contains_url(std::string_view text) {
    static const std::regex pattern(R"((https?://|www\.|(^|[^a-z0-9_.])t\.co/))", std::regex::icase);
    return std::regex_search(text.begin(), text.end(), pattern);
}

FilterOutcome filter_tweet(const RawTweet& tweet, const HashtagLexicon& lexicon) {
    auto reject = [](RejectReason reason) {
        FilterOutcome out;
        out.reason = reason;
        return out;
    };

    if (contains_url(tweet.text)) return reject(RejectReason::url);
    if (tweet.has_media) return reject(RejectReason::media);

    const auto tokens = split_whitespace(tweet.text);
    if (tokens.empty() || hashtag_of(tokens.back()).empty()) return reject(RejectReason::hashtag_not_terminal);

    std::size_t hashtags = 0;
    bool stressed = false;
    bool unstressed = false;
    for (auto token : tokens) {
        const std::string tag = hashtag_of(token);
        if (tag.empty()) continue;
        ++hashtags;
        if (const auto label = lexicon.label_of(tag)) (*label == kStressed ? stressed : unstressed) = true;
    }
    if (hashtags > kMaxHashtags) return reject(RejectReason::too_many_hashtags);
    if (stressed && unstressed) return reject(RejectReason::conflicting_tags);
    if (!stressed && !unstressed) return reject(RejectReason::no_label_tag);

    std::string cleaned;
    for (auto token : tokens) {
        const std::string tag = hashtag_of(token);
        std::string_view kept = token;
        if (!tag.empty()) {
            if (lexicon.label_of(tag)) continue;
            kept = token.substr(1);
        }
        if (!cleaned.empty()) cleaned += ' ';
        cleaned.append(kept);
    }
    if (cleaned.empty()) return reject(RejectReason::empty_after_cleaning);

    FilterOutcome out;
    out.kept = true;
    out.label = stressed ? kStressed : kUnstressed;
    out.text = std::move(cleaned);
    return out;
}

std::size_t FilterReport::rejected_total() const {
    std::size_t total = 0;
    for (const auto& [reason, count] : rejected) total += count;
    return total;
}

bool FilterReport::is_partition() const { return kept + rejected_total() == input; }

TwitterCorpus build_twitter_corpus(const std::vector<RawTweet>& tweets, const HashtagLexicon& lexicon) {
    TwitterCorpus corpus;
    for (auto reason : kAllRejectReasons) corpus.report.rejected[reason] = 0;
    std::unordered_set<std::string> seen;
    for (const auto& tweet : tweets) {
        ++corpus.report.input;
        FilterOutcome outcome = filter_tweet(tweet, lexicon);
        if (!outcome.kept) {
            ++corpus.report.rejected[outcome.reason];
            continue;
        }
        if (!seen.insert(outcome.text).second) {
            ++corpus.report.rejected[RejectReason::duplicate];
            continue;
        }
        ++corpus.report.kept;
        corpus.utterances.push_back({std::move(outcome.text), outcome.label, std::string("twitter"), std::nullopt});
    }
    return corpus;
}

std::vector<RawTweet> read_tweets(std::istream& in) {
    std::vector<RawTweet> tweets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("tweet line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
        }
        if (!record.is_object() || !record.contains("text") || !record["text"].is_string()) {
            throw ParseError("tweet line " + std::to_string(line_no) + ": missing string field 'text'");
        }
        RawTweet tweet;
        tweet.text = record["text"].get<std::string>();
        if (record.contains("has_media") && !record["has_media"].is_null()) {
            if (!record["has_media"].is_boolean()) {
                throw ParseError("tweet line " + std::to_string(line_no) + ": 'has_media' must be a boolean");
            }
            tweet.has_media = record["has_media"].get<bool>();
        }
        if (trim(tweet.text).empty()) throw DataError("tweet line " + std::to_string(line_no) + ": empty text");
        tweets.push_back(std::move(tweet));
    }
    return tweets;
}

std::vector<RawTweet> load_tweets(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tweet file " + path.string());
    if (in.bad()) throw IoError("cannot read tweet file " + path.string());
    return read_tweets(in);
}

std::string format_report(const FilterReport& report) {
    std::ostringstream out;
    out << "input\t" << report.input << '\n' << "kept\t" << report.kept << '\n';
    for (auto reason : kAllRejectReasons) {
        const auto it = report.rejected.find(reason);
        out << "rejected:" << to_string(reason) << '\t' << (it == report.rejected.end() ? 0 : it->second) << '\n';
    }
    return out.str();
}

std::vector<std::size_t> sample_balanced_indices(std::span<const int> labels, std::size_t per_class, std::uint64_t seed) {
    if (per_class == 0) throw ConfigError("per-class sample size must be at least 1");
    Rng rng(seed);
    std::vector<std::size_t> sample;
    sample.reserve(2 * per_class);
    for (int label : {kUnstressed, kStressed}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) members.push_back(i);
        }
        if (members.empty()) {
            throw DataError(std::string("no ") + (label == kStressed ? "stressed" : "unstressed") +
                            " examples to sample from");
        }
        if (members.size() >= per_class) {
            // Partial Fisher-Yates: the first per_class slots are the sample.
            for (std::size_t k = 0; k < per_class; ++k) {
                std::swap(members[k], members[k + rng.uniform_index(members.size() - k)]);
            }
            sample.insert(sample.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(per_class));
        } else {
            warn("class " + std::to_string(label) + " has only " + std::to_string(members.size()) +
                 " examples; sampling " + std::to_string(per_class) + " with replacement");
            for (std::size_t k = 0; k < per_class; ++k) sample.push_back(members[rng.uniform_index(members.size())]);
        }
    }
    rng.shuffle(sample);
    return sample;
}

std::vector<RawUtterance> sample_balanced(const std::vector<RawUtterance>& corpus, std::size_t per_class, std::uint64_t seed) {
    std::vector<int> labels;
    labels.reserve(corpus.size());
    for (const auto& u : corpus) labels.push_back(u.label);
    std::vector<RawUtterance> out;
    for (std::size_t i : sample_balanced_indices(labels, per_class, seed)) out.push_back(corpus[i]);
    return out;
}

}  // namespace stressnet
