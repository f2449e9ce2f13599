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

#include "stressnet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "stressnet/errors.hpp"
#include "stressnet/random.hpp"

namespace stressnet {

namespace {

using nlohmann::json;

std::string line_ref(std::size_t line_no) { return "line " + std::to_string(line_no); }

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

int parse_label_field(const json& value, std::size_t line_no) {
    if (!value.is_number_integer()) {
        throw DataError(line_ref(line_no) + ": label must be the integer 0 or 1, got " + value.dump());
    }
    const auto label = value.get<long long>();
    if (label != 0 && label != 1) {
        throw DataError(line_ref(line_no) + ": label must be 0 or 1, got " + std::to_string(label));
    }
    return static_cast<int>(label);
}

RawUtterance parse_jsonl_line(const std::string& line, std::size_t line_no) {
    json record;
    try {
        record = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(line_ref(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) throw ParseError(line_ref(line_no) + ": expected a JSON object");
    if (!record.contains("text") || !record["text"].is_string()) {
        throw ParseError(line_ref(line_no) + ": missing string field 'text'");
    }
    if (!record.contains("label")) throw ParseError(line_ref(line_no) + ": missing field 'label'");

    RawUtterance u;
    u.text = record["text"].get<std::string>();
    u.label = parse_label_field(record["label"], line_no);
    for (const char* key : {"source", "speaker"}) {
        if (!record.contains(key) || record[key].is_null()) continue;
        if (!record[key].is_string()) throw ParseError(line_ref(line_no) + ": field '" + key + "' must be a string");
        (std::string(key) == "source" ? u.source : u.speaker) = record[key].get<std::string>();
    }
    return u;
}

RawUtterance parse_tsv_line(const std::string& line, std::size_t line_no) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_ref(line_no) + ": expected 'label<TAB>text'");
    const std::string label = line.substr(0, tab);
    if (label != "0" && label != "1") {
        throw DataError(line_ref(line_no) + ": label must be 0 or 1, got '" + label + "'");
    }
    RawUtterance u;
    u.label = label == "1" ? kStressed : kUnstressed;
    u.text = line.substr(tab + 1);
    return u;
}

}  // namespace

CorpusFormat format_for(const std::filesystem::path& path) {
    return path.extension() == ".tsv" ? CorpusFormat::tsv : CorpusFormat::jsonl;
}

std::vector<RawUtterance> read_corpus(std::istream& in, CorpusFormat format) {
    std::vector<RawUtterance> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        RawUtterance u = format == CorpusFormat::jsonl ? parse_jsonl_line(line, line_no) : parse_tsv_line(line, line_no);
        if (blank(u.text)) throw DataError(line_ref(line_no) + ": empty text");
        corpus.push_back(std::move(u));
    }
    return corpus;
}

void write_corpus(std::ostream& out, const std::vector<RawUtterance>& corpus, CorpusFormat format) {
    for (const auto& u : corpus) {
        if (format == CorpusFormat::jsonl) {
            json record = json::object();
            record["text"] = u.text;
            record["label"] = u.label;
            if (u.source) record["source"] = *u.source;
            if (u.speaker) record["speaker"] = *u.speaker;
            out << record.dump() << '\n';
        } else {
            if (u.text.find_first_of("\t\n") != std::string::npos) {
                throw DataError("TSV corpus text may not contain tabs or newlines");
            }
            out << u.label << '\t' << u.text << '\n';
        }
    }
}

std::vector<RawUtterance> load_corpus(const std::filesystem::path& path) { return load_corpus(path, format_for(path)); }

std::vector<RawUtterance> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file " + path.string());
    try {
        return read_corpus(in, format);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse) throw ParseError(path.string() + ": " + e.what());
        throw DataError(path.string() + ": " + e.what());
    }
}

void store_corpus(const std::filesystem::path& path, const std::vector<RawUtterance>& corpus) {
    store_corpus(path, corpus, format_for(path));
}

void store_corpus(const std::filesystem::path& path, const std::vector<RawUtterance>& corpus, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file " + path.string());
    write_corpus(out, corpus, format);
    if (!out) throw IoError("failed writing corpus file " + path.string());
}

std::vector<std::vector<std::string>> tokenize_corpus(const std::vector<RawUtterance>& corpus) {
    std::vector<std::vector<std::string>> out;
    out.reserve(corpus.size());
    for (const auto& u : corpus) out.push_back(tokenize(u.text));
    return out;
}

std::vector<Example> encode_corpus(const Vocabulary& vocab, const std::vector<RawUtterance>& corpus, std::size_t max_len) {
    std::vector<Example> out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto tokens = tokenize(corpus[i].text);
        if (tokens.empty()) throw DataError("utterance " + std::to_string(i + 1) + " has no tokens");
        out.push_back({encode(vocab, tokens, max_len), corpus[i].label});
    }
    return out;
}

std::size_t count_label(const std::vector<RawUtterance>& corpus, int label) {
    return static_cast<std::size_t>(
        std::count_if(corpus.begin(), corpus.end(), [label](const RawUtterance& u) { return u.label == label; }));
}

std::pair<std::vector<RawUtterance>, std::vector<RawUtterance>> split_interview(const std::vector<RawUtterance>& corpus,
                                                                                const SplitSpec& spec) {
    if (spec.test_per_class == 0) throw ConfigError("test_per_class must be at least 1");
    const std::size_t unstressed = count_label(corpus, kUnstressed);
    const std::size_t stressed = count_label(corpus, kStressed);
    if (unstressed < spec.test_per_class || stressed < spec.test_per_class) {
        throw DataError("split needs " + std::to_string(spec.test_per_class) + " utterances per class; have " +
                        std::to_string(unstressed) + " unstressed and " + std::to_string(stressed) + " stressed");
    }

    Rng rng(spec.seed);
    std::vector<bool> in_test(corpus.size(), false);
    for (int label : {kUnstressed, kStressed}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (corpus[i].label == label) members.push_back(i);
        }
        rng.shuffle(members);
        for (std::size_t k = 0; k < spec.test_per_class; ++k) in_test[members[k]] = true;
    }

    std::pair<std::vector<RawUtterance>, std::vector<RawUtterance>> result;
    for (std::size_t i = 0; i < corpus.size(); ++i) (in_test[i] ? result.second : result.first).push_back(corpus[i]);
    return result;
}

}  // namespace stressnet
