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

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stressnet/cli.hpp"
#include "stressnet/corpus.hpp"
#include "stressnet/model_io.hpp"
#include "synthetic.hpp"

using namespace stressnet;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("stressnet_cli_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string operator/(const std::string& file) const { return (path_ / file).string(); }

private:
    fs::path path_;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& text, const std::string& prefix = "") {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += !line.empty() && line.rfind(prefix, 0) == 0;
    return n;
}

const char* kFixtureTweets =
    R"({"text":"deadline after deadline #stressed"}
{"text":"see pic http://t.co/x #stressed"}
{"text":"#a #b #c #stressed done"}
{"text":"x #a #b #c #stressed"}
{"text":"great day #blessed #stressed"}
)";

std::vector<std::string> small_train_flags(const TempDir& dir, const std::string& model) {
    return {"train",        "--interview", dir / "train.jsonl", "--model-out", dir / model, "--arch", "lstm",
            "--embed-dim",  "6",           "--hidden-dim",      "6",           "--epochs",  "2",      "--pretrain-iterations",
            "0",            "--batch-size", "16",               "--seed",      "5"};
}

void write_interview(const TempDir& dir) {
    store_corpus(dir / "train.jsonl", testing::separable_corpus(20, 1));
    store_corpus(dir / "test.jsonl", testing::separable_corpus(10, 2));
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"no-such-command"}).code == 1);
    CHECK(cli({"build-corpus", "--input", "x"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("build-corpus on the filter fixture") {
    TempDir dir("build");
    write_text(dir / "tweets.jsonl", kFixtureTweets);
    const auto run = cli({"build-corpus", "--input", dir / "tweets.jsonl", "--output", dir / "corpus.jsonl"});
    REQUIRE(run.code == 0);
    CHECK(count_lines(read_text(dir / "corpus.jsonl")) == 1);
    const auto corpus = load_corpus(dir / "corpus.jsonl");
    CHECK(corpus[0].text == "deadline after deadline");
    CHECK(corpus[0].source == "twitter");
    CHECK(run.err.find("kept\t1") != std::string::npos);
    CHECK(run.err.find("rejected:url\t1") != std::string::npos);

    const auto missing = cli({"build-corpus", "--input", dir / "absent.jsonl", "--output", dir / "c.jsonl"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("absent.jsonl") != std::string::npos);

    write_text(dir / "lex.txt", "[stressed]\nstressed\n[unstressed]\nstressed\n");
    CHECK(cli({"build-corpus", "--input", dir / "tweets.jsonl", "--lexicon", dir / "lex.txt", "--output",
               dir / "c.jsonl"})
              .code == 3);
}

TEST_CASE("split command") {
    TempDir dir("split");
    store_corpus(dir / "all.jsonl", testing::separable_corpus(12, 3));
    const auto run = cli({"split", "--input", dir / "all.jsonl", "--train-out", dir / "tr.jsonl", "--test-out",
                          dir / "te.jsonl", "--test-per-class", "4"});
    REQUIRE(run.code == 0);
    const auto test = load_corpus(dir / "te.jsonl");
    CHECK(count_label(test, 0) == 4);
    CHECK(count_label(test, 1) == 4);
    CHECK(load_corpus(dir / "tr.jsonl").size() == 16);
    CHECK(cli({"split", "--input", dir / "all.jsonl", "--train-out", dir / "tr.jsonl", "--test-out", dir / "te.jsonl"})
              .code == 3);
}

TEST_CASE("train, evaluate and predict") {
    TempDir dir("train");
    write_interview(dir);
    auto flags = small_train_flags(dir, "m.bin");
    flags.insert(flags.end(), {"--log", dir / "log.tsv", "--vocab-out", dir / "vocab.txt"});
    const auto run = cli(flags);
    REQUIRE_MESSAGE(run.code == 0, run.err);
    CHECK(count_lines(read_text(dir / "log.tsv"), "finetune") == 2);

    const auto eval = cli({"evaluate", "--model", dir / "m.bin", "--test", dir / "test.jsonl", "--vocab",
                           dir / "vocab.txt", "--report", dir / "report.json"});
    REQUIRE_MESSAGE(eval.code == 0, eval.err);
    CHECK(eval.out.rfind("method\taccu.\tprec.\trecall\tf-score\nLSTM w/ attention\t", 0) == 0);
    const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
    CHECK(report.begin().value().contains("f_score"));

    const auto predict = cli({"predict", "--model", dir / "m.bin", "--json", "stress_marker word1", "calm_marker"});
    REQUIRE(predict.code == 0);
    CHECK(nlohmann::json::parse(predict.out).size() == 2);

    write_text(dir / "empty.jsonl", "");
    CHECK(cli({"evaluate", "--model", dir / "m.bin", "--test", dir / "empty.jsonl"}).code == 3);
    write_text(dir / "other_vocab.txt", "<pad>\n<unk>\nzzz\n");
    CHECK(cli({"evaluate", "--model", dir / "m.bin", "--test", dir / "test.jsonl", "--vocab", dir / "other_vocab.txt"})
              .code == 3);
    CHECK(cli({"evaluate", "--model", dir / "absent.bin", "--test", dir / "test.jsonl"}).code == 2);

    auto pretrain = small_train_flags(dir, "p.bin");
    pretrain[pretrain.size() - 5] = "2";
    CHECK(cli(pretrain).code == 3);
}

TEST_CASE("non-finite training aborts with exit 4") {
    TempDir dir("numeric");
    write_interview(dir);
    auto flags = small_train_flags(dir, "n.bin");
    flags.insert(flags.end(), {"--lr", "1e308"});
    const auto run = cli(flags);
    CHECK(run.code == 4);
    CHECK(!fs::exists(dir / "n.bin"));
}

TEST_CASE("training is byte-deterministic for a fixed seed") {
    TempDir dir("determinism");
    write_interview(dir);
    REQUIRE(cli(small_train_flags(dir, "a.bin")).code == 0);
    REQUIRE(cli(small_train_flags(dir, "b.bin")).code == 0);
    CHECK(read_text(dir / "a.bin") == read_text(dir / "b.bin"));
    auto other = small_train_flags(dir, "c.bin");
    other.back() = "6";
    REQUIRE(cli(other).code == 0);
    CHECK(read_text(dir / "a.bin") != read_text(dir / "c.bin"));
}

TEST_CASE("config file values apply and flags override them") {
    TempDir dir("config");
    write_interview(dir);
    write_text(dir / "run.cfg", "# experiment\narch = blstm\nepochs = 3\nembed-dim = 4\nhidden-dim = 4\n"
                                "pretrain-iterations = 0\nattention = off\n");
    const auto from_file = cli({"train", "--config", dir / "run.cfg", "--interview", dir / "train.jsonl", "--model-out",
                                dir / "a.bin"});
    REQUIRE_MESSAGE(from_file.code == 0, from_file.err);
    CHECK(count_lines(from_file.out, "finetune") == 3);
    const auto file = read_model_file(dir / "a.bin");
    CHECK(file.arch == "blstm");
    CHECK(!file.attention);
    CHECK(file.embed_dim == 4);

    const auto overridden = cli({"train", "--config", dir / "run.cfg", "--interview", dir / "train.jsonl",
                                 "--model-out", dir / "b.bin", "--epochs", "1", "--arch", "lstm"});
    REQUIRE(overridden.code == 0);
    CHECK(count_lines(overridden.out, "finetune") == 1);
    CHECK(read_model_file(dir / "b.bin").arch == "lstm");

    write_text(dir / "bad.cfg", "no_such_key = 1\n");
    CHECK(cli({"train", "--config", dir / "bad.cfg", "--interview", dir / "train.jsonl", "--model-out", dir / "c.bin"})
              .code == 3);
}

TEST_CASE("explain command") {
    TempDir dir("explain");
    write_interview(dir);
    auto flags = small_train_flags(dir, "att.bin");
    REQUIRE(cli(flags).code == 0);

    const auto single = cli({"explain", "--model", dir / "att.bin", "--json", "Stressed"});
    REQUIRE(single.code == 0);
    const auto trace = nlohmann::json::parse(single.out);
    CHECK(trace[0]["tokens"] == std::vector<std::string>{"stressed"});
    CHECK(trace[0]["alphas"][0] == 1.0);

    const std::string text = "Deadlines, deadlines... I can't sleep!";
    const auto many = cli({"explain", "--model", dir / "att.bin", "--json", "--svg", dir / "svg", text});
    REQUIRE(many.code == 0);
    const auto weights = nlohmann::json::parse(many.out)[0];
    CHECK(weights["tokens"].get<std::vector<std::string>>() == tokenize(text));
    double total = 0.0;
    for (double a : weights["alphas"]) total += a;
    CHECK(std::abs(total - 1.0) < 1e-9);
    const auto svg = read_text(dir / "svg/utterance_1.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("can&apos;t") != std::string::npos);

    const auto plain = cli({"explain", "--model", dir / "att.bin", "a b"});
    REQUIRE(plain.code == 0);
    CHECK(plain.out.find("a:") != std::string::npos);

    flags = small_train_flags(dir, "plain.bin");
    flags.insert(flags.end(), {"--attention", "off"});
    REQUIRE(cli(flags).code == 0);
    const auto refused = cli({"explain", "--model", dir / "plain.bin", "hello"});
    CHECK(refused.code == 3);
    CHECK(refused.err.find("attention") != std::string::npos);
}

TEST_CASE("svm training and evaluation") {
    TempDir dir("svm");
    write_interview(dir);
    std::ostringstream table;
    Rng rng(4);
    for (int i = 0; i < 40; ++i) {
        table << "word" << i;
        for (int d = 0; d < 5; ++d) table << ' ' << rng.uniform(-0.1, 0.1);
        table << '\n';
    }
    table << "stress_marker 1 1 1 1 1\ncalm_marker -1 -1 -1 -1 -1\n";
    write_text(dir / "vectors.txt", table.str());
    const auto train = cli({"train-svm", "--train", dir / "train.jsonl", "--embeddings", dir / "vectors.txt",
                            "--model-out", dir / "svm.bin", "--gamma", "0.5"});
    REQUIRE_MESSAGE(train.code == 0, train.err);
    const auto eval = cli({"evaluate", "--model", dir / "svm.bin", "--test", dir / "test.jsonl", "--embeddings",
                           dir / "vectors.txt"});
    REQUIRE(eval.code == 0);
    CHECK(eval.out.find("SVM\t100.0\t100.0\t100.0\t100.0") != std::string::npos);
    CHECK(cli({"evaluate", "--model", dir / "svm.bin", "--test", dir / "test.jsonl"}).code == 1);
    CHECK(cli({"train-svm", "--train", dir / "train.jsonl", "--embeddings", dir / "vectors.txt", "--model-out",
               dir / "x.bin", "--embed-dim", "300"})
              .code == 3);
}
