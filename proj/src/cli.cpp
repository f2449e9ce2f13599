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

#include "stressnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stressnet/corpus.hpp"
#include "stressnet/distant_supervision.hpp"
#include "stressnet/errors.hpp"
#include "stressnet/metrics.hpp"
#include "stressnet/svm.hpp"
#include "stressnet/training.hpp"

namespace stressnet {

namespace {

constexpr std::uint64_t kInitStream = 0;

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Flat "key = value" file; keys are long option names without dashes.
// Options given on the command line win.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        CLI::Option* opt = nullptr;
        try {
            opt = cmd.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (key == "config") throw ConfigError(path + ": config files cannot include other config files");
        if (opt->count() > 0) continue;
        opt->add_result(value);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

bool parse_switch(const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw ConfigError("expected on|off, got '" + value + "'");
}

std::string method_name(const ModelFile& file) {
    if (file.arch == "svm") return "SVM";
    std::string name = file.arch == "blstm" ? "BLSTM" : "LSTM";
    if (file.attention) name += " w/ attention";
    return name;
}

// ---------------------------------------------------------------------------

struct BuildCorpusArgs {
    std::string input;
    std::string lexicon;
    std::string output;
    bool json = false;
};

int cmd_build_corpus(const BuildCorpusArgs& a, std::ostream& out, std::ostream& err) {
    const HashtagLexicon lexicon = a.lexicon.empty() ? HashtagLexicon::default_lexicon() : HashtagLexicon::load(a.lexicon);
    const auto tweets = load_tweets(a.input);
    const TwitterCorpus corpus = build_twitter_corpus(tweets, lexicon);
    store_corpus(a.output, corpus.utterances);
    err << format_report(corpus.report);
    if (a.json) {
        nlohmann::ordered_json report;
        report["input"] = corpus.report.input;
        report["kept"] = corpus.report.kept;
        for (auto reason : kAllRejectReasons) report["rejected"][to_string(reason)] = corpus.report.rejected.at(reason);
        out << report.dump(2) << '\n';
    } else {
        out << "wrote " << corpus.utterances.size() << " utterances to " << a.output << '\n';
    }
    return 0;
}

struct SplitArgs {
    std::string input;
    std::string train_out;
    std::string test_out;
    SplitSpec spec;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
    const auto corpus = load_corpus(a.input);
    const auto [train, test] = split_interview(corpus, a.spec);
    store_corpus(a.train_out, train);
    store_corpus(a.test_out, test);
    out << "train\t" << train.size() << "\ntest\t" << test.size() << '\n';
    return 0;
}

struct TrainArgs {
    std::string config;
    std::string twitter;
    std::string interview;
    std::string model_out;
    std::string log;
    std::string vocab_out;
    std::string arch = "blstm";
    std::string attention = "on";
    std::size_t embed_dim = 100;
    std::size_t hidden_dim = 64;
    std::size_t min_count = 0;  // 0: 1 for interview only, 2 with twitter
    TrainConfig train;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    a.train.validate();
    ModelConfig model_cfg;
    model_cfg.arch = parse_architecture(a.arch);
    model_cfg.attention = parse_switch(a.attention);
    model_cfg.embed_dim = a.embed_dim;
    model_cfg.hidden_dim = a.hidden_dim;

    const auto interview = load_corpus(a.interview);
    if (interview.empty()) throw DataError("interview corpus " + a.interview + " is empty");
    std::vector<RawUtterance> twitter;
    if (!a.twitter.empty()) twitter = load_corpus(a.twitter);
    if (a.train.pretrain_iterations > 0 && twitter.empty()) {
        throw DataError("pretraining requested but no twitter corpus was supplied (use --twitter or --pretrain-iterations 0)");
    }

    auto sentences = tokenize_corpus(interview);
    const auto twitter_tokens = tokenize_corpus(twitter);
    sentences.insert(sentences.end(), twitter_tokens.begin(), twitter_tokens.end());
    const std::size_t min_count = a.min_count > 0 ? a.min_count : (twitter.empty() ? 1 : 2);
    const Vocabulary vocab = build_vocab(sentences, min_count);
    model_cfg.vocab_size = vocab.size();

    const auto interview_examples = encode_corpus(vocab, interview, a.train.max_len);
    const auto twitter_examples = encode_corpus(vocab, twitter, a.train.max_len);

    Model model(model_cfg);
    Rng init_rng = Rng::derive(a.train.seed, kInitStream);
    model.initialize(init_rng);
    const TrainingRun run = two_phase_train(model, twitter_examples, interview_examples, a.train);

    write_model_file(a.model_out, to_model_file(model, vocab, a.train.max_len));
    if (!a.vocab_out.empty()) save_vocabulary(vocab, a.vocab_out);
    if (!a.log.empty()) {
        std::ofstream log(a.log, std::ios::app);
        if (!log) throw IoError("cannot open training log " + a.log);
        for (const auto& entry : run.log) log << format_log_line(entry) << '\n';
    }
    for (const auto& entry : run.log) out << format_log_line(entry) << '\n';
    out << "vocabulary\t" << vocab.size() << "\nmodel\t" << a.model_out << '\n';
    return 0;
}

struct TrainSvmArgs {
    std::string train;
    std::string embeddings;
    std::string model_out;
    std::string on_uncovered = "error";
    std::size_t embed_dim = 0;
    SvmParams params;
};

std::vector<Vector> sentence_vectors(const std::vector<RawUtterance>& corpus,
                                     const EmbeddingTable& table,
                                     bool zero_uncovered,
                                     std::vector<int>* labels) {
    std::vector<Vector> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto tokens = tokenize(corpus[i].text);
        try {
            out.push_back(sentence_vector(tokens, table));
        } catch (const CoverageError&) {
            if (!zero_uncovered) {
                throw CoverageError("utterance " + std::to_string(i + 1) + " has no token in the embedding table");
            }
            warn("utterance " + std::to_string(i + 1) + " has no embedded token; using the zero vector");
            out.emplace_back(table.dim());
        }
        if (labels) labels->push_back(corpus[i].label);
    }
    return out;
}

int cmd_train_svm(const TrainSvmArgs& a, std::ostream& out) {
    if (a.on_uncovered != "error" && a.on_uncovered != "zero") throw ConfigError("--on-uncovered must be error or zero");
    const auto corpus = load_corpus(a.train);
    const EmbeddingTable table = EmbeddingTable::load(a.embeddings, a.embed_dim);
    std::vector<int> labels;
    const auto vectors = sentence_vectors(corpus, table, a.on_uncovered == "zero", &labels);
    std::vector<int> signed_labels;
    for (int l : labels) signed_labels.push_back(to_signed_label(l));
    const SvmTrainResult result = svm_train(vectors, signed_labels, a.params);
    write_model_file(a.model_out, to_model_file(result.model));
    out << "support_vectors\t" << result.model.support_vectors.size() << "\ngamma\t" << fixed(result.model.gamma, 6)
        << "\nmodel\t" << a.model_out << '\n';
    return 0;
}

struct EvaluateArgs {
    std::string model;
    std::string test;
    std::string embeddings;
    std::string vocab;
    std::string method;
    std::string report;
    bool json = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    const ModelFile file = read_model_file(a.model);
    const auto corpus = load_corpus(a.test);
    if (corpus.empty()) throw DataError("test corpus " + a.test + " is empty");

    std::vector<int> labels;
    std::vector<int> predictions;
    if (file.arch == "svm") {
        if (a.embeddings.empty()) throw UsageError("--embeddings is required to evaluate an SVM model");
        const SvmModel svm = svm_from_file(file);
        const EmbeddingTable table = EmbeddingTable::load(a.embeddings, svm.dim());
        for (const auto& v : sentence_vectors(corpus, table, true, &labels)) predictions.push_back(svm_predict(svm, v));
    } else {
        const NeuralBundle bundle = neural_from_file(file);
        if (!a.vocab.empty() && load_vocabulary(a.vocab).fingerprint() != bundle.vocabulary.fingerprint()) {
            throw DataError("vocabulary " + a.vocab + " does not match the model's vocabulary");
        }
        const auto examples = encode_corpus(bundle.vocabulary, corpus, bundle.max_len);
        predictions = evaluate_model(bundle.model, examples).predictions;
        for (const auto& e : examples) labels.push_back(e.label);
    }

    const Metrics m = metrics(confusion(predictions, labels));
    const std::string method = a.method.empty() ? method_name(file) : a.method;
    const std::string json = format_metrics_json({{method, m}});
    if (!a.report.empty()) {
        std::ofstream report(a.report, std::ios::binary);
        if (!report) throw IoError("cannot write report " + a.report);
        report << json << '\n';
    }
    if (a.json) {
        out << json << '\n';
    } else {
        out << "method\taccu.\tprec.\trecall\tf-score\n" << format_metrics_tsv(method, m) << '\n';
    }
    return 0;
}

struct PredictArgs {
    std::string model;
    std::vector<std::string> texts;
    bool json = false;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    const NeuralBundle bundle = neural_from_file(read_model_file(a.model));
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& text : a.texts) {
        const auto tokens = tokenize(text);
        const auto cache = bundle.model.infer(encode(bundle.vocabulary, tokens, bundle.max_len));
        const int label = predict_label(cache.probabilities);
        if (a.json) {
            all.push_back({{"text", text}, {"predicted", label}, {"probabilities", cache.probabilities.values()}});
        } else {
            out << label << '\t' << fixed(cache.probabilities[1], 4) << '\t' << text << '\n';
        }
    }
    if (a.json) out << all.dump(2) << '\n';
    return 0;
}

struct ExplainArgs {
    std::string model;
    std::vector<std::string> texts;
    std::string svg_dir;
    bool json = false;
};

int cmd_explain(const ExplainArgs& a, std::ostream& out) {
    const NeuralBundle bundle = neural_from_file(read_model_file(a.model));
    if (!bundle.model.config().attention) {
        throw ConfigError("model " + a.model + " was trained without attention; there are no weights to explain");
    }
    if (!a.svg_dir.empty()) std::filesystem::create_directories(a.svg_dir);
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < a.texts.size(); ++i) {
        const AttentionTrace trace = explain(bundle, a.texts[i]);
        if (a.json) {
            all.push_back({{"text", a.texts[i]},
                           {"tokens", trace.tokens},
                           {"alphas", trace.alphas},
                           {"predicted", trace.predicted},
                           {"probabilities", trace.probabilities}});
        } else {
            out << "predicted=" << trace.predicted << " p(stressed)=" << fixed(trace.probabilities[1], 4) << '\n'
                << format_trace(trace) << '\n';
        }
        if (!a.svg_dir.empty()) {
            const auto path = std::filesystem::path(a.svg_dir) / ("utterance_" + std::to_string(i + 1) + ".svg");
            std::ofstream svg(path, std::ios::binary);
            if (!svg) throw IoError("cannot write " + path.string());
            svg << render_heatmap_svg(trace);
        }
    }
    if (a.json) out << all.dump(2) << '\n';
    return 0;
}

}  // namespace

AttentionTrace explain(const NeuralBundle& bundle, const std::string& text) {
    if (!bundle.model.config().attention) throw ConfigError("model has no attention layer");
    auto tokens = tokenize(text);
    if (tokens.empty()) throw DataError("text has no tokens: '" + text + "'");
    if (tokens.size() > bundle.max_len) tokens.resize(bundle.max_len);
    const auto cache = bundle.model.infer(encode(bundle.vocabulary, tokens, bundle.max_len));

    AttentionTrace trace;
    trace.tokens = tokens;
    for (std::size_t t = 0; t < tokens.size(); ++t) trace.alphas.push_back(cache.attention->alphas[t]);
    trace.predicted = predict_label(cache.probabilities);
    trace.probabilities = cache.probabilities.values();
    return trace;
}

std::string format_trace(const AttentionTrace& trace) {
    std::string out;
    for (std::size_t t = 0; t < trace.tokens.size(); ++t) {
        if (t > 0) out += ' ';
        out += trace.tokens[t] + ':' + fixed(trace.alphas[t], 3);
    }
    return out;
}

std::string render_heatmap_svg(const AttentionTrace& trace) {
    constexpr double kCharWidth = 9.0;
    constexpr double kPadding = 8.0;
    constexpr double kHeight = 32.0;
    const double top = trace.alphas.empty() ? 0.0 : *std::max_element(trace.alphas.begin(), trace.alphas.end());

    std::vector<double> widths;
    double total = 0.0;
    for (const auto& token : trace.tokens) {
        widths.push_back(kPadding * 2 + kCharWidth * static_cast<double>(std::max<std::size_t>(token.size(), 1)));
        total += widths.back();
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(total, 1) << "\" height=\"" << fixed(kHeight + 20, 1)
        << "\" font-family=\"monospace\" font-size=\"14\">\n";
    svg << "  <title>predicted " << trace.predicted << "</title>\n";
    double x = 0.0;
    for (std::size_t t = 0; t < trace.tokens.size(); ++t) {
        const double shade = top > 0.0 ? trace.alphas[t] / top : 0.0;
        svg << "  <g>\n"
            << "    <rect x=\"" << fixed(x, 1) << "\" y=\"0\" width=\"" << fixed(widths[t], 1) << "\" height=\"" << fixed(kHeight, 1)
            << "\" fill=\"#b2182b\" fill-opacity=\"" << fixed(shade, 4) << "\" stroke=\"#cccccc\"/>\n"
            << "    <text x=\"" << fixed(x + kPadding, 1) << "\" y=\"21\" fill=\"" << (shade > 0.6 ? "#ffffff" : "#000000")
            << "\">" << xml_escape(trace.tokens[t]) << "</text>\n"
            << "    <text x=\"" << fixed(x + kPadding, 1) << "\" y=\"46\" font-size=\"10\" fill=\"#555555\">"
            << fixed(trace.alphas[t], 3) << "</text>\n"
            << "  </g>\n";
        x += widths[t];
    }
    svg << "</svg>\n";
    return svg.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attention LSTM/BLSTM stress classifier toolkit"};
    app.require_subcommand(1);

    BuildCorpusArgs build;
    auto* build_cmd = app.add_subcommand("build-corpus", "Label tweets by hashtag and write a JSONL corpus");
    build_cmd->add_option("--input", build.input, "Tweet dump (JSONL with text, has_media)")->required();
    build_cmd->add_option("--lexicon", build.lexicon, "Lexicon file with [stressed]/[unstressed] sections");
    build_cmd->add_option("--output", build.output, "Output corpus path")->required();
    build_cmd->add_flag("--json", build.json, "Print the filter report as JSON");

    SplitArgs split;
    auto* split_cmd = app.add_subcommand("split", "Hold out a per-class test set from an interview corpus");
    split_cmd->add_option("--input", split.input)->required();
    split_cmd->add_option("--train-out", split.train_out)->required();
    split_cmd->add_option("--test-out", split.test_out)->required();
    split_cmd->add_option("--test-per-class", split.spec.test_per_class)->capture_default_str();
    split_cmd->add_option("--seed", split.spec.seed)->envname("STRESSNET_SEED")->capture_default_str();

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train an (B)LSTM classifier with optional pretraining");
    train_cmd->add_option("--config", train.config, "Flat key = value file; flags override it");
    train_cmd->add_option("--twitter", train.twitter, "Distant-supervision corpus for pretraining");
    train_cmd->add_option("--interview", train.interview, "Interview training corpus");
    train_cmd->add_option("--model-out", train.model_out, "Output model file");
    train_cmd->add_option("--log", train.log, "Append per-epoch log lines here");
    train_cmd->add_option("--vocab-out", train.vocab_out, "Write the vocabulary here");
    train_cmd->add_option("--arch", train.arch)->capture_default_str();
    train_cmd->add_option("--attention", train.attention, "on|off")->capture_default_str();
    train_cmd->add_option("--embed-dim", train.embed_dim)->capture_default_str();
    train_cmd->add_option("--hidden-dim", train.hidden_dim)->capture_default_str();
    train_cmd->add_option("--min-count", train.min_count, "0 picks 1 (interview only) or 2 (with twitter)");
    train_cmd->add_option("--pretrain-iterations", train.train.pretrain_iterations)->capture_default_str();
    train_cmd->add_option("--pretrain-epochs", train.train.pretrain_epochs)->capture_default_str();
    train_cmd->add_option("--epochs", train.train.finetune_epochs, "Fine-tuning epochs")->capture_default_str();
    train_cmd->add_option("--patience", train.train.patience)->capture_default_str();
    train_cmd->add_option("--tweets-per-class", train.train.tweets_per_class)->capture_default_str();
    train_cmd->add_option("--batch-size", train.train.batch_size)->capture_default_str();
    train_cmd->add_option("--lr", train.train.learning_rate)->capture_default_str();
    train_cmd->add_option("--dropout", train.train.dropout)->capture_default_str();
    train_cmd->add_option("--max-len", train.train.max_len)->capture_default_str();
    train_cmd->add_option("--val-fraction", train.train.val_fraction)->capture_default_str();
    train_cmd->add_option("--seed", train.train.seed)->envname("STRESSNET_SEED")->capture_default_str();

    TrainSvmArgs svm;
    auto* svm_cmd = app.add_subcommand("train-svm", "Train the RBF SVM baseline on mean word vectors");
    svm_cmd->add_option("--train", svm.train)->required();
    svm_cmd->add_option("--embeddings", svm.embeddings, "Text embedding table: token v1 ... vk")->required();
    svm_cmd->add_option("--model-out", svm.model_out)->required();
    svm_cmd->add_option("--embed-dim", svm.embed_dim, "Expected vector width (0 accepts any)");
    svm_cmd->add_option("--on-uncovered", svm.on_uncovered, "error|zero")->capture_default_str();
    svm_cmd->add_option("--C", svm.params.c)->capture_default_str();
    svm_cmd->add_option("--gamma", svm.params.gamma, "<= 0 selects 1/(k*var)")->capture_default_str();
    svm_cmd->add_option("--tol", svm.params.tol)->capture_default_str();
    svm_cmd->add_option("--max-iter", svm.params.max_iterations)->capture_default_str();

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Accuracy, precision, recall and f-score on a test corpus");
    eval_cmd->add_option("--model", eval.model)->required();
    eval_cmd->add_option("--test", eval.test)->required();
    eval_cmd->add_option("--embeddings", eval.embeddings, "Embedding table (SVM models)");
    eval_cmd->add_option("--vocab", eval.vocab, "Vocabulary file that must match the model");
    eval_cmd->add_option("--method", eval.method, "Row name in the report");
    eval_cmd->add_option("--report", eval.report, "Write the JSON report here");
    eval_cmd->add_flag("--json", eval.json);

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Classify utterances");
    predict_cmd->add_option("--model", predict.model)->required();
    predict_cmd->add_option("text", predict.texts)->required();
    predict_cmd->add_flag("--json", predict.json);

    ExplainArgs explain_args;
    auto* explain_cmd = app.add_subcommand("explain", "Print per-token attention weights");
    explain_cmd->add_option("--model", explain_args.model)->required();
    explain_cmd->add_option("text", explain_args.texts)->required();
    explain_cmd->add_option("--svg", explain_args.svg_dir, "Write one SVG heatmap per utterance here");
    explain_cmd->add_flag("--json", explain_args.json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*build_cmd) return cmd_build_corpus(build, out, err);
        if (*split_cmd) return cmd_split(split, out);
        if (*train_cmd) {
            if (!train.config.empty()) apply_config_file(*train_cmd, train.config);
            if (train.interview.empty()) throw UsageError("--interview is required (flag or config key)");
            if (train.model_out.empty()) throw UsageError("--model-out is required (flag or config key)");
            return cmd_train(train, out);
        }
        if (*svm_cmd) return cmd_train_svm(svm, out);
        if (*eval_cmd) return cmd_evaluate(eval, out);
        if (*predict_cmd) return cmd_predict(predict, out);
        if (*explain_cmd) return cmd_explain(explain_args, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"stressnet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace stressnet
