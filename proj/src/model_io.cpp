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

#include "stressnet/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "stressnet/errors.hpp"

namespace stressnet {

namespace {

constexpr char kMagic[4] = {'S', 'N', 'E', 'T'};

class Writer {
public:
    void bytes(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }

    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }

    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& in) : in_(in) {}

    const char* bytes(std::size_t n) {
        if (n > in_.size() - pos_) throw ParseError("model file truncated at byte " + std::to_string(pos_));
        const char* p = in_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::uint8_t u8() { return static_cast<std::uint8_t>(*bytes(1)); }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string str() {
        const std::uint64_t n = u64();
        const char* p = bytes(n);
        return std::string(p, n);
    }

    bool done() const { return pos_ == in_.size(); }

private:
    const std::string& in_;
    std::size_t pos_ = 0;
};

void load_tensor(Parameter& p, const std::vector<NamedTensor>& tensors) {
    for (const auto& t : tensors) {
        if (t.name != p.name) continue;
        if (t.value.rows() != p.value.rows() || t.value.cols() != p.value.cols()) {
            throw DataError("tensor " + t.name + " has shape " + std::to_string(t.value.rows()) + "x" +
                            std::to_string(t.value.cols()) + ", expected " + std::to_string(p.value.rows()) + "x" +
                            std::to_string(p.value.cols()));
        }
        p.value = t.value;
        return;
    }
    throw DataError("model file lacks tensor " + p.name);
}

const NamedTensor& find_tensor(const ModelFile& file, const std::string& name) {
    for (const auto& t : file.tensors) {
        if (t.name == name) return t;
    }
    throw DataError("model file lacks tensor " + name);
}

}  // namespace

std::string encode_model_file(const ModelFile& file) {
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kModelFormatVersion);
    w.str(file.arch);
    w.u8(file.attention ? 1 : 0);
    w.u64(file.vocab_size);
    w.u64(file.embed_dim);
    w.u64(file.hidden_dim);
    w.u64(file.attention_dim);
    w.u64(file.max_len);
    w.u64(file.vocabulary.size());
    for (const auto& token : file.vocabulary) w.str(token);
    w.u64(file.tensors.size());
    for (const auto& t : file.tensors) {
        w.str(t.name);
        w.u64(t.value.rows());
        w.u64(t.value.cols());
        for (double x : t.value.data()) w.f64(x);
    }
    return w.take();
}

ModelFile decode_model_file(const std::string& bytes) {
    Reader r(bytes);
    if (std::memcmp(r.bytes(sizeof kMagic), kMagic, sizeof kMagic) != 0) throw ParseError("not a stressnet model file");
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion) throw ParseError("unsupported model format version " + std::to_string(version));

    ModelFile file;
    file.arch = r.str();
    const std::uint8_t attention = r.u8();
    if (attention > 1) throw ParseError("bad attention flag in model header");
    file.attention = attention == 1;
    file.vocab_size = r.u64();
    file.embed_dim = r.u64();
    file.hidden_dim = r.u64();
    file.attention_dim = r.u64();
    file.max_len = r.u64();
    const std::uint64_t tokens = r.u64();
    for (std::uint64_t i = 0; i < tokens; ++i) file.vocabulary.push_back(r.str());
    const std::uint64_t tensors = r.u64();
    for (std::uint64_t i = 0; i < tensors; ++i) {
        NamedTensor t;
        t.name = r.str();
        const std::uint64_t rows = r.u64();
        const std::uint64_t cols = r.u64();
        if (cols != 0 && rows > (bytes.size() / 8) / cols) throw ParseError("tensor " + t.name + " larger than file");
        t.value = Matrix(rows, cols);
        for (double& x : t.value.data()) x = r.f64();
        file.tensors.push_back(std::move(t));
    }
    if (!r.done()) throw ParseError("trailing bytes after model payload");
    return file;
}

void write_model_file(const std::filesystem::path& path, const ModelFile& file) {
    const std::string bytes = encode_model_file(file);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing model file " + path.string());
}

ModelFile read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_model_file(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ModelFile to_model_file(const Model& model, const Vocabulary& vocab, std::size_t max_len) {
    const ModelConfig& cfg = model.config();
    if (vocab.size() != cfg.vocab_size) throw DataError("vocabulary size does not match the embedding table");
    ModelFile file;
    file.arch = to_string(cfg.arch);
    file.attention = cfg.attention;
    file.vocab_size = cfg.vocab_size;
    file.embed_dim = cfg.embed_dim;
    file.hidden_dim = cfg.hidden_dim;
    file.attention_dim = cfg.attention ? cfg.recurrent_width() : 0;
    file.max_len = max_len;
    file.vocabulary = vocab.tokens();
    for (const Parameter* p : model.parameters()) file.tensors.push_back({p->name, p->value});
    return file;
}

NeuralBundle neural_from_file(const ModelFile& file) {
    if (file.arch == "svm") throw DataError("model file holds an SVM, not a neural model");
    ModelConfig cfg;
    cfg.arch = parse_architecture(file.arch);
    cfg.attention = file.attention;
    cfg.vocab_size = file.vocab_size;
    cfg.embed_dim = file.embed_dim;
    cfg.hidden_dim = file.hidden_dim;
    if (file.attention && file.attention_dim != cfg.recurrent_width()) throw DataError("attention width mismatch in header");
    if (file.vocabulary.size() != file.vocab_size) throw DataError("vocabulary length disagrees with header");
    if (file.max_len == 0) throw DataError("model header has max_len 0");

    NeuralBundle bundle{Model(cfg), Vocabulary::from_tokens(file.vocabulary), file.max_len};
    const auto params = bundle.model.parameters();
    if (params.size() != file.tensors.size()) throw DataError("model file has an unexpected number of tensors");
    for (auto* p : params) load_tensor(*p, file.tensors);
    return bundle;
}

ModelFile to_model_file(const SvmModel& model) {
    ModelFile file;
    file.arch = "svm";
    file.embed_dim = model.dim();
    const std::size_t n = model.support_vectors.size();
    Matrix support(n, model.dim());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < model.dim(); ++j) support(i, j) = model.support_vectors[i][j];
    }
    Matrix coef(1, n);
    for (std::size_t i = 0; i < n; ++i) coef(0, i) = model.coefficients[i];
    file.tensors.push_back({"svm.support_vectors", support});
    file.tensors.push_back({"svm.dual_coef", coef});
    file.tensors.push_back({"svm.bias", Matrix{{model.bias}}});
    file.tensors.push_back({"svm.gamma", Matrix{{model.gamma}}});
    file.tensors.push_back({"svm.c", Matrix{{model.c}}});
    return file;
}

SvmModel svm_from_file(const ModelFile& file) {
    if (file.arch != "svm") throw DataError("model file holds a " + file.arch + " model, not an SVM");
    const Matrix& support = find_tensor(file, "svm.support_vectors").value;
    const Matrix& coef = find_tensor(file, "svm.dual_coef").value;
    if (coef.rows() != 1 || coef.cols() != support.rows()) throw DataError("SVM coefficient count mismatch");
    if (support.rows() > 0 && support.cols() != file.embed_dim) throw DataError("SVM feature width mismatch");
    SvmModel model;
    for (std::size_t i = 0; i < support.rows(); ++i) {
        const auto row = support.row(i);
        model.support_vectors.emplace_back(std::vector<double>(row.begin(), row.end()));
        model.coefficients.push_back(coef(0, i));
    }
    model.bias = find_tensor(file, "svm.bias").value(0, 0);
    model.gamma = find_tensor(file, "svm.gamma").value(0, 0);
    model.c = find_tensor(file, "svm.c").value(0, 0);
    return model;
}

}  // namespace stressnet
