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

#include "stressnet/layers.hpp"

#include <cmath>

#include "stressnet/errors.hpp"

namespace stressnet {

namespace {

void fill_uniform(Parameter& p, Rng& rng, double range) {
    for (double& x : p.value.data()) x = rng.uniform(-range, range);
}

void require_mask_length(std::size_t n, std::span<const std::uint8_t> mask) {
    if (mask.size() != n) {
        throw ShapeError("mask length " + std::to_string(mask.size()) + " does not match sequence length " +
                         std::to_string(n));
    }
}

Vector as_vector(const Parameter& p) {
    return Vector(std::vector<double>(p.value.data().begin(), p.value.data().end()));
}

void accumulate(Parameter& p, const Vector& g) {
    auto dst = p.grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

}  // namespace

// ---------------------------------------------------------------------------
// Embedding

EmbeddingLayer::EmbeddingLayer(std::size_t vocab_size, std::size_t dim)
    : table_("embedding", vocab_size, dim) {}

void EmbeddingLayer::initialize(Rng& rng, double range) {
    fill_uniform(table_, rng, range);
    for (double& x : table_.value.row(kPadIndex)) x = 0.0;
}

std::vector<Vector> EmbeddingLayer::forward(std::span<const std::size_t> tokens) const {
    std::vector<Vector> out;
    out.reserve(tokens.size());
    for (std::size_t token : tokens) {
        if (token >= vocab_size()) {
            throw VocabularyError("token index " + std::to_string(token) + " outside vocabulary of size " +
                                  std::to_string(vocab_size()));
        }
        const auto row = table_.value.row(token);
        out.emplace_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
}

void EmbeddingLayer::backward(std::span<const std::size_t> tokens,
                              std::span<const std::uint8_t> mask,
                              const std::vector<Vector>& d_out) {
    require_mask_length(tokens.size(), mask);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (!mask[t] || tokens[t] == kPadIndex) continue;
        auto row = table_.grad.row(tokens[t]);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += d_out[t][j];
    }
}

// ---------------------------------------------------------------------------
// LSTM

LstmCell::LstmCell(const std::string& name, std::size_t input_dim, std::size_t hidden_dim)
    : w_input_(name + ".w_input", 4 * hidden_dim, input_dim),
      w_hidden_(name + ".w_hidden", 4 * hidden_dim, hidden_dim),
      bias_(name + ".bias", 4 * hidden_dim, 1) {}

void LstmCell::initialize(Rng& rng, double range) {
    fill_uniform(w_input_, rng, range);
    fill_uniform(w_hidden_, rng, range);
    fill_uniform(bias_, rng, range);
    const std::size_t h = hidden_dim();
    for (std::size_t j = h; j < 2 * h; ++j) bias_.value(j, 0) = kForgetBiasInit;
}

LstmCache LstmCell::forward(const std::vector<Vector>& inputs,
                            std::span<const std::uint8_t> mask,
                            bool reverse) const {
    const std::size_t n = inputs.size();
    const std::size_t h = hidden_dim();
    require_mask_length(n, mask);

    LstmCache cache;
    cache.reverse = reverse;
    cache.input_gate.resize(n);
    cache.forget_gate.resize(n);
    cache.candidate.resize(n);
    cache.output_gate.resize(n);
    cache.cell.resize(n);
    cache.hidden.resize(n);

    Vector h_prev(h);
    Vector c_prev(h);
    const Vector bias = as_vector(bias_);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t t = reverse ? n - 1 - s : s;
        if (!mask[t]) {
            cache.hidden[t] = h_prev;
            cache.cell[t] = c_prev;
            continue;
        }
        if (inputs[t].size() != input_dim()) throw ShapeError("lstm input width mismatch");

        Vector pre = add(add(matvec(w_input_.value, inputs[t]), matvec(w_hidden_.value, h_prev)), bias);
        Vector i(h), f(h), g(h), o(h), c(h), out(h);
        for (std::size_t j = 0; j < h; ++j) {
            i[j] = sigmoid(pre[j]);
            f[j] = sigmoid(pre[h + j]);
            g[j] = std::tanh(pre[2 * h + j]);
            o[j] = sigmoid(pre[3 * h + j]);
            c[j] = f[j] * c_prev[j] + i[j] * g[j];
            out[j] = o[j] * std::tanh(c[j]);
        }
        cache.input_gate[t] = std::move(i);
        cache.forget_gate[t] = std::move(f);
        cache.candidate[t] = std::move(g);
        cache.output_gate[t] = std::move(o);
        cache.cell[t] = c;
        cache.hidden[t] = out;
        h_prev = std::move(out);
        c_prev = std::move(c);
    }
    return cache;
}

std::vector<Vector> LstmCell::backward(const LstmCache& cache,
                                       const std::vector<Vector>& inputs,
                                       std::span<const std::uint8_t> mask,
                                       const std::vector<Vector>& d_hidden) {
    const std::size_t n = inputs.size();
    const std::size_t h = hidden_dim();
    require_mask_length(n, mask);
    if (cache.hidden.size() != n || d_hidden.size() != n) {
        throw UsageError("lstm backward called without a matching forward cache");
    }

    std::vector<Vector> d_inputs(n, Vector(input_dim()));
    Vector dh_carry(h);
    Vector dc_carry(h);
    const Vector zero(h);

    for (std::size_t s = n; s-- > 0;) {
        const std::size_t t = cache.reverse ? n - 1 - s : s;
        Vector dh = add(d_hidden[t], dh_carry);
        if (!mask[t]) {
            dh_carry = std::move(dh);
            continue;
        }
        const bool first = s == 0;
        const std::size_t prev = cache.reverse ? t + 1 : t - 1;
        const Vector& h_prev = first ? zero : cache.hidden[prev];
        const Vector& c_prev = first ? zero : cache.cell[prev];

        const Vector& i = cache.input_gate[t];
        const Vector& f = cache.forget_gate[t];
        const Vector& g = cache.candidate[t];
        const Vector& o = cache.output_gate[t];
        const Vector& c = cache.cell[t];

        Vector d_pre(4 * h);
        Vector dc_next(h);
        for (std::size_t j = 0; j < h; ++j) {
            const double tc = std::tanh(c[j]);
            const double d_o = dh[j] * tc;
            const double dc = dc_carry[j] + dh[j] * o[j] * (1.0 - tc * tc);
            const double d_i = dc * g[j];
            const double d_g = dc * i[j];
            const double d_f = dc * c_prev[j];
            dc_next[j] = dc * f[j];
            d_pre[j] = d_i * i[j] * (1.0 - i[j]);
            d_pre[h + j] = d_f * f[j] * (1.0 - f[j]);
            d_pre[2 * h + j] = d_g * (1.0 - g[j] * g[j]);
            d_pre[3 * h + j] = d_o * o[j] * (1.0 - o[j]);
        }
        add_outer(w_input_.grad, d_pre, inputs[t]);
        add_outer(w_hidden_.grad, d_pre, h_prev);
        accumulate(bias_, d_pre);
        d_inputs[t] = matvec_transposed(w_input_.value, d_pre);
        dh_carry = matvec_transposed(w_hidden_.value, d_pre);
        dc_carry = std::move(dc_next);
    }
    return d_inputs;
}

std::vector<Vector> concat_directions(const LstmCache& fwd, const LstmCache& bwd) {
    if (fwd.hidden.size() != bwd.hidden.size()) throw ShapeError("direction length mismatch");
    std::vector<Vector> out;
    out.reserve(fwd.hidden.size());
    for (std::size_t t = 0; t < fwd.hidden.size(); ++t) {
        std::vector<double> both(fwd.hidden[t].begin(), fwd.hidden[t].end());
        both.insert(both.end(), bwd.hidden[t].begin(), bwd.hidden[t].end());
        out.emplace_back(std::move(both));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Attention

AttentionLayer::AttentionLayer(std::size_t width)
    : projection_("attention.w", width, width),
      bias_("attention.b", width, 1),
      context_("attention.context", width, 1) {}

void AttentionLayer::initialize(Rng& rng, double range) {
    fill_uniform(projection_, rng, range);
    fill_uniform(bias_, rng, range);
    fill_uniform(context_, rng, range);
}

AttentionCache AttentionLayer::forward(const std::vector<Vector>& hiddens,
                                       std::span<const std::uint8_t> mask) const {
    const std::size_t n = hiddens.size();
    require_mask_length(n, mask);

    AttentionCache cache;
    cache.projected.resize(n);
    cache.alphas = Vector(n);
    cache.pooled = Vector(width());

    const Vector bias = as_vector(bias_);
    const Vector context = as_vector(context_);
    Vector scores(n);
    double top = -INFINITY;
    bool any = false;
    for (std::size_t t = 0; t < n; ++t) {
        if (!mask[t]) continue;
        cache.projected[t] = tanh(add(matvec(projection_.value, hiddens[t]), bias));
        scores[t] = dot(cache.projected[t], context);
        top = any ? std::max(top, scores[t]) : scores[t];
        any = true;
    }
    if (!any) throw MaskError("attention over a sequence with no unmasked positions");

    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (!mask[t]) continue;
        cache.alphas[t] = std::exp(scores[t] - top);
        total += cache.alphas[t];
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (!mask[t]) continue;
        cache.alphas[t] /= total;
        const double a = cache.alphas[t];
        for (std::size_t j = 0; j < cache.pooled.size(); ++j) cache.pooled[j] += a * hiddens[t][j];
    }
    return cache;
}

std::vector<Vector> AttentionLayer::backward(const AttentionCache& cache,
                                             const std::vector<Vector>& hiddens,
                                             std::span<const std::uint8_t> mask,
                                             const Vector& d_pooled) {
    const std::size_t n = hiddens.size();
    require_mask_length(n, mask);
    if (cache.alphas.size() != n) throw UsageError("attention backward called without a matching forward cache");

    std::vector<Vector> d_hiddens(n, Vector(hiddens.empty() ? 0 : hiddens[0].size()));

    // d loss / d alpha_t, then through the masked softmax.
    Vector d_alpha(n);
    double weighted = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (!mask[t]) continue;
        d_alpha[t] = dot(d_pooled, hiddens[t]);
        weighted += cache.alphas[t] * d_alpha[t];
        d_hiddens[t] = scale(d_pooled, cache.alphas[t]);
    }

    const Vector context = as_vector(context_);
    Vector d_context(width());
    for (std::size_t t = 0; t < n; ++t) {
        if (!mask[t]) continue;
        const double d_score = cache.alphas[t] * (d_alpha[t] - weighted);
        const Vector& u = cache.projected[t];
        Vector d_z(width());
        for (std::size_t j = 0; j < width(); ++j) {
            d_context[j] += d_score * u[j];
            d_z[j] = d_score * context[j] * (1.0 - u[j] * u[j]);
        }
        add_outer(projection_.grad, d_z, hiddens[t]);
        accumulate(bias_, d_z);
        d_hiddens[t] += matvec_transposed(projection_.value, d_z);
    }
    accumulate(context_, d_context);
    return d_hiddens;
}

// ---------------------------------------------------------------------------
// Head

DenseHead::DenseHead(std::size_t input_dim)
    : weights_("head.w", kClasses, input_dim), bias_("head.b", kClasses, 1) {}

void DenseHead::initialize(Rng& rng, double range) {
    fill_uniform(weights_, rng, range);
    fill_uniform(bias_, rng, range);
}

Vector DenseHead::logits(const Vector& input) const {
    return add(matvec(weights_.value, input), as_vector(bias_));
}

Vector DenseHead::backward(const Vector& input, const Vector& d_logits) {
    add_outer(weights_.grad, d_logits, input);
    accumulate(bias_, d_logits);
    return matvec_transposed(weights_.value, d_logits);
}

int predict_label(const Vector& probabilities) {
    if (probabilities.size() != DenseHead::kClasses) throw ShapeError("prediction expects two class probabilities");
    return probabilities[1] > probabilities[0] ? kStressed : kUnstressed;
}

// ---------------------------------------------------------------------------
// Dropout

Vector dropout_scale(std::size_t width, double rate, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
    Vector scale_vec(width, 1.0);
    if (rate == 0.0) return scale_vec;
    const double keep = 1.0 / (1.0 - rate);
    for (double& x : scale_vec) x = rng.uniform() < rate ? 0.0 : keep;
    return scale_vec;
}

Vector dropout(const Vector& activations, double rate, Mode mode, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
    if (mode == Mode::eval || rate == 0.0) return activations;
    return mul(activations, dropout_scale(activations.size(), rate, rng));
}

// ---------------------------------------------------------------------------
// Model

std::string to_string(Architecture arch) { return arch == Architecture::lstm ? "lstm" : "blstm"; }

Architecture parse_architecture(const std::string& tag) {
    if (tag == "lstm") return Architecture::lstm;
    if (tag == "blstm") return Architecture::blstm;
    throw ConfigError("unknown architecture '" + tag + "' (expected lstm or blstm)");
}

Model::Model(const ModelConfig& config)
    : config_(config),
      embedding_(config.vocab_size, config.embed_dim),
      forward_cell_("lstm_fwd", config.embed_dim, config.hidden_dim),
      attention_(config.attention ? config.recurrent_width() : 0),
      head_(config.recurrent_width()) {
    if (config.vocab_size < 2) throw ConfigError("vocabulary must hold at least PAD and UNK");
    if (config.embed_dim == 0 || config.hidden_dim == 0) throw ConfigError("layer widths must be positive");
    if (config.arch == Architecture::blstm) backward_cell_ = LstmCell("lstm_bwd", config.embed_dim, config.hidden_dim);
}

void Model::initialize(Rng& rng) {
    embedding_.initialize(rng);
    forward_cell_.initialize(rng);
    if (config_.arch == Architecture::blstm) backward_cell_.initialize(rng);
    if (config_.attention) attention_.initialize(rng);
    head_.initialize(rng);
}

ForwardCache Model::forward(const EncodedSequence& seq, double dropout_rate, Mode mode, Rng& rng) const {
    const std::size_t n = seq.length();
    require_mask_length(n, seq.mask);
    if (n == 0) throw ShapeError("empty sequence");

    ForwardCache cache;
    cache.embeddings = embedding_.forward(seq.tokens);
    cache.forward_states = forward_cell_.forward(cache.embeddings, seq.mask, false);
    if (config_.arch == Architecture::blstm) {
        cache.backward_states = backward_cell_.forward(cache.embeddings, seq.mask, true);
        cache.hiddens = concat_directions(cache.forward_states, *cache.backward_states);
    } else {
        cache.hiddens = cache.forward_states.hidden;
    }

    const std::size_t width = config_.recurrent_width();
    if (mode == Mode::train && dropout_rate > 0.0) {
        cache.dropout_scales.reserve(n);
        cache.dropped.reserve(n);
        for (std::size_t t = 0; t < n; ++t) {
            cache.dropout_scales.push_back(dropout_scale(width, dropout_rate, rng));
            cache.dropped.push_back(mul(cache.hiddens[t], cache.dropout_scales.back()));
        }
    } else {
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
        cache.dropped = cache.hiddens;
    }

    if (config_.attention) {
        cache.attention = attention_.forward(cache.dropped, seq.mask);
        cache.pooled = cache.attention->pooled;
    } else {
        if (seq.real_count() == 0) throw MaskError("sequence has no unmasked positions");
        const std::size_t h = config_.hidden_dim;
        cache.pooled = Vector(width);
        for (std::size_t j = 0; j < h; ++j) cache.pooled[j] = cache.dropped[n - 1][j];
        if (config_.arch == Architecture::blstm) {
            for (std::size_t j = 0; j < h; ++j) cache.pooled[h + j] = cache.dropped[0][h + j];
        }
    }

    cache.logits = head_.logits(cache.pooled);
    cache.probabilities = softmax(cache.logits);
    return cache;
}

ForwardCache Model::infer(const EncodedSequence& seq) const {
    Rng unused(0);
    return forward(seq, 0.0, Mode::eval, unused);
}

void Model::backward(const EncodedSequence& seq, const ForwardCache& cache, const Vector& d_logits) {
    const std::size_t n = seq.length();
    if (cache.hiddens.size() != n || cache.logits.empty()) {
        throw UsageError("model backward called without a matching forward cache");
    }
    const std::size_t width = config_.recurrent_width();
    const std::size_t h = config_.hidden_dim;

    const Vector d_pooled = head_.backward(cache.pooled, d_logits);

    std::vector<Vector> d_dropped;
    if (config_.attention) {
        d_dropped = attention_.backward(*cache.attention, cache.dropped, seq.mask, d_pooled);
    } else {
        d_dropped.assign(n, Vector(width));
        for (std::size_t j = 0; j < h; ++j) d_dropped[n - 1][j] += d_pooled[j];
        if (config_.arch == Architecture::blstm) {
            for (std::size_t j = 0; j < h; ++j) d_dropped[0][h + j] += d_pooled[h + j];
        }
    }

    std::vector<Vector> d_hidden = std::move(d_dropped);
    if (!cache.dropout_scales.empty()) {
        for (std::size_t t = 0; t < n; ++t) d_hidden[t] = mul(d_hidden[t], cache.dropout_scales[t]);
    }

    std::vector<Vector> d_embed;
    if (config_.arch == Architecture::blstm) {
        std::vector<Vector> d_fwd(n, Vector(h));
        std::vector<Vector> d_bwd(n, Vector(h));
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t j = 0; j < h; ++j) {
                d_fwd[t][j] = d_hidden[t][j];
                d_bwd[t][j] = d_hidden[t][h + j];
            }
        }
        d_embed = forward_cell_.backward(cache.forward_states, cache.embeddings, seq.mask, d_fwd);
        const auto d_embed_bwd = backward_cell_.backward(*cache.backward_states, cache.embeddings, seq.mask, d_bwd);
        for (std::size_t t = 0; t < n; ++t) d_embed[t] += d_embed_bwd[t];
    } else {
        d_embed = forward_cell_.backward(cache.forward_states, cache.embeddings, seq.mask, d_hidden);
    }
    embedding_.backward(seq.tokens, seq.mask, d_embed);
}

std::vector<Parameter*> Model::parameters() {
    std::vector<Parameter*> out{&embedding_.table()};
    for (auto* p : forward_cell_.parameters()) out.push_back(p);
    if (config_.arch == Architecture::blstm) {
        for (auto* p : backward_cell_.parameters()) out.push_back(p);
    }
    if (config_.attention) {
        for (auto* p : attention_.parameters()) out.push_back(p);
    }
    for (auto* p : head_.parameters()) out.push_back(p);
    return out;
}

std::vector<const Parameter*> Model::parameters() const {
    auto mutable_params = const_cast<Model*>(this)->parameters();
    return {mutable_params.begin(), mutable_params.end()};
}

void Model::zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
}

}  // namespace stressnet
