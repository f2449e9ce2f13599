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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stressnet/example.hpp"
#include "stressnet/random.hpp"
#include "stressnet/tensor.hpp"

namespace stressnet {

inline constexpr double kRecurrentInitRange = 0.08;
inline constexpr double kEmbeddingInitRange = 0.05;
inline constexpr double kForgetBiasInit = 1.0;

// Lookup table A (|V| x k). Row kPadIndex stays at zero and receives no gradient.
class EmbeddingLayer {
public:
    EmbeddingLayer() = default;
    EmbeddingLayer(std::size_t vocab_size, std::size_t dim);

    void initialize(Rng& rng, double range = kEmbeddingInitRange);

    // Row lookup per position. Throws VocabularyError on an out-of-range index.
    std::vector<Vector> forward(std::span<const std::size_t> tokens) const;

    // Accumulates d_out into the rows that were looked up at unmasked positions.
    void backward(std::span<const std::size_t> tokens,
                  std::span<const std::uint8_t> mask,
                  const std::vector<Vector>& d_out);

    std::size_t vocab_size() const { return table_.value.rows(); }
    std::size_t dim() const { return table_.value.cols(); }

    Parameter& table() { return table_; }
    const Parameter& table() const { return table_; }

private:
    Parameter table_;
};

// Per-step activations kept for backpropagation through time. Entries at
// masked positions are empty for the gates; hidden/cell hold the carried state.
struct LstmCache {
    bool reverse = false;
    std::vector<Vector> input_gate;
    std::vector<Vector> forget_gate;
    std::vector<Vector> candidate;
    std::vector<Vector> output_gate;
    std::vector<Vector> cell;
    std::vector<Vector> hidden;
};

// Standard (non-peephole) LSTM. Gate blocks are stacked in the order
// [input, forget, cell-candidate, output] along the rows of each weight.
class LstmCell {
public:
    LstmCell() = default;
    LstmCell(const std::string& name, std::size_t input_dim, std::size_t hidden_dim);

    // Uniform weights and biases, then the forget-gate bias block set to 1.0.
    void initialize(Rng& rng, double range = kRecurrentInitRange);

    // Runs over the sequence (right to left when `reverse`). At masked
    // positions hidden and cell state are copied through unchanged.
    LstmCache forward(const std::vector<Vector>& inputs,
                      std::span<const std::uint8_t> mask,
                      bool reverse) const;

    // Returns d loss / d inputs; parameter gradients are accumulated.
    std::vector<Vector> backward(const LstmCache& cache,
                                 const std::vector<Vector>& inputs,
                                 std::span<const std::uint8_t> mask,
                                 const std::vector<Vector>& d_hidden);

    std::size_t input_dim() const { return w_input_.value.cols(); }
    std::size_t hidden_dim() const { return w_hidden_.value.cols(); }

    std::vector<Parameter*> parameters() { return {&w_input_, &w_hidden_, &bias_}; }
    std::vector<const Parameter*> parameters() const { return {&w_input_, &w_hidden_, &bias_}; }

private:
    Parameter w_input_;   // 4h x k
    Parameter w_hidden_;  // 4h x h
    Parameter bias_;      // 4h x 1
};

struct AttentionCache {
    std::vector<Vector> projected;  // u_t = tanh(W h_t + b), empty when masked
    Vector alphas;                  // exactly 0 at masked positions
    Vector pooled;                  // Σ α_t h_t
};

// Word-level attention pooling with a trainable context vector.
class AttentionLayer {
public:
    AttentionLayer() = default;
    explicit AttentionLayer(std::size_t width);

    void initialize(Rng& rng, double range = kRecurrentInitRange);

    // Softmax runs over unmasked positions only. Throws MaskError when every
    // position is masked.
    AttentionCache forward(const std::vector<Vector>& hiddens,
                           std::span<const std::uint8_t> mask) const;

    std::vector<Vector> backward(const AttentionCache& cache,
                                 const std::vector<Vector>& hiddens,
                                 std::span<const std::uint8_t> mask,
                                 const Vector& d_pooled);

    std::size_t width() const { return projection_.value.rows(); }

    std::vector<Parameter*> parameters() { return {&projection_, &bias_, &context_}; }
    std::vector<const Parameter*> parameters() const { return {&projection_, &bias_, &context_}; }

private:
    Parameter projection_;  // d_a x d_h
    Parameter bias_;        // d_a x 1
    Parameter context_;     // d_a x 1
};

// Fully connected layer onto the two class logits (unstressed, stressed).
class DenseHead {
public:
    static constexpr std::size_t kClasses = 2;

    DenseHead() = default;
    explicit DenseHead(std::size_t input_dim);

    void initialize(Rng& rng, double range = kRecurrentInitRange);

    Vector logits(const Vector& input) const;
    Vector backward(const Vector& input, const Vector& d_logits);

    std::size_t input_dim() const { return weights_.value.cols(); }

    std::vector<Parameter*> parameters() { return {&weights_, &bias_}; }
    std::vector<const Parameter*> parameters() const { return {&weights_, &bias_}; }

private:
    Parameter weights_;  // 2 x d
    Parameter bias_;     // 2 x 1
};

// argmax over the probability pair; an exact tie predicts unstressed.
int predict_label(const Vector& probabilities);

enum class Mode { train, eval };

// Inverted-dropout scale vector: each entry is 0 with probability `rate`,
// else 1 / (1 - rate). Throws ConfigError unless 0 <= rate < 1.
Vector dropout_scale(std::size_t width, double rate, Rng& rng);

// Train mode multiplies by a fresh dropout_scale; eval mode is the identity.
Vector dropout(const Vector& activations, double rate, Mode mode, Rng& rng);

// Backward direction runs over the reversed sequence; outputs are the
// per-position concatenation [forward ; backward].
std::vector<Vector> concat_directions(const LstmCache& fwd, const LstmCache& bwd);

enum class Architecture { lstm, blstm };

std::string to_string(Architecture arch);
Architecture parse_architecture(const std::string& tag);

struct ModelConfig {
    Architecture arch = Architecture::blstm;
    bool attention = true;
    std::size_t vocab_size = 2;
    std::size_t embed_dim = 100;
    std::size_t hidden_dim = 64;

    std::size_t recurrent_width() const {
        return arch == Architecture::blstm ? 2 * hidden_dim : hidden_dim;
    }

    bool operator==(const ModelConfig&) const = default;
};

struct ForwardCache {
    std::vector<Vector> embeddings;
    LstmCache forward_states;
    std::optional<LstmCache> backward_states;
    std::vector<Vector> hiddens;         // recurrent outputs before dropout
    std::vector<Vector> dropout_scales;  // empty in eval mode
    std::vector<Vector> dropped;         // recurrent outputs after dropout
    std::optional<AttentionCache> attention;
    Vector pooled;
    Vector logits;
    Vector probabilities;
};

// Embedding -> (B)LSTM -> dropout -> attention or last-state pooling -> head.
//
// Without attention the pooled vector is the final forward state (and, for
// BLSTM, the backward state at the first position).
class Model {
public:
    Model() = default;
    explicit Model(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }

    // Weights uniform in [-0.08, 0.08], embeddings in [-0.05, 0.05], PAD row
    // zero, forget bias 1.0.
    void initialize(Rng& rng);

    // `rng` is only consumed in train mode with dropout_rate > 0.
    ForwardCache forward(const EncodedSequence& seq, double dropout_rate, Mode mode, Rng& rng) const;

    // Deterministic inference helper (eval mode, no RNG use).
    ForwardCache infer(const EncodedSequence& seq) const;

    // Accumulates gradients of a loss whose gradient w.r.t. the logits is
    // d_logits. The PAD embedding row gradient is kept at zero.
    void backward(const EncodedSequence& seq, const ForwardCache& cache, const Vector& d_logits);

    // Fixed-order registry of all trainable tensors.
    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;

    void zero_grad();

    EmbeddingLayer& embedding() { return embedding_; }
    const EmbeddingLayer& embedding() const { return embedding_; }
    LstmCell& forward_cell() { return forward_cell_; }
    LstmCell& backward_cell() { return backward_cell_; }
    AttentionLayer& attention() { return attention_; }
    DenseHead& head() { return head_; }

private:
    ModelConfig config_;
    EmbeddingLayer embedding_;
    LstmCell forward_cell_;
    LstmCell backward_cell_;
    AttentionLayer attention_;
    DenseHead head_;
};

}  // namespace stressnet
