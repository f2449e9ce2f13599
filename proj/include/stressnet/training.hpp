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

#include "stressnet/distant_supervision.hpp"
#include "stressnet/example.hpp"
#include "stressnet/layers.hpp"
#include "stressnet/tensor.hpp"

namespace stressnet {

struct TrainConfig {
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t pretrain_epochs = 10;
    std::size_t finetune_epochs = 30;
    std::size_t patience = 5;  // 0 disables early stopping
    std::size_t pretrain_iterations = 2;
    std::size_t tweets_per_class = kTweetsPerClass;
    double dropout = 0.2;
    std::size_t max_len = 35;
    double val_fraction = 0.1;
    std::uint64_t seed = 42;

    // Throws ConfigError on out-of-range values.
    void validate() const;
};

struct CrossEntropy {
    double loss = 0.0;
    Vector d_logits;  // softmax(logits) - onehot(label)
};

// -log softmax(logits)[label] via log-sum-exp.
CrossEntropy cross_entropy(const Vector& logits, int label);

// Loss from an already normalised probability pair.
double cross_entropy_from_probabilities(const Vector& probabilities, int label);

struct AdamState {
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    std::uint64_t step = 0;

    static AdamState for_parameters(const std::vector<Parameter*>& params);
};

// Bias-corrected Adam update using the gradients stored in `params`.
// Throws NumericError (naming the parameter) before touching anything if a
// gradient entry is non-finite.
void adam_step(const std::vector<Parameter*>& params, AdamState& state, const TrainConfig& config);

// Duplicates minority-class examples (seeded, with replacement) until both
// classes are equally frequent, then shuffles. Throws DataError if a class
// is missing.
std::vector<Example> oversample(const std::vector<Example>& examples, std::uint64_t seed);

struct BatchStats {
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t count = 0;
};

// Zeroes gradients, then accumulates the gradient of the batch-mean loss.
BatchStats accumulate_batch(Model& model, std::span<const Example> batch, double dropout_rate, Mode mode, Rng& rng);

struct Evaluation {
    double mean_loss = 0.0;
    double accuracy = 0.0;
    std::vector<int> predictions;
};

Evaluation evaluate_model(const Model& model, std::span<const Example> examples);

struct EpochLog {
    std::string phase;
    std::size_t iteration = 0;
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
    std::optional<double> val_accuracy;

    bool operator==(const EpochLog&) const = default;
};

// phase \t iteration \t epoch \t mean-loss \t train-acc \t val-acc
std::string format_log_line(const EpochLog& entry);

struct PhaseSpec {
    std::string phase = "finetune";
    std::size_t iteration = 0;
    std::size_t epochs = 1;
    bool early_stopping = false;
};

// Owns the optimiser state and RNG streams for one model across phases.
class Trainer {
public:
    Trainer(Model& model, const TrainConfig& config);

    // Shuffles per epoch, trains every batch (the last one may be partial)
    // with dropout in train mode and records one log entry per epoch. With
    // early stopping and a validation set, training stops after `patience`
    // epochs without validation-loss improvement and the best weights are
    // restored. Throws DataError on an empty training set and NumericError
    // when the loss becomes non-finite.
    std::vector<EpochLog> train_phase(std::span<const Example> train,
                                      std::span<const Example> validation,
                                      const PhaseSpec& phase);

    const AdamState& optimizer() const { return adam_; }

private:
    Model& model_;
    TrainConfig config_;
    AdamState adam_;
    Rng shuffle_rng_;
    Rng dropout_rng_;
};

std::vector<EpochLog> train_phase(Model& model,
                                  std::span<const Example> examples,
                                  const TrainConfig& config,
                                  const std::string& phase_tag,
                                  std::size_t epochs);

struct TrainingRun {
    std::vector<EpochLog> log;
};

// Pretrains for config.pretrain_iterations iterations, each on a fresh
// balanced sample of the twitter examples (seed + iteration), then
// fine-tunes on the oversampled interview training data. A stratified
// val_fraction of the interview data is held out for validation.
TrainingRun two_phase_train(Model& model,
                            const std::vector<Example>& twitter,
                            const std::vector<Example>& interview_train,
                            const TrainConfig& config);

// Stratified seeded hold-out: returns (train, validation).
std::pair<std::vector<Example>, std::vector<Example>> holdout_split(const std::vector<Example>& examples,
                                                                   double fraction,
                                                                   std::uint64_t seed);

}  // namespace stressnet
