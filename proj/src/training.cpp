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

#include "stressnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "stressnet/errors.hpp"

namespace stressnet {

namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kOversampleStream = 3;
constexpr std::uint64_t kHoldoutStream = 4;
constexpr double kLargeGradient = 100.0;

std::vector<Matrix> snapshot(const std::vector<Parameter*>& params) {
    std::vector<Matrix> out;
    out.reserve(params.size());
    for (auto* p : params) out.push_back(p->value);
    return out;
}

void restore(const std::vector<Parameter*>& params, const std::vector<Matrix>& values) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be non-negative");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
    if (max_len == 0) throw ConfigError("max_len must be at least 1");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must lie in [0, 1)");
    if (tweets_per_class == 0) throw ConfigError("tweets_per_class must be at least 1");
}

CrossEntropy cross_entropy(const Vector& logits, int label) {
    if (logits.size() != DenseHead::kClasses) throw ShapeError("cross_entropy expects two logits");
    if (label != kUnstressed && label != kStressed) throw DataError("label must be 0 or 1");
    CrossEntropy out;
    out.loss = log_sum_exp(logits) - logits[static_cast<std::size_t>(label)];
    out.d_logits = softmax(logits);
    out.d_logits[static_cast<std::size_t>(label)] -= 1.0;
    return out;
}

double cross_entropy_from_probabilities(const Vector& probabilities, int label) {
    if (probabilities.size() != DenseHead::kClasses) throw ShapeError("cross_entropy expects two probabilities");
    if (label != kUnstressed && label != kStressed) throw DataError("label must be 0 or 1");
    // log1p keeps precision when the true class has probability close to 1.
    const double other = probabilities[static_cast<std::size_t>(1 - label)];
    return -std::log1p(-other);
}

AdamState AdamState::for_parameters(const std::vector<Parameter*>& params) {
    AdamState state;
    for (auto* p : params) {
        state.first_moment.emplace_back(p->value.rows(), p->value.cols());
        state.second_moment.emplace_back(p->value.rows(), p->value.cols());
    }
    return state;
}

void adam_step(const std::vector<Parameter*>& params, AdamState& state, const TrainConfig& config) {
    if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
        throw ShapeError("Adam state does not match the parameter registry");
    }
    double largest = 0.0;
    std::string largest_name;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = *params[i];
        if (state.first_moment[i].size() != p.value.size() || p.grad.size() != p.value.size()) {
            throw ShapeError("Adam state shape mismatch for " + p.name);
        }
        for (double g : p.grad.data()) {
            if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter " + p.name);
            if (std::abs(g) > largest) {
                largest = std::abs(g);
                largest_name = p.name;
            }
        }
    }
    if (largest > kLargeGradient) warn("large gradient " + format_real(largest) + " in " + largest_name);

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto value = params[i]->value.data();
        const auto grad = params[i]->grad.data();
        auto m = state.first_moment[i].data();
        auto v = state.second_moment[i].data();
        for (std::size_t j = 0; j < value.size(); ++j) {
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * grad[j];
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * grad[j] * grad[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            value[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
        }
    }
}

std::vector<Example> oversample(const std::vector<Example>& examples, std::uint64_t seed) {
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const int label = examples[i].label;
        if (label != kUnstressed && label != kStressed) throw DataError("label must be 0 or 1");
        by_class[label].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty()) throw DataError("oversampling needs examples of both classes");

    Rng rng = Rng::derive(seed, kOversampleStream);
    std::vector<Example> out = examples;
    const int minority = by_class[1].size() < by_class[0].size() ? 1 : 0;
    const auto& pool = by_class[minority];
    const std::size_t deficit = by_class[1 - minority].size() - pool.size();
    for (std::size_t k = 0; k < deficit; ++k) out.push_back(examples[pool[rng.uniform_index(pool.size())]]);
    rng.shuffle(out);
    return out;
}

BatchStats accumulate_batch(Model& model, std::span<const Example> batch, double dropout_rate, Mode mode, Rng& rng) {
    model.zero_grad();
    BatchStats stats;
    if (batch.empty()) return stats;
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (const auto& example : batch) {
        const ForwardCache cache = model.forward(example.sequence, dropout_rate, mode, rng);
        CrossEntropy ce = cross_entropy(cache.logits, example.label);
        if (!std::isfinite(ce.loss)) throw NumericError("non-finite training loss");
        stats.loss_sum += ce.loss;
        stats.correct += predict_label(cache.probabilities) == example.label;
        ++stats.count;
        model.backward(example.sequence, cache, scale(ce.d_logits, inv));
    }
    return stats;
}

Evaluation evaluate_model(const Model& model, std::span<const Example> examples) {
    Evaluation eval;
    if (examples.empty()) return eval;
    std::size_t correct = 0;
    double loss = 0.0;
    eval.predictions.reserve(examples.size());
    for (const auto& example : examples) {
        const ForwardCache cache = model.infer(example.sequence);
        loss += cross_entropy(cache.logits, example.label).loss;
        const int predicted = predict_label(cache.probabilities);
        correct += predicted == example.label;
        eval.predictions.push_back(predicted);
    }
    eval.mean_loss = loss / static_cast<double>(examples.size());
    eval.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
    return eval;
}

std::string format_log_line(const EpochLog& entry) {
    return entry.phase + '\t' + std::to_string(entry.iteration) + '\t' + std::to_string(entry.epoch) + '\t' +
           format_real(entry.mean_loss) + '\t' + format_real(entry.train_accuracy) + '\t' +
           (entry.val_accuracy ? format_real(*entry.val_accuracy) : std::string("-"));
}

Trainer::Trainer(Model& model, const TrainConfig& config)
    : model_(model),
      config_(config),
      adam_(AdamState::for_parameters(model.parameters())),
      shuffle_rng_(Rng::derive(config.seed, kShuffleStream)),
      dropout_rng_(Rng::derive(config.seed, kDropoutStream)) {
    config_.validate();
}

std::vector<EpochLog> Trainer::train_phase(std::span<const Example> train,
                                           std::span<const Example> validation,
                                           const PhaseSpec& phase) {
    if (train.empty()) throw DataError("no training examples for phase " + phase.phase);
    const auto params = model_.parameters();
    const bool early_stop = phase.early_stopping && config_.patience > 0 && !validation.empty();

    std::vector<EpochLog> log;
    std::vector<std::size_t> order(train.size());
    std::vector<Example> batch;
    batch.reserve(config_.batch_size);

    double best_val_loss = INFINITY;
    std::vector<Matrix> best_weights;
    std::size_t stale = 0;

    for (std::size_t epoch = 0; epoch < phase.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle_rng_.shuffle(order);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
            batch.clear();
            const std::size_t stop = std::min(order.size(), start + config_.batch_size);
            for (std::size_t k = start; k < stop; ++k) batch.push_back(train[order[k]]);
            const BatchStats stats = accumulate_batch(model_, batch, config_.dropout, Mode::train, dropout_rng_);
            loss_sum += stats.loss_sum;
            correct += stats.correct;
            adam_step(params, adam_, config_);
        }

        EpochLog entry;
        entry.phase = phase.phase;
        entry.iteration = phase.iteration;
        entry.epoch = epoch + 1;
        entry.mean_loss = loss_sum / static_cast<double>(train.size());
        entry.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
        if (!std::isfinite(entry.mean_loss)) throw NumericError("non-finite mean loss in phase " + phase.phase);

        if (!validation.empty()) {
            const Evaluation val = evaluate_model(model_, validation);
            entry.val_accuracy = val.accuracy;
            if (early_stop) {
                if (val.mean_loss < best_val_loss) {
                    best_val_loss = val.mean_loss;
                    best_weights = snapshot(params);
                    stale = 0;
                } else {
                    ++stale;
                }
            }
        }
        log.push_back(std::move(entry));
        if (early_stop && stale >= config_.patience) break;
    }
    if (early_stop && !best_weights.empty()) restore(params, best_weights);
    return log;
}

std::vector<EpochLog> train_phase(Model& model,
                                  std::span<const Example> examples,
                                  const TrainConfig& config,
                                  const std::string& phase_tag,
                                  std::size_t epochs) {
    Trainer trainer(model, config);
    return trainer.train_phase(examples, {}, PhaseSpec{phase_tag, 0, epochs, false});
}

std::pair<std::vector<Example>, std::vector<Example>> holdout_split(const std::vector<Example>& examples,
                                                                   double fraction,
                                                                   std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in [0, 1)");
    Rng rng = Rng::derive(seed, kHoldoutStream);
    std::vector<bool> held(examples.size(), false);
    for (int label : {kUnstressed, kStressed}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (examples[i].label == label) members.push_back(i);
        }
        rng.shuffle(members);
        std::size_t take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
        // Keep at least one example of the class for training.
        if (take >= members.size()) take = members.empty() ? 0 : members.size() - 1;
        for (std::size_t k = 0; k < take; ++k) held[members[k]] = true;
    }
    std::pair<std::vector<Example>, std::vector<Example>> out;
    for (std::size_t i = 0; i < examples.size(); ++i) (held[i] ? out.second : out.first).push_back(examples[i]);
    return out;
}

TrainingRun two_phase_train(Model& model,
                            const std::vector<Example>& twitter,
                            const std::vector<Example>& interview_train,
                            const TrainConfig& config) {
    config.validate();
    if (interview_train.empty()) throw DataError("interview training set is empty");

    auto [fit, validation] = holdout_split(interview_train, config.val_fraction, config.seed);
    const std::vector<Example> balanced = oversample(fit, config.seed);

    Trainer trainer(model, config);
    TrainingRun run;

    if (config.pretrain_iterations > 0) {
        std::vector<int> labels;
        labels.reserve(twitter.size());
        for (const auto& e : twitter) labels.push_back(e.label);
        for (std::size_t it = 0; it < config.pretrain_iterations; ++it) {
            std::vector<Example> sample;
            for (std::size_t i : sample_balanced_indices(labels, config.tweets_per_class, config.seed + it)) {
                sample.push_back(twitter[i]);
            }
            auto entries = trainer.train_phase(sample, validation, PhaseSpec{"pretrain", it + 1, config.pretrain_epochs, false});
            run.log.insert(run.log.end(), entries.begin(), entries.end());
        }
    }

    auto entries = trainer.train_phase(balanced, validation, PhaseSpec{"finetune", 0, config.finetune_epochs, true});
    run.log.insert(run.log.end(), entries.begin(), entries.end());
    return run;
}

}  // namespace stressnet
