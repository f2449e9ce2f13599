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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stressnet/layers.hpp"
#include "stressnet/svm.hpp"
#include "stressnet/tensor.hpp"
#include "stressnet/text.hpp"

namespace stressnet {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct NamedTensor {
    std::string name;
    Matrix value;

    bool operator==(const NamedTensor&) const = default;
};

// Flat model container. Layout (all integers little-endian):
//
//   "SNET" | u32 version | str arch | u8 attention | u64 vocab_size
//   | u64 embed_dim | u64 hidden_dim | u64 attention_dim | u64 max_len
//   | u64 token count, str tokens... | u64 tensor count
//   | per tensor: str name, u64 rows, u64 cols, rows*cols IEEE-754 f64
//
// where str is u64 length followed by the raw bytes.
struct ModelFile {
    std::string arch;  // lstm | blstm | svm
    bool attention = false;
    std::uint64_t vocab_size = 0;
    std::uint64_t embed_dim = 0;
    std::uint64_t hidden_dim = 0;
    std::uint64_t attention_dim = 0;
    std::uint64_t max_len = 0;
    std::vector<std::string> vocabulary;
    std::vector<NamedTensor> tensors;

    bool operator==(const ModelFile&) const = default;
};

std::string encode_model_file(const ModelFile& file);
// Throws ParseError on truncated or malformed input.
ModelFile decode_model_file(const std::string& bytes);

void write_model_file(const std::filesystem::path& path, const ModelFile& file);
ModelFile read_model_file(const std::filesystem::path& path);

struct NeuralBundle {
    Model model;
    Vocabulary vocabulary;
    std::size_t max_len = 35;
};

ModelFile to_model_file(const Model& model, const Vocabulary& vocab, std::size_t max_len);
// Throws DataError when the header and tensors disagree.
NeuralBundle neural_from_file(const ModelFile& file);

ModelFile to_model_file(const SvmModel& model);
SvmModel svm_from_file(const ModelFile& file);

}  // namespace stressnet
