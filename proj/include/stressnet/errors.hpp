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

#include <stdexcept>
#include <string>

namespace stressnet {

// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
    usage,
    io,
    parse,
    data,
    config,
    shape,
    vocabulary,
    mask,
    coverage,
    numeric,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    // 1 usage, 2 I/O, 3 data/config, 4 numeric.
    int exit_code() const {
        switch (kind_) {
            case ErrorKind::usage: return 1;
            case ErrorKind::io: return 2;
            case ErrorKind::numeric: return 4;
            default: return 3;
        }
    }

private:
    ErrorKind kind_;
};

#define STRESSNET_ERROR(Name, kind_value)                                   \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message)                           \
            : Error(ErrorKind::kind_value, message) {}                      \
    }

STRESSNET_ERROR(UsageError, usage);
STRESSNET_ERROR(IoError, io);
STRESSNET_ERROR(ParseError, parse);
STRESSNET_ERROR(DataError, data);
STRESSNET_ERROR(ConfigError, config);
STRESSNET_ERROR(ShapeError, shape);
STRESSNET_ERROR(VocabularyError, vocabulary);
STRESSNET_ERROR(MaskError, mask);
STRESSNET_ERROR(CoverageError, coverage);
STRESSNET_ERROR(NumericError, numeric);

#undef STRESSNET_ERROR

// Warnings go to stderr unless silenced.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace stressnet
