// Copyright 2026 The noisebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisebench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A value violated a documented precondition or invariant.
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// A document could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
   public:
    ParseError(std::size_t line, const std::string &reason)
        : Error(line ? "line " + std::to_string(line) + ": " + reason : reason), line_(line), reason_(reason) {
    }
    std::size_t line() const {
        return line_;
    }
    const std::string &reason() const {
        return reason_;
    }

   private:
    std::size_t line_;
    std::string reason_;
};

}  // namespace noisebench
