// Copyright 2026 The streamadapt Authors.
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

#ifndef STREAMADAPT_ERROR_HPP_
#define STREAMADAPT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace streamadapt {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (streams, configs, checkpoints).
/// The CLI maps this family to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A line of an input file could not be parsed. Carries the 1-based line
/// number for error reporting.
class ParseError : public DataError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : DataError(message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Vector or parameter shapes do not match.
class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// A numeric quantity diverged (NaN/Inf loss or gradient). The CLI maps
/// this to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Source pretraining failed to reach the required accuracy.
class PretrainError : public Error {
 public:
  using Error::Error;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_ERROR_HPP_
