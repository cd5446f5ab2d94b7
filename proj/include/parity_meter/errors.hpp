// Copyright 2026 The parity-meter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PARITY_METER_ERRORS_HPP_
#define PARITY_METER_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace parity {

// Base of every error raised by the library. The CLI maps the two families
// below onto exit codes: InputError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed columnar input: missing column, unparseable cell, ragged lengths.
class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

// A value outside its admissible range; carries the offending row.
class RangeError : public InputError {
 public:
  RangeError(const std::string& what, long row = -1)
      : InputError(what), row_(row) {}
  long row() const { return row_; }

 private:
  long row_;
};

class GroupError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class SizeError : public InputError {
 public:
  using InputError::InputError;
};

class MissingLabelError : public InputError {
 public:
  using InputError::InputError;
};

class MissingPositiveError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedSpec : public InputError {
 public:
  using InputError::InputError;
};

// Zero-variance or too-small samples under a data-driven bandwidth rule.
class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DivisionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, int epoch)
      : NumericError(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace parity

#endif  // PARITY_METER_ERRORS_HPP_
