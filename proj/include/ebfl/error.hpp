// Copyright 2026 The ebfl Authors
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

#ifndef EBFL_ERROR_HPP_
#define EBFL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ebfl {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument or a loaded record violates a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed tabular input. line() is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateKeyError : public Error {
 public:
  using Error::Error;
};

// A partition or selection problem admits no solution.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Cohort larger than the exhaustive Shapley cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Some cohort member is absent from every sampled coalition.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class NumericDivergenceError : public Error {
 public:
  NumericDivergenceError(const std::string& what, int epoch)
      : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace ebfl

#endif  // EBFL_ERROR_HPP_
