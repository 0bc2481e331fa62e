// Copyright 2026 The DRF Planner Authors
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

#ifndef DRF_ERRORS_HPP_
#define DRF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace drf {

// Base of every error raised by the library. Each subclass maps to one
// failure class of the planning pipeline so callers can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class SingularSteeringError : public Error {
 public:
  using Error::Error;
};

// The host (or its corridor seed) already violates the safety margin.
class InfeasibleSeedError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

// A forward rollout produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Configuration parse or validation failure. `line` is 0 when the error is
// not tied to a specific input line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Malformed or missing output file. The message names the file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace drf

#endif  // DRF_ERRORS_HPP_
