// Copyright 2026 The dptext Authors
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

#include <stdexcept>
#include <string>

namespace dptext {

// Base of the project error hierarchy. exit_code() groups errors into the
// process exit conventions used by the CLI:
//   1 configuration / invalid input, 2 provider / transport, 3 budget or
//   privacy-policy violation.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return 1; }
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Private data routed where it must not go (e.g. into a public prompt).
class PolicyError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class TransportError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

// Remote provider broke the wire contract (e.g. truncated vocabulary).
class ContractViolationError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class EncodingError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class StateError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

}  // namespace dptext
