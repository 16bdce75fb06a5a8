// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mtune {

// Binary operation on parameter vectors with unequal layouts, or a
// checkpoint whose params do not match its model spec.
class CompatibilityError : public std::runtime_error {
public:
  explicit CompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside its documented domain (alpha outside [0,1], empty
// evaluation set, drop_p == 1, ...).
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed persisted file (checkpoint / dataset / probe).
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Bad experiment configuration (unknown key, unparsable value).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Loss became NaN/Inf during an optimization loop; message names the step.
class TrainingDivergedError : public std::runtime_error {
public:
  explicit TrainingDivergedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mtune
