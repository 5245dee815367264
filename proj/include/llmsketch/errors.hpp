#pragma once

#include <stdexcept>
#include <string>

namespace llms {

// Invalid parameters or inconsistent option combinations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data (traces, prediction files, dumps).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A classifier backend failed to produce a score.
class ClassifierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace llms
