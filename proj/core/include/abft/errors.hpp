#pragma once

#include <stdexcept>
#include <string>

namespace abft {

/// A value lies outside the range its field or parameter admits.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A scenario or scheme/parameter combination that cannot be run.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input buffer shorter than the element being decoded.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input long enough, but with a bit pattern the format does not allow.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Range check helper: throws RangeError("<field> = <value> outside [lo, hi]").
template <typename T>
void require_in_range(const char* field, T value, T lo, T hi) {
  if (value < lo || value > hi) {
    throw RangeError(std::string(field) + " = " + std::to_string(value) + " outside [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace abft
