#pragma once

#include <stdexcept>
#include <string>

namespace qgossip {

/// Invalid argument to a constructor or operation (bad n, p, m, ...).
class ParameterError : public std::invalid_argument {
  public:
    explicit ParameterError(const std::string &what) : std::invalid_argument(what) {}
};

/// A real value fell outside the quantizer range.
class RangeError : public std::out_of_range {
  public:
    explicit RangeError(const std::string &what) : std::out_of_range(what) {}
};

/// Some start state can never reach the target set.
class UnboundedHittingTime : public std::runtime_error {
  public:
    explicit UnboundedHittingTime(const std::string &what) : std::runtime_error(what) {}
};

/// Linear solve failed or exceeded its residual tolerance, or an iteration did not settle.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

/// Requested object is too large to build densely.
class ResourceError : public std::runtime_error {
  public:
    explicit ResourceError(const std::string &what) : std::runtime_error(what) {}
};

/// Malformed experiment config or input file.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

/// A run record failed a conservation or budget check.
class InvariantViolation : public std::logic_error {
  public:
    explicit InvariantViolation(const std::string &what) : std::logic_error(what) {}
};

} // namespace qgossip
