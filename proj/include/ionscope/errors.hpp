#pragma once

#include <stdexcept>
#include <string>

namespace ionscope {

/// Bad inputs: dimension mismatches, parameter-range violations, malformed
/// configs. Mapped to exit code 2 by the CLI.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string& what)
        : std::invalid_argument(what) {}
};

/// Numerical failure: an integrator that cannot reach its tolerance, a
/// truncation too aggressive for the requested state. Exit code 3.
class ConvergenceError : public std::runtime_error {
  public:
    explicit ConvergenceError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace ionscope
