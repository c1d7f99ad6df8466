#pragma once

#include <stdexcept>
#include <string>

namespace fbip {

// Error taxonomy: configuration text problems, physical-parameter violations,
// numerical breakdowns (factorization, root finding, finite differences),
// trajectory blow-up, and file I/O. Exit-code mapping lives in the CLI.

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& msg, double last_valid_time)
        : std::runtime_error(msg), last_valid_time_(last_valid_time) {}
    double last_valid_time() const { return last_valid_time_; }

  private:
    double last_valid_time_;
};

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fbip
