#pragma once

#include <stdexcept>
#include <string>

namespace nvmpr {

// Bad physical or numerical parameter (non-unit axis, zero rate, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an algorithm was not met by its input.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidField : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration errors carry the offending line (0 when unknown) and key.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, std::string key)
      : std::runtime_error(format(message, line, key)), line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(const std::string& message, int line, const std::string& key) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " key '" + key + "'";
    return out + ": " + message;
  }

  int line_;
  std::string key_;
};

}  // namespace nvmpr
