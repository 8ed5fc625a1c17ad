#pragma once

#include <stdexcept>
#include <string>

namespace l3 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class OutOfZone : public Error {
 public:
  using Error::Error;
};

/// Payload or matrix dimensions do not line up with the 2-bit packing.
class SizeError : public Error {
 public:
  using Error::Error;
};

class IncompatibleMatrix : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class InvalidSlot : public Error {
 public:
  using Error::Error;
};

/// Scenario file problem; `key()` names the offending key and `line()` the
/// 1-based line (0 when not tied to a line).
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!key.empty()) s += "key '" + key + "': ";
    return s + what;
  }

  std::string key_;
  int line_;
};

}  // namespace l3
