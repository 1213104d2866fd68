// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hlcpe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Configuration problem tied to a JSON path and, when known, a 1-based line.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, int line, const std::string& what)
      : Error(format(path, line, what)), path_(std::move(path)), line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& path, int line, const std::string& what) {
    std::string s = "config error";
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    if (!path.empty()) s += " at '" + path + "'";
    return s + ": " + what;
  }

  std::string path_;
  int line_ = 0;
};

// Run-ending conditions of the time integrator.
enum class Termination { Completed, PositivityLost, MapNoninvertible, Blowup };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::PositivityLost: return "positivity_lost";
    case Termination::MapNoninvertible: return "map_noninvertible";
    case Termination::Blowup: return "blowup";
  }
  return "unknown";
}

class TerminalError : public Error {
 public:
  TerminalError(Termination kind, const std::string& what) : Error(what), kind_(kind) {}
  Termination kind() const { return kind_; }

 private:
  Termination kind_;
};

}  // namespace hlcpe
