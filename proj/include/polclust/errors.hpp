#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polclust {

using InvalidArgument = std::invalid_argument;

// Stokes vector too far from the pure-state sphere to be given angles.
class DegradedPurity : public std::runtime_error {
 public:
  explicit DegradedPurity(double purity)
      : std::runtime_error("degraded purity: |s|/s0 = " + std::to_string(purity)),
        purity_(purity) {}
  double purity() const { return purity_; }

 private:
  double purity_;
};

class UnsupportedK : public std::invalid_argument {
 public:
  explicit UnsupportedK(int k)
      : std::invalid_argument("unsupported cluster count k = " + std::to_string(k) +
                              " (supported: 1..6)") {}
};

class EvaluationUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedDimension : public std::runtime_error {
 public:
  explicit UnsupportedDimension(std::size_t features)
      : std::runtime_error("only 2-feature datasets are supported, got " +
                           std::to_string(features)),
        features_(features) {}
  std::size_t features() const { return features_; }

 private:
  std::size_t features_;
};

// Wire-protocol failures, kept distinct so callers can tell them apart.
class ConnectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polclust
