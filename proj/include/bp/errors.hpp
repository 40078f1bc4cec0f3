#pragma once

#include <stdexcept>
#include <string>

namespace bp {

// Base for every error this library raises on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A domain value failed its construction invariant (bad distribution,
// ragged matrix, non-finite utility, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its stated domain.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

// Conditioning on a signal whose marginal probability is zero. Raised, not
// smoothed over: an impossible observation means the schema and the
// commitment story disagree, and the caller has to know.
class ZeroMarginal : public Error {
 public:
  using Error::Error;
};

// The LP machinery broke down numerically.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Malformed corpus input. `path` points at the offending field.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class MissingField : public Error {
 public:
  explicit MissingField(std::string path)
      : Error("missing field: " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A prompt template referenced a placeholder with no binding.
class MissingPlaceholder : public Error {
 public:
  using Error::Error;
};

// Experiment configuration or corpus problems surfaced by the harness.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

}  // namespace bp
