#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace assistfair {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violates a type invariant (bad probabilities, missing cell, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A prediction or decision was requested for a cell without training data.
class EmptyCellError : public Error {
 public:
  using Error::Error;
};

// Every grid point received zero posterior mass.
class SupportError : public Error {
 public:
  using Error::Error;
};

// The hypotheses of a claim do not hold for the supplied configuration.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside a Monte Carlo replication.
class ReplicationError : public Error {
 public:
  ReplicationError(std::size_t replication, const std::string& what)
      : Error("replication " + std::to_string(replication) + ": " + what),
        replication_(replication) {}

  std::size_t replication() const noexcept { return replication_; }

 private:
  std::size_t replication_;
};

}  // namespace assistfair
