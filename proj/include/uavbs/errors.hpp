#pragma once

#include <stdexcept>
#include <string>

namespace uavbs {

/// Coincident or otherwise degenerate points where a channel quantity has no value.
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An argument outside the domain of an operation (non-positive bandwidth, empty list, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver refused to allocate a table or enumerate a state space above its budget.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario / instance / plan file. The message names the offending field path.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace uavbs
