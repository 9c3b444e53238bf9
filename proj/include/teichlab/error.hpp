#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace teichlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidCurve : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidMappingClass : public Error {
 public:
  using Error::Error;
};

/// A trace triple that is not the character of a discrete faithful
/// representation (trace <= 2 somewhere, or off the Markov surface).
class InvalidPoint : public Error {
 public:
  using Error::Error;
};

/// A numerical limit did not settle within its budget. Carries the partial
/// sequence so callers can report what was observed.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<double>& partial() const noexcept { return partial_; }

 private:
  std::vector<double> partial_;
};

class InsufficientGap : public Error {
 public:
  InsufficientGap(const std::string& what, double gap)
      : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

class BoundedOrbit : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace teichlab
