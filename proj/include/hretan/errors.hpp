#pragma once

#include <stdexcept>
#include <string>

namespace hretan {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CycleError : public Error { using Error::Error; };
class UnknownFeatureError : public Error { using Error::Error; };
class DuplicateFeatureError : public Error { using Error::Error; };
class IndexError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };
class StructureError : public Error { using Error::Error; };
class LengthMismatchError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class TooFewPairsError : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised by the redundancy-eliminated spanning tree when no edge survives.
// Callers fall back to the class prior.
class EmptyTreeSignal : public Error {
 public:
  EmptyTreeSignal() : Error("no admissible edge: empty feature tree") {}
};

}  // namespace hretan
