#pragma once

#include <stdexcept>
#include <string>

namespace transeig {

// Every failure mode the library reports is one of these.

struct DivisionByZero : std::domain_error {
  using std::domain_error::domain_error;
};

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct TableUnderflow : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// An exact identity that must hold by construction did not.
struct RecursionBug : std::logic_error {
  using std::logic_error::logic_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct SeedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StiffnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundaryZeroError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace transeig
