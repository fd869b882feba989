#pragma once

#include <stdexcept>
#include <string>

namespace tsfl {

// Malformed or semantically invalid user input. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LP backend or a numerical routine failed to produce a usable answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant was violated; indicates a bug or corrupted input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A series or chain truncation hit its state cap before converging.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsfl
