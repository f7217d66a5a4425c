#pragma once

#include <stdexcept>
#include <string>

namespace trajfid {

// Input violates a documented schema or invariant. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be read as the expected syntax (e.g. broken JSON). Exit 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written. Exit 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trajfid
