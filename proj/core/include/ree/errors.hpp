#pragma once

#include <stdexcept>

namespace ree {

/// A randomized (Las Vegas) search ran out of its attempt budget.
class LasVegasFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An element or generating set was shown not to lie in Ree(q).
class NotInGroup : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ree
