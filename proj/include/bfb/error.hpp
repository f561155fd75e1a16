#pragma once

#include <stdexcept>
#include <string>

namespace bfb {

/// Error type thrown by all library operations (degenerate geometry,
/// solver non-convergence, eigen-iteration stagnation, ...).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bfb
