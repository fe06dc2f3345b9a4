#pragma once

#include <stdexcept>
#include <string>

namespace klandau {

/// Base class for every error raised by the library. The message is the
/// user-facing diagnostic; the CLI prints it verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace klandau
