#pragma once

#include <stdexcept>
#include <string>

namespace mallows {

/// Thrown when a request exceeds a documented resource guard
/// (e.g. brute-force enumeration beyond the supported size).
class ResourceLimitError : public std::runtime_error {
public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mallows
