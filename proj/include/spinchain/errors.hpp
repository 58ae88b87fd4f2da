#pragma once

#include <stdexcept>
#include <string>

namespace spinchain {

// Hilbert-space dimension cap exceeded (state-vector oracle path).
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature grid too coarse for the requested spin size.
class ResolutionError : public std::runtime_error {
public:
  explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinchain
