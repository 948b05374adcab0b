#pragma once

#include <stdexcept>
#include <string>

namespace trimquad {

/// Parametric coordinate outside the domain of a basis or knot vector.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature rule construction failed (moment system not satisfied).
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, int testIndex)
      : std::runtime_error(what), testIndex_(testIndex) {}
  int testIndex() const noexcept { return testIndex_; }

 private:
  int testIndex_;
};

/// Trimming configuration that the decomposition cannot handle.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear system is not symmetric positive definite.
class NotSpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trimquad
