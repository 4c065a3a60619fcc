#pragma once

#include <stdexcept>
#include <string>

namespace capkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mixing points, sets or mappings of different dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// A point fed to a mapping fell outside its domain, or a map declared
// domain-preserving produced an image outside it.
struct DomainError : Error {
  using Error::Error;
};

// Scenario files or constructor arguments that violate a contract.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace capkit
