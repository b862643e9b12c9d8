#pragma once

#include <stdexcept>
#include <string>

namespace faultsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSpecError : Error { using Error::Error; };
struct RefinementOverflowError : Error { using Error::Error; };
struct AssemblyError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NoContactError : Error { using Error::Error; };
struct DegenerateGeometryError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct StepFailureError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace faultsim
