#pragma once
#include <stdexcept>
#include <string>

namespace efb {

// Error taxonomy shared by all modules. Each maps to a distinct failure mode
// of the library contracts; the CLI translates them to exit codes.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};
// Mean parameter on/outside the realizable boundary (e.g. empirical Bernoulli
// mean 0 or 1). Callers decide the fallback.
struct BoundaryError : std::runtime_error {
  explicit BoundaryError(const std::string& m) : std::runtime_error(m) {}
};
struct InversionError : std::runtime_error {
  explicit InversionError(const std::string& m) : std::runtime_error(m) {}
};
struct RegionError : std::runtime_error {
  explicit RegionError(const std::string& m) : std::runtime_error(m) {}
};
struct UnreachableMean : std::runtime_error {
  explicit UnreachableMean(const std::string& m) : std::runtime_error(m) {}
};
struct ValidityError : std::runtime_error {
  explicit ValidityError(const std::string& m) : std::runtime_error(m) {}
};
struct CoverError : std::runtime_error {
  explicit CoverError(const std::string& m) : std::runtime_error(m) {}
};
struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct MismatchError : std::runtime_error {
  explicit MismatchError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace efb
