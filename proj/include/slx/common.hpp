#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slx {

// Error hierarchy: every failure mode raised by the library derives from
// Error so callers can catch library faults separately from std ones.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateSimplex : Error {
  explicit DegenerateSimplex(const std::string& msg = "degenerate simplex")
      : Error(msg) {}
};

struct DimMismatch : Error {
  explicit DimMismatch(const std::string& msg = "dimension mismatch")
      : Error(msg) {}
};

struct UnsupportedNoiseless : Error {
  explicit UnsupportedNoiseless(const std::string& msg =
                                    "operation requires sigma > 0")
      : Error(msg) {}
};

struct NoiseBoundUndefined : Error {
  explicit NoiseBoundUndefined(const std::string& msg =
                                   "noise bound undefined for this K")
      : Error(msg) {}
};

struct InvalidConfidence : Error {
  explicit InvalidConfidence(const std::string& msg =
                                 "confidence level out of (0,1)")
      : Error(msg) {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& msg = "invalid configuration")
      : Error(msg) {}
};

struct InsufficientCover : Error {
  explicit InsufficientCover(const std::string& msg =
                                 "not enough cover points")
      : Error(msg) {}
};

struct EmptyFamily : Error {
  explicit EmptyFamily(const std::string& msg = "empty hypothesis family")
      : Error(msg) {}
};

struct PackingBudgetExceeded : Error {
  int achieved;
  PackingBudgetExceeded(int achieved_members, const std::string& msg)
      : Error(msg), achieved(achieved_members) {}
};

struct UnsupportedDimension : Error {
  explicit UnsupportedDimension(const std::string& msg =
                                    "dimension not supported by this mode")
      : Error(msg) {}
};

}  // namespace slx
