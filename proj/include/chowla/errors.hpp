#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chowla {

/// Argument outside the range an operation can certify (e.g. |n| > 2^62).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Integer arithmetic would leave its 63-bit budget.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Mathematically undefined input (repeated Vandermonde nodes, d < 3 for the probe threshold, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Memory or work budget exceeded. Carries the requested size.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t requested)
      : std::runtime_error(what), requested_(requested) {}
  std::uint64_t requested() const noexcept { return requested_; }

 private:
  std::uint64_t requested_;
};

/// Malformed input data (weight files, caches, configs).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest magnitude accepted by the factorization fallback.
inline constexpr std::int64_t kFactorRangeMax = std::int64_t{1} << 62;

}  // namespace chowla
