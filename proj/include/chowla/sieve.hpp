#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "chowla/errors.hpp"

namespace chowla {

/// Smallest-prime-factor table for 2..limit.
///
/// One table answers lambda, mu and full factorization queries in O(log n).
/// Values beyond the limit are handled by the deterministic factorization
/// fallback (see factor()). Immutable after construction, so a single
/// instance can be shared by any number of reader threads.
class FactorSieve {
 public:
  FactorSieve() = default;

  std::uint64_t limit() const noexcept { return limit_; }
  bool contains(std::uint64_t n) const noexcept { return n >= 2 && n <= limit_; }

  /// Least prime dividing n. Requires 2 <= n <= limit().
  std::uint32_t spf(std::uint64_t n) const noexcept { return spf_[n]; }
  bool is_prime(std::uint64_t n) const noexcept { return contains(n) && spf_[n] == n; }

  /// Entries for n = 2..limit, in order.
  std::span<const std::uint32_t> entries() const noexcept {
    return std::span<const std::uint32_t>(spf_).subspan(2);
  }

  bool has_partial_sums() const noexcept { return !lambda_sums_.empty(); }

  /// L(t) = sum_{1<=n<=t} lambda(n) for 0 <= t <= limit.
  std::int64_t summatory_liouville(std::uint64_t t) const;

  /// Number of primes p with lo <= p <= hi, hi <= limit.
  std::uint64_t prime_count(std::uint64_t lo, std::uint64_t hi) const;

  std::size_t memory_bytes() const noexcept {
    return spf_.capacity() * sizeof(std::uint32_t) + lambda_sums_.capacity() * sizeof(std::int32_t);
  }

 private:
  friend FactorSieve build_sieve(std::uint64_t limit, bool with_partial_sums);
  friend FactorSieve load_sieve_cache(const std::filesystem::path& path);

  void build_partial_sums();

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;          // index n; slots 0 and 1 unused
  std::vector<std::int32_t> lambda_sums_;   // optional, index t
};

/// Builds the smallest-prime-factor table up to `limit` (>= 2, < 2^32).
/// Throws ResourceError with the requested byte count when allocation fails.
FactorSieve build_sieve(std::uint64_t limit, bool with_partial_sums = false);

/// (-1)^Omega(|n|), 0 for n = 0. Uses the sieve when |n| <= limit and
/// factorization otherwise. |n| > 2^62 throws RangeError.
int liouville(std::int64_t n, const FactorSieve& sieve);

/// Liouville through the factorization fallback only; never consults a table.
int liouville_by_factoring(std::int64_t n);

/// Moebius function for n >= 1.
int mobius(std::int64_t n, const FactorSieve& sieve);

/// lambda(n) = sum_{d^2 | n} mu(n / d^2), evaluated literally. n <= limit.
int liouville_via_inversion(std::int64_t n, const FactorSieve& sieve);

/// Deterministic Miller-Rabin, valid for every 64-bit input.
bool is_prime_u64(std::uint64_t n);

/// Prime factors of n with multiplicity, ascending. 2 <= n <= 2^62.
std::vector<std::uint64_t> factor(std::uint64_t n);

/// Binary cache: "LIOUSPF1", u64 LE limit, then u32 LE spf for n = 2..limit.
void save_sieve_cache(const FactorSieve& sieve, const std::filesystem::path& path);
FactorSieve load_sieve_cache(const std::filesystem::path& path);

inline constexpr char kSieveCacheMagic[8] = {'L', 'I', 'O', 'U', 'S', 'P', 'F', '1'};

}  // namespace chowla
