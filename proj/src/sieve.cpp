#include "chowla/sieve.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <new>
#include <numeric>
#include <string>

namespace chowla {

namespace {

constexpr std::array<std::uint32_t, 17> kSmallPrimes = {3,  5,  7,  11, 13, 17, 19, 23, 29,
                                                        31, 37, 41, 43, 47, 53, 59, 61};

std::uint64_t checked_magnitude(std::int64_t n) {
  if (n < -kFactorRangeMax || n > kFactorRangeMax) {
    throw RangeError("liouville: |n| = " + std::to_string(n) + " exceeds the certified range 2^62");
  }
  return static_cast<std::uint64_t>(n < 0 ? -n : n);
}

int spf_omega_parity(std::uint64_t n, const FactorSieve& sieve) {
  int parity = 0;
  while (n > 1) {
    n /= sieve.spf(n);
    parity ^= 1;
  }
  return parity;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t n) {
  std::uint64_t result = 1 % n;
  base %= n;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, n);
    base = mul_mod(base, base, n);
    exp >>= 1;
  }
  return result;
}

bool strong_probable_prime(std::uint64_t n, std::uint64_t base, std::uint64_t d, int r) {
  base %= n;
  if (base == 0) return true;
  std::uint64_t x = pow_mod(base, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < r; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

std::uint64_t trial_split(std::uint64_t n) {
  for (std::uint64_t p = 3; p * p <= n; p += 2) {
    if (n % p == 0) return p;
  }
  return n;
}

// Brent's variant of Pollard rho. Tries c = 1, 2, ... and falls back to
// trial division, so a nontrivial divisor of an odd composite is always found.
std::uint64_t find_divisor(std::uint64_t n) {
  constexpr std::uint64_t kBatch = 128;
  constexpr std::uint64_t kMaxIncrements = 64;
  for (std::uint64_t c = 1; c <= kMaxIncrements; ++c) {
    auto step = [&](std::uint64_t v) {
      std::uint64_t s = mul_mod(v, v, n) + c;
      return s >= n ? s - n : s;
    };
    std::uint64_t y = 2, x = 2, ys = 2, q = 1, g = 1;
    for (std::uint64_t r = 1; g == 1; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = step(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        const std::uint64_t lim = std::min(kBatch, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          y = step(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
      if (r > (std::uint64_t{1} << 40)) break;
    }
    if (g == n) {
      do {
        ys = step(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return trial_split(n);
}

// Parity of Omega(n) for n >= 1 with small primes already removed.
int rough_omega_parity(std::uint64_t n, const FactorSieve* sieve) {
  if (n == 1) return 0;
  if (sieve && sieve->contains(n)) return spf_omega_parity(n, *sieve);
  if (is_prime_u64(n)) return 1;
  const std::uint64_t d = find_divisor(n);
  return rough_omega_parity(d, sieve) ^ rough_omega_parity(n / d, sieve);
}

int omega_parity(std::uint64_t n, const FactorSieve* sieve) {
  const int twos = std::countr_zero(n);
  n >>= twos;
  int parity = twos & 1;
  for (std::uint32_t p : kSmallPrimes) {
    if (sieve && sieve->contains(n)) return parity ^ spf_omega_parity(n, *sieve);
    while (n % p == 0) {
      n /= p;
      parity ^= 1;
    }
  }
  return parity ^ rough_omega_parity(n, sieve);
}

void collect_factors(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  const std::uint64_t d = find_divisor(n);
  collect_factors(d, out);
  collect_factors(n / d, out);
}

void write_le(std::ostream& os, std::uint64_t value, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  os.write(buf, bytes);
}

std::uint64_t read_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

FactorSieve build_sieve(std::uint64_t limit, bool with_partial_sums) {
  if (limit < 2) throw DomainError("build_sieve: limit must be at least 2");
  if (limit >= (std::uint64_t{1} << 32)) {
    throw ResourceError("build_sieve: limit must be below 2^32", limit);
  }
  FactorSieve sieve;
  sieve.limit_ = limit;
  try {
    sieve.spf_.assign(limit + 1, 0);
  } catch (const std::bad_alloc&) {
    const auto bytes = (limit + 1) * sizeof(std::uint32_t);
    throw ResourceError("build_sieve: cannot allocate " + std::to_string(bytes) + " bytes", bytes);
  }
  auto& spf = sieve.spf_;
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    spf[i] = static_cast<std::uint32_t>(i);
    if (i > root) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  if (with_partial_sums) sieve.build_partial_sums();
  return sieve;
}

void FactorSieve::build_partial_sums() {
  try {
    lambda_sums_.assign(limit_ + 1, 0);
  } catch (const std::bad_alloc&) {
    const auto bytes = (limit_ + 1) * sizeof(std::int32_t);
    throw ResourceError("build_sieve: cannot allocate partial sums", bytes);
  }
  // lambda(n) = -lambda(n / spf(n)), read back from the running sums.
  lambda_sums_[1] = 1;
  for (std::uint64_t n = 2; n <= limit_; ++n) {
    const std::uint64_t m = n / spf_[n];
    const std::int32_t lambda_m = lambda_sums_[m] - lambda_sums_[m - 1];
    lambda_sums_[n] = lambda_sums_[n - 1] - lambda_m;
  }
}

std::int64_t FactorSieve::summatory_liouville(std::uint64_t t) const {
  if (t > limit_) throw RangeError("summatory_liouville: t exceeds the sieve limit");
  if (has_partial_sums()) return lambda_sums_[t];
  std::int64_t total = 0;
  for (std::uint64_t n = 1; n <= t; ++n) total += (n == 1 || !spf_omega_parity(n, *this)) ? 1 : -1;
  return total;
}

std::uint64_t FactorSieve::prime_count(std::uint64_t lo, std::uint64_t hi) const {
  if (hi > limit_) throw RangeError("prime_count: range exceeds the sieve limit");
  std::uint64_t count = 0;
  for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n <= hi; ++n) count += spf_[n] == n;
  return count;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n % p == 0) return n == p;
  }
  if (n < 41 * 41) return true;
  std::uint64_t d = n - 1;
  const int r = std::countr_zero(d);
  d >>= r;
  // {2,3,5,7} is deterministic below 3215031751; the seven Jaeschke/Sinclair
  // bases cover all of 2^64.
  if (n < 3215031751ULL) {
    for (std::uint64_t a : {2u, 3u, 5u, 7u}) {
      if (!strong_probable_prime(n, a, d, r)) return false;
    }
    return true;
  }
  for (std::uint64_t a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    if (!strong_probable_prime(n, a, d, r)) return false;
  }
  return true;
}

std::vector<std::uint64_t> factor(std::uint64_t n) {
  if (n < 2 || n > static_cast<std::uint64_t>(kFactorRangeMax)) {
    throw RangeError("factor: n = " + std::to_string(n) + " outside [2, 2^62]");
  }
  std::vector<std::uint64_t> out;
  while ((n & 1) == 0) {
    out.push_back(2);
    n >>= 1;
  }
  for (std::uint32_t p : kSmallPrimes) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  collect_factors(n, out);
  std::sort(out.begin(), out.end());
  return out;
}

int liouville(std::int64_t n, const FactorSieve& sieve) {
  const std::uint64_t a = checked_magnitude(n);
  if (a == 0) return 0;
  if (a <= sieve.limit()) return spf_omega_parity(a, sieve) ? -1 : 1;
  return omega_parity(a, &sieve) ? -1 : 1;
}

int liouville_by_factoring(std::int64_t n) {
  const std::uint64_t a = checked_magnitude(n);
  if (a == 0) return 0;
  return omega_parity(a, nullptr) ? -1 : 1;
}

int mobius(std::int64_t n, const FactorSieve& sieve) {
  if (n < 1) throw DomainError("mobius: n must be positive");
  if (n > kFactorRangeMax) throw RangeError("mobius: n exceeds the certified range 2^62");
  std::uint64_t a = static_cast<std::uint64_t>(n);
  if (a == 1) return 1;
  std::uint64_t last = 0;
  int sign = 1;
  auto visit = [&](std::uint64_t p) {
    if (p == last) return false;
    last = p;
    sign = -sign;
    return true;
  };
  if (sieve.contains(a)) {
    while (a > 1) {
      if (!visit(sieve.spf(a))) return 0;
      a /= sieve.spf(a);
    }
    return sign;
  }
  for (std::uint64_t p : factor(a)) {
    if (!visit(p)) return 0;
  }
  return sign;
}

int liouville_via_inversion(std::int64_t n, const FactorSieve& sieve) {
  if (n < 1) throw DomainError("liouville_via_inversion: n must be positive");
  if (static_cast<std::uint64_t>(n) > sieve.limit()) {
    throw RangeError("liouville_via_inversion: n exceeds the sieve limit");
  }
  int total = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % (d * d) == 0) total += mobius(n / (d * d), sieve);
  }
  return total;
}

void save_sieve_cache(const FactorSieve& sieve, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open sieve cache for writing: " + path.string());
  os.write(kSieveCacheMagic, sizeof(kSieveCacheMagic));
  write_le(os, sieve.limit(), 8);
  std::vector<char> buf;
  buf.reserve(4 * 65536);
  for (std::uint32_t v : sieve.entries()) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    if (buf.size() == buf.capacity()) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw ValidationError("failed writing sieve cache: " + path.string());
}

FactorSieve load_sieve_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open sieve cache: " + path.string());
  unsigned char header[16];
  if (!is.read(reinterpret_cast<char*>(header), 16)) {
    throw ValidationError("truncated sieve cache header: " + path.string());
  }
  if (!std::equal(header, header + 8, reinterpret_cast<const unsigned char*>(kSieveCacheMagic))) {
    throw ValidationError("bad sieve cache magic: " + path.string());
  }
  const std::uint64_t limit = read_le(header + 8, 8);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || limit < 2 || limit >= (std::uint64_t{1} << 32) || size != 16 + 4 * (limit - 1)) {
    throw ValidationError("sieve cache length does not match its limit: " + path.string());
  }
  FactorSieve sieve;
  sieve.limit_ = limit;
  sieve.spf_.assign(limit + 1, 0);
  std::vector<unsigned char> buf(4 * 65536);
  std::uint64_t n = 2;
  while (n <= limit) {
    const std::uint64_t chunk = std::min<std::uint64_t>(65536, limit - n + 1);
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(4 * chunk))) {
      throw ValidationError("truncated sieve cache body: " + path.string());
    }
    for (std::uint64_t i = 0; i < chunk; ++i, ++n) {
      sieve.spf_[n] = static_cast<std::uint32_t>(read_le(buf.data() + 4 * i, 4));
    }
  }
  return sieve;
}

}  // namespace chowla
