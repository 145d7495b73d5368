// Brute-force references. Deliberately naive and independent of the library:
// trial division, nested loops, direct trigonometric sums.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

inline int omega_total(std::int64_t n) {
  if (n < 0) n = -n;
  int count = 0;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      n /= p;
      ++count;
    }
  }
  if (n > 1) ++count;
  return count;
}

inline int liouville(std::int64_t n) {
  if (n == 0) return 0;
  return omega_total(n) % 2 ? -1 : 1;
}

inline int mobius(std::int64_t n) {
  int sign = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  if (n > 1) sign = -sign;
  return sign;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

inline std::int64_t poly_value(const std::vector<std::int64_t>& c, std::int64_t n) {
  std::int64_t v = 0, power = 1;
  for (auto a : c) {
    v += a * power;
    power *= n;
  }
  return v;
}

// All coefficient vectors of degree d (exact: leading nonzero) with height H,
// produced by counting in base 2H+1 independently of the library cursor.
inline std::vector<std::vector<std::int64_t>> polys(int d, std::int64_t H, bool exact) {
  std::vector<std::vector<std::int64_t>> out;
  const std::int64_t base = 2 * H + 1;
  std::int64_t total = 1;
  for (int j = 0; j <= d; ++j) total *= base;
  for (std::int64_t code = 0; code < total; ++code) {
    std::vector<std::int64_t> c(d + 1);
    std::int64_t r = code;
    for (int j = 0; j <= d; ++j) {
      c[j] = r % base - H;
      r /= base;
    }
    if (exact && c[d] == 0) continue;
    out.push_back(c);
  }
  return out;
}

inline std::int64_t chowla(const std::vector<std::int64_t>& c, std::int64_t lo, std::int64_t hi) {
  std::int64_t s = 0;
  for (std::int64_t n = lo; n <= hi; ++n) s += liouville(poly_value(c, n));
  return s;
}

inline double dirichlet(std::int64_t H, double alpha) {
  double s = 1.0;
  for (std::int64_t n = 1; n <= H; ++n) s += 2.0 * std::cos(static_cast<double>(n) * alpha);
  return s;
}

}  // namespace oracle
