#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "chowla/sieve.hpp"

namespace chowla {

/// Degree bound d, order L = m.size(), evaluation points m and height H of
/// a correlation sum over all polynomials with deg <= d and height <= H.
/// Repeated points are allowed.
struct CorrelationSpec {
  int degree = 0;
  std::vector<std::int64_t> points;
  std::int64_t height = 1;

  int order() const noexcept { return static_cast<int>(points.size()); }
  /// Throws DomainError unless 1 <= L <= d+1, all m_i >= 1, H >= 1.
  void validate() const;
};

/// Default refusal threshold for quadrature grids, in nodes.
inline constexpr std::uint64_t kGridBudget = 100'000'000;

struct QuadratureGrid {
  std::vector<std::uint64_t> sizes;
  std::uint64_t nodes() const;
};

/// S-factor range X_i = (d+1) m_i^d H for each point.
std::vector<std::int64_t> exp_sum_bounds(const CorrelationSpec& spec);

/// F_i = (d+1) m_i^d H + H sum_{j=0}^{d} m_i^j, bounding the axis-i
/// frequencies of the integrand. OverflowError past 2^62.
std::vector<std::int64_t> frequency_bound(const CorrelationSpec& spec);

/// N_i = 2 F_i + 2.
QuadratureGrid quadrature_grid(const CorrelationSpec& spec);

/// sum_{deg f <= d, ||f|| <= H} prod_i lambda(f(m_i)), by enumeration.
std::int64_t correlation_sum(const CorrelationSpec& spec, const FactorSieve& sieve,
                             unsigned workers = 1);

struct QuadratureOptions {
  std::uint64_t budget = kGridBudget;
  bool force = false;
  unsigned workers = 1;
  /// Multiplies every axis size; 1 is the Nyquist-exact default.
  std::uint64_t oversample = 1;
};

/// Product-grid average over (-pi, pi]^L of
///   prod_i conj(S(alpha_i, X_i)) * prod_{j=0}^{d} D_H(sum_i m_i^j alpha_i),
/// which equals the normalized torus integral exactly (up to rounding)
/// because each axis size exceeds twice its frequency bound.
std::complex<double> integral_quadrature(const CorrelationSpec& spec, const FactorSieve& sieve,
                                         const QuadratureOptions& options = {});

/// prod_{i<j} (m_j - m_i). DomainError on repeated entries.
mpz_class vandermonde_det(const std::vector<std::int64_t>& points);

/// prod_{j=0}^{L-1} M_j with M_j = sum_i m_i^j.
mpz_class power_sum_product(const std::vector<std::int64_t>& points);

/// (prod m_i)^{(L-1)(L-2)/2 + d} H^{d+1} / prod_{i<j} |m_i - m_j|, the shape
/// of the integral majorant without its log factor or constant.
double bound_reference(const CorrelationSpec& spec);

struct IdentityReport {
  std::int64_t lhs = 0;
  double rhs = 0.0;
  double rhs_imag = 0.0;
  double abs_err = 0.0;
  bool pass = false;
};

IdentityReport verify_identity(const CorrelationSpec& spec, const FactorSieve& sieve, double tol,
                               const QuadratureOptions& options = {});

}  // namespace chowla
