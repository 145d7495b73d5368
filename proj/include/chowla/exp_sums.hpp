#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "chowla/sieve.hpp"

namespace chowla {

/// Below this |sin(alpha/2)| the Dirichlet kernel is summed directly.
inline constexpr double kKernelSingularity = 1e-8;

struct KernelEvaluation {
  std::int64_t height;
  double alpha;
  double value;
};

/// D_H(alpha) = sum_{|n|<=H} e^{i n alpha}, a real number with |D_H| <= 2H+1.
double dirichlet_kernel(std::int64_t height, double alpha);

/// 1 + 2 sum_{n=1}^{H} cos(n alpha), the kernel without the closed form.
double dirichlet_kernel_direct(std::int64_t height, double alpha);

/// S(alpha, X) = sum_{n in [-X, X]} lambda(n) e^{i n alpha}, summed over both
/// signs so the imaginary part is a rounding residue rather than a zero by
/// construction.
std::complex<double> lambda_exp_sum(double alpha, std::int64_t bound, const FactorSieve& sieve);

/// lambda(0..X) as a table, lambda(0) = 0.
std::vector<signed char> lambda_table(std::int64_t bound, const FactorSieve& sieve);

/// S(alpha, X) from a precomputed table of lambda(0..X), by phasor recurrence.
std::complex<double> lambda_exp_sum(double alpha, std::span<const signed char> lambda);

/// sum_{n=1}^{X} lambda(n) e^{i n alpha}.
std::complex<double> lambda_exp_sum_one_sided(double alpha, std::int64_t bound, const FactorSieve& sieve);

struct SupEstimate {
  double alpha_star = 0.0;
  double value = 0.0;
  std::uint64_t grid_points = 0;
};

/// Grid maximum of |sum_{n=1}^{X} lambda(n) e^{i n alpha}| over
/// alpha = 2 pi k / grid_points. A lower estimate of the supremum; ties go
/// to the smallest k.
SupEstimate sup_estimate(std::int64_t bound, std::uint64_t grid_points, const FactorSieve& sieve,
                         unsigned workers = 1);

/// Grid size giving spacing pi / (4X).
inline std::uint64_t default_sup_grid(std::int64_t bound) { return 8 * static_cast<std::uint64_t>(bound); }

struct KernelL1 {
  double estimate = 0.0;   // (1/2pi) int_{-pi}^{pi} |D_H|
  double reference = 0.0;  // (4/pi^2) ln H + 1, for comparison only
};

/// Midpoint rule for the normalized L^1 norm of D_H; grid_points >= 4(2H+1).
KernelL1 kernel_l1(std::int64_t height, std::uint64_t grid_points);

}  // namespace chowla
