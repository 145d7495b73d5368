#include "chowla/exp_sums.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "chowla/parallel.hpp"
#include "chowla/poly_ensemble.hpp"

namespace chowla {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Phasor recurrences are re-anchored with an exact polar() this often.
constexpr std::int64_t kReanchor = 512;
// Grid values this close count as ties and keep the earlier grid point.
constexpr double kTieTolerance = 1e-12;

std::complex<double> one_sided(double alpha, const std::vector<signed char>& lambda) {
  std::complex<double> sum = 0.0;
  const std::complex<double> step = std::polar(1.0, alpha);
  std::complex<double> phase = step;
  const auto bound = static_cast<std::int64_t>(lambda.size()) - 1;
  for (std::int64_t n = 1; n <= bound; ++n) {
    if (n % kReanchor == 0) phase = std::polar(1.0, std::fmod(alpha * static_cast<double>(n), kTwoPi));
    sum += static_cast<double>(lambda[n]) * phase;
    phase *= step;
  }
  return sum;
}

}  // namespace

std::vector<signed char> lambda_table(std::int64_t bound, const FactorSieve& sieve) {
  if (bound < 0) throw DomainError("lambda_table: X must be non-negative");
  std::vector<signed char> table(static_cast<std::size_t>(bound) + 1, 0);
  for (std::int64_t n = 1; n <= bound; ++n) table[n] = static_cast<signed char>(liouville(n, sieve));
  return table;
}

std::complex<double> lambda_exp_sum(double alpha, std::span<const signed char> lambda) {
  std::complex<double> sum = 0.0;
  const std::complex<double> up = std::polar(1.0, alpha);
  const std::complex<double> down = std::conj(up);
  std::complex<double> pos = up;
  std::complex<double> neg = down;
  const auto bound = static_cast<std::int64_t>(lambda.size()) - 1;
  for (std::int64_t n = 1; n <= bound; ++n) {
    if (n % kReanchor == 0) {
      const double arg = std::fmod(alpha * static_cast<double>(n), kTwoPi);
      pos = std::polar(1.0, arg);
      neg = std::polar(1.0, -arg);
    }
    const double l = lambda[n];
    sum += l * pos;
    sum += l * neg;
    pos *= up;
    neg *= down;
  }
  return sum;
}

double dirichlet_kernel_direct(std::int64_t height, double alpha) {
  double sum = 1.0;
  for (std::int64_t n = 1; n <= height; ++n) sum += 2.0 * std::cos(static_cast<double>(n) * alpha);
  return sum;
}

double dirichlet_kernel(std::int64_t height, double alpha) {
  const double t = std::remainder(alpha, kTwoPi);
  const double denom = std::sin(0.5 * t);
  if (std::abs(denom) <= kKernelSingularity) return dirichlet_kernel_direct(height, t);
  return std::sin((static_cast<double>(height) + 0.5) * t) / denom;
}

std::complex<double> lambda_exp_sum(double alpha, std::int64_t bound, const FactorSieve& sieve) {
  if (bound < 0) throw DomainError("lambda_exp_sum: X must be non-negative");
  std::complex<double> sum = 0.0;
  for (std::int64_t n = -bound; n <= bound; ++n) {
    const int l = liouville(n, sieve);
    if (l == 0) continue;
    const double arg = std::fmod(static_cast<double>(n) * alpha, kTwoPi);
    sum += static_cast<double>(l) * std::polar(1.0, arg);
  }
  return sum;
}

std::complex<double> lambda_exp_sum_one_sided(double alpha, std::int64_t bound, const FactorSieve& sieve) {
  if (bound < 0) throw DomainError("lambda_exp_sum: X must be non-negative");
  return one_sided(alpha, lambda_table(bound, sieve));
}

SupEstimate sup_estimate(std::int64_t bound, std::uint64_t grid_points, const FactorSieve& sieve,
                         unsigned workers) {
  if (bound < 1) throw DomainError("sup_estimate: X must be positive");
  if (grid_points < 2) throw DomainError("sup_estimate: grid_points must be at least 2");
  const auto lambda = lambda_table(bound, sieve);
  const auto shards = partition(grid_points, std::min<std::uint64_t>(grid_points, 64));
  auto best = run_shards<SupEstimate>(shards.size(), workers, [&](std::size_t s) {
    SupEstimate local{0.0, -1.0, grid_points};
    for (std::uint64_t k = shards[s].first; k < shards[s].last; ++k) {
      const double alpha = kTwoPi * static_cast<double>(k) / static_cast<double>(grid_points);
      const double v = std::abs(one_sided(alpha, lambda));
      if (v > local.value * (1.0 + kTieTolerance)) local = {alpha, v, grid_points};
    }
    return local;
  });
  SupEstimate result{0.0, -1.0, grid_points};
  for (const auto& b : best) {
    if (b.value > result.value * (1.0 + kTieTolerance)) result = b;
  }
  return result;
}

KernelL1 kernel_l1(std::int64_t height, std::uint64_t grid_points) {
  if (height < 1) throw DomainError("kernel_l1: H must be positive");
  if (grid_points < static_cast<std::uint64_t>(4 * (2 * height + 1))) {
    throw DomainError("kernel_l1: grid_points must be at least 4(2H+1)");
  }
  const double h = kTwoPi / static_cast<double>(grid_points);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < grid_points; ++k) {
    const double alpha = -std::numbers::pi + (static_cast<double>(k) + 0.5) * h;
    sum += std::abs(dirichlet_kernel(height, alpha));
  }
  return {sum / static_cast<double>(grid_points),
          4.0 / (std::numbers::pi * std::numbers::pi) * std::log(static_cast<double>(height)) + 1.0};
}

}  // namespace chowla
