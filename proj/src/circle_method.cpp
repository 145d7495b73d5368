#include "chowla/circle_method.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chowla/exp_sums.hpp"
#include "chowla/parallel.hpp"
#include "chowla/poly_ensemble.hpp"

namespace chowla {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kShards = 64;
// Above this range lambda is queried per value instead of tabulated.
constexpr std::int64_t kLambdaTableMax = std::int64_t{1} << 24;

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r) || r > kFactorRangeMax || r < -kFactorRangeMax) {
    throw OverflowError(std::string(what) + ": value exceeds 2^62");
  }
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r) || r > kFactorRangeMax) {
    throw OverflowError(std::string(what) + ": value exceeds 2^62");
  }
  return r;
}

void require_distinct(const std::vector<std::int64_t>& points, const char* what) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw DomainError(std::string(what) + ": points must be pairwise distinct");
      }
    }
  }
}

}  // namespace

void CorrelationSpec::validate() const {
  if (degree < 0) throw DomainError("CorrelationSpec: degree must be non-negative");
  if (points.empty() || order() > degree + 1) {
    throw DomainError("CorrelationSpec: order L must satisfy 1 <= L <= d+1");
  }
  for (auto m : points) {
    if (m < 1) throw DomainError("CorrelationSpec: points must be positive");
  }
  if (height < 1) throw DomainError("CorrelationSpec: height must be positive");
}

std::uint64_t QuadratureGrid::nodes() const {
  std::uint64_t total = 1;
  for (auto n : sizes) {
    if (__builtin_mul_overflow(total, n, &total)) return UINT64_MAX;
  }
  return total;
}

std::vector<std::int64_t> exp_sum_bounds(const CorrelationSpec& spec) {
  spec.validate();
  std::vector<std::int64_t> out;
  for (auto m : spec.points) {
    std::int64_t v = checked_mul(spec.degree + 1, spec.height, "exp_sum_bounds");
    for (int j = 0; j < spec.degree; ++j) v = checked_mul(v, m, "exp_sum_bounds");
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> frequency_bound(const CorrelationSpec& spec) {
  const auto bounds = exp_sum_bounds(spec);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    std::int64_t power = 1;
    std::int64_t powers = 0;
    for (int j = 0; j <= spec.degree; ++j) {
      powers = checked_add(powers, power, "frequency_bound");
      if (j < spec.degree) power = checked_mul(power, spec.points[i], "frequency_bound");
    }
    out.push_back(checked_add(bounds[i], checked_mul(spec.height, powers, "frequency_bound"),
                              "frequency_bound"));
  }
  return out;
}

QuadratureGrid quadrature_grid(const CorrelationSpec& spec) {
  QuadratureGrid grid;
  for (auto f : frequency_bound(spec)) grid.sizes.push_back(2 * static_cast<std::uint64_t>(f) + 2);
  return grid;
}

std::int64_t correlation_sum(const CorrelationSpec& spec, const FactorSieve& sieve, unsigned workers) {
  const auto bounds = exp_sum_bounds(spec);
  const EnsembleSpec ensemble({spec.degree}, spec.height, DegreeMode::at_most);
  const std::uint64_t size = EnsembleCursor::checked_size(ensemble);

  std::int64_t max_bound = 0;
  for (auto b : bounds) max_bound = std::max(max_bound, b);
  std::vector<signed char> table;
  if (max_bound <= kLambdaTableMax) table = lambda_table(max_bound, sieve);
  auto lambda_of = [&](std::int64_t v) -> int {
    if (!table.empty()) return table[static_cast<std::size_t>(v < 0 ? -v : v)];
    return liouville(v, sieve);
  };

  const auto shards = partition(size, kShards);
  const auto partial = run_shards<std::int64_t>(shards.size(), workers, [&](std::size_t s) {
    EnsembleCursor cursor(ensemble, shards[s]);
    PolyTuple tuple;
    std::int64_t total = 0;
    while (cursor.next(tuple)) {
      int product = 1;
      for (auto m : spec.points) {
        product *= lambda_of(evaluate(tuple[0], m));
        if (product == 0) break;
      }
      total += product;
    }
    return total;
  });
  std::int64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

std::complex<double> integral_quadrature(const CorrelationSpec& spec, const FactorSieve& sieve,
                                         const QuadratureOptions& options) {
  const auto bounds = exp_sum_bounds(spec);
  QuadratureGrid grid = quadrature_grid(spec);
  const std::size_t axes = grid.sizes.size();
  const int d = spec.degree;
  for (auto& n : grid.sizes) {
    if (options.oversample < 1 || __builtin_mul_overflow(n, options.oversample, &n)) {
      throw ResourceError("integral_quadrature: invalid oversampling", UINT64_MAX);
    }
  }
  const std::uint64_t nodes = grid.nodes();
  if (nodes > options.budget && !options.force) {
    throw ResourceError("integral_quadrature: grid of " + std::to_string(nodes) +
                            " nodes exceeds the budget of " + std::to_string(options.budget),
                        nodes);
  }

  std::int64_t max_bound = 0;
  for (auto b : bounds) max_bound = std::max(max_bound, b);
  const auto lambda = lambda_table(max_bound, sieve);

  // Per-axis conj(S(alpha_k, X_i)) and m_i^j mod N_i. Node k on an axis of
  // size N sits at alpha = 2 pi (k+1)/N - pi, so m^j alpha reduces exactly to
  // 2 pi ((m^j (k+1)) mod N)/N - (m^j mod 2) pi.
  std::vector<std::vector<std::complex<double>>> conj_s(axes);
  std::vector<std::vector<std::uint64_t>> power_mod(axes);
  std::vector<std::vector<int>> power_odd(axes);
  for (std::size_t i = 0; i < axes; ++i) {
    const std::uint64_t n = grid.sizes[i];
    const std::span<const signed char> table(lambda.data(), static_cast<std::size_t>(bounds[i]) + 1);
    conj_s[i].resize(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      const double alpha = kTwoPi * static_cast<double>(k + 1) / static_cast<double>(n) - std::numbers::pi;
      conj_s[i][k] = std::conj(lambda_exp_sum(alpha, table));
    }
    std::uint64_t p_mod = 1 % n;
    int p_odd = 1;
    const auto m = static_cast<std::uint64_t>(spec.points[i]);
    for (int j = 0; j <= d; ++j) {
      power_mod[i].push_back(p_mod);
      power_odd[i].push_back(p_odd);
      p_mod = static_cast<std::uint64_t>(static_cast<unsigned __int128>(p_mod) * (m % n) % n);
      p_odd &= static_cast<int>(m & 1);
    }
  }

  const std::uint64_t outer = grid.sizes[0];
  const auto shards = partition(outer, std::min<std::uint64_t>(outer, kShards));
  const auto partial = run_shards<std::complex<double>>(shards.size(), options.workers, [&](std::size_t s) {
    std::vector<std::uint64_t> index(axes, 0);
    std::complex<double> shard_sum = 0.0;
    std::vector<double> phase(static_cast<std::size_t>(d) + 1);
    for (std::uint64_t k0 = shards[s].first; k0 < shards[s].last; ++k0) {
      std::fill(index.begin(), index.end(), 0);
      index[0] = k0;
      std::complex<double> row_sum = 0.0;
      for (;;) {
        std::complex<double> value = 1.0;
        for (std::size_t i = 0; i < axes; ++i) value *= conj_s[i][index[i]];
        std::fill(phase.begin(), phase.end(), 0.0);
        for (std::size_t i = 0; i < axes; ++i) {
          const std::uint64_t n = grid.sizes[i];
          for (int j = 0; j <= d; ++j) {
            const auto r = static_cast<std::uint64_t>(
                static_cast<unsigned __int128>(power_mod[i][j]) * (index[i] + 1) % n);
            phase[j] += kTwoPi * static_cast<double>(r) / static_cast<double>(n) -
                        (power_odd[i][j] ? std::numbers::pi : 0.0);
          }
        }
        for (int j = 0; j <= d; ++j) value *= dirichlet_kernel(spec.height, phase[j]);
        row_sum += value;

        std::size_t axis = axes;
        while (axis-- > 1) {
          if (++index[axis] < grid.sizes[axis]) break;
          index[axis] = 0;
        }
        if (axis == 0) break;
      }
      shard_sum += row_sum;
    }
    return shard_sum;
  });
  std::complex<double> total = 0.0;
  for (const auto& v : partial) total += v;
  return total / static_cast<double>(nodes);
}

mpz_class vandermonde_det(const std::vector<std::int64_t>& points) {
  require_distinct(points, "vandermonde_det");
  mpz_class det = 1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      det *= mpz_class(static_cast<long>(points[j])) - mpz_class(static_cast<long>(points[i]));
    }
  }
  return det;
}

mpz_class power_sum_product(const std::vector<std::int64_t>& points) {
  mpz_class product = 1;
  const auto order = points.size();
  std::vector<mpz_class> powers(order, 1);
  for (std::size_t j = 0; j < order; ++j) {
    mpz_class sum = 0;
    for (std::size_t i = 0; i < order; ++i) {
      sum += powers[i];
      powers[i] *= mpz_class(static_cast<long>(points[i]));
    }
    product *= sum;
  }
  return product;
}

double bound_reference(const CorrelationSpec& spec) {
  spec.validate();
  require_distinct(spec.points, "bound_reference");
  const auto order = static_cast<unsigned long>(spec.order());
  const unsigned long exponent = (order - 1) * (order - 2) / 2 + static_cast<unsigned long>(spec.degree);
  mpz_class points_product = 1;
  for (auto m : spec.points) points_product *= mpz_class(static_cast<long>(m));
  mpz_class numerator, height_power;
  mpz_pow_ui(numerator.get_mpz_t(), points_product.get_mpz_t(), exponent);
  const mpz_class height(std::to_string(spec.height), 10);
  mpz_pow_ui(height_power.get_mpz_t(), height.get_mpz_t(), static_cast<unsigned long>(spec.degree) + 1);
  numerator *= height_power;
  mpz_class denominator = abs(vandermonde_det(spec.points));
  mpq_class ratio(numerator, denominator);
  ratio.canonicalize();
  return ratio.get_d();
}

IdentityReport verify_identity(const CorrelationSpec& spec, const FactorSieve& sieve, double tol,
                               const QuadratureOptions& options) {
  IdentityReport report;
  report.lhs = correlation_sum(spec, sieve, options.workers);
  const auto rhs = integral_quadrature(spec, sieve, options);
  report.rhs = rhs.real();
  report.rhs_imag = rhs.imag();
  report.abs_err = std::abs(std::complex<double>(static_cast<double>(report.lhs), 0.0) - rhs);
  report.pass = report.abs_err <= tol;
  return report;
}

}  // namespace chowla
