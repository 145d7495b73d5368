#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "chowla/poly_ensemble.hpp"
#include "chowla/sieve.hpp"

namespace chowla {

/// Integers n with x <= n <= 2x, i.e. [ceil(x), floor(2x)]. sqrt(x) uses the real x.
struct IntervalSpec {
  double x = 2.0;
  std::int64_t lo = 2;
  std::int64_t hi = 4;

  static IntervalSpec from_x(double x);
  std::int64_t length() const noexcept { return hi - lo + 1; }
  /// x as an exact rational (the double's binary value).
  mpq_class exact_x() const { return mpq_class(x); }
};

enum class WeightKind { all_ones, prime_indicator, file };

/// Weights b_n on an interval, stored as scaled integers b_n = B_n / scale
/// so weighted sums accumulate exactly.
class WeightSpec {
 public:
  static WeightSpec ones(const IntervalSpec& interval);
  static WeightSpec primes(const IntervalSpec& interval, const FactorSieve& sieve);
  /// Lines "n,re,im" with decimal literals; '#' comments and blank lines are
  /// skipped, missing n default to 0. ValidationError names the offending n
  /// when |b_n| > 1 + 1e-12.
  static WeightSpec from_file(const std::filesystem::path& path, const IntervalSpec& interval);
  /// Same parser over in-memory text; `origin` labels error messages.
  static WeightSpec parse(const std::string& text, const IntervalSpec& interval,
                          const std::string& origin = "<memory>");

  WeightKind kind() const noexcept { return kind_; }
  const std::string& source() const noexcept { return source_; }
  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  /// Common denominator of all weights (1 for the indicator kinds).
  const mpz_class& scale() const noexcept { return scale_; }
  bool is_real() const noexcept { return real_; }
  std::int64_t scaled_re(std::int64_t n) const { return re_[static_cast<std::size_t>(n - lo_)]; }
  std::int64_t scaled_im(std::int64_t n) const { return im_[static_cast<std::size_t>(n - lo_)]; }
  bool is_zero(std::int64_t n) const { return scaled_re(n) == 0 && scaled_im(n) == 0; }

  /// sum_n |b_n|^2 over the interval, exactly.
  mpq_class squared_norm_sum() const;
  std::string kind_name() const;

 private:
  WeightKind kind_ = WeightKind::all_ones;
  std::string source_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = -1;
  mpz_class scale_ = 1;
  bool real_ = true;
  std::vector<std::int64_t> re_;
  std::vector<std::int64_t> im_;
};

/// Exact complex rational.
struct ExactComplex {
  mpq_class re;
  mpq_class im;

  std::string to_string() const;
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

/// sum_{n in interval} prod_i lambda(f_i(n)).
std::int64_t chowla_sum(const PolyTuple& tuple, const IntervalSpec& interval, const FactorSieve& sieve);
inline std::int64_t chowla_sum(const IntPolynomial& f, const IntervalSpec& interval, const FactorSieve& sieve) {
  return chowla_sum(PolyTuple{f}, interval, sieve);
}

/// sum_n b_n prod_i lambda(f_i(n)), exactly.
ExactComplex weighted_chowla_sum(const PolyTuple& tuple, const IntervalSpec& interval,
                                 const WeightSpec& weights, const FactorSieve& sieve);

/// |chowla_sum| / sqrt(x).
double normalized_statistic(const PolyTuple& tuple, const IntervalSpec& interval, const FactorSieve& sieve);

/// Occurrence counts of the scaled weighted sum W * scale over a stream.
/// Power sums, exceedance counts and Monte Carlo variances are all exact
/// functions of this table, and merging shard tables is order independent.
struct StatisticHistogram {
  using Key = std::pair<__int128, __int128>;
  std::map<Key, std::uint64_t> counts;
  std::uint64_t total = 0;

  void merge(const StatisticHistogram& other);
};

StatisticHistogram collect_histogram(const EnsembleSpec& spec, const IntervalSpec& interval,
                                     const WeightSpec& weights, const FactorSieve& sieve,
                                     unsigned workers = 1);

/// Standard normal moments: 0 for odd k, (k-1)!! for even k.
mpz_class gaussian_moment(int k);

/// (2m-1)!! 2^m > m^m, i.e. C_{2m} > (m/2)^m, by exact comparison.
bool gaussian_moment_lower_bound_check(int m);

struct MomentRow {
  int k = 0;
  ExactComplex raw_sum;                 // sum over the stream of W^ceil(k/2) conj(W)^floor(k/2)
  double empirical = 0.0;               // real part of raw_sum / (count x^{k/2})
  double empirical_imag = 0.0;
  std::optional<mpq_class> predicted_exact;
  std::optional<double> predicted;
  std::optional<double> ratio;          // predicted / empirical
  std::optional<double> standard_error;  // Monte Carlo only
  bool in_theorem_range = true;
};

struct MomentReport {
  std::string spec;
  IntervalSpec interval;
  std::string weights;
  bool monte_carlo = false;
  std::uint64_t count = 0;
  std::vector<MomentRow> rows;
  double elapsed_ms = 0.0;
};

MomentReport moment_report(const EnsembleSpec& spec, const IntervalSpec& interval, const WeightSpec& weights,
                           int k_max, const FactorSieve& sieve, unsigned workers = 1);

/// Moment rows from an already collected histogram.
std::vector<MomentRow> moment_rows(const StatisticHistogram& histogram, const EnsembleSpec& spec,
                                   const IntervalSpec& interval, const WeightSpec& weights, int k_max);

struct ExceedanceReport {
  std::uint64_t count = 0;          // #{f : S_f(x) > y}
  std::uint64_t population = 0;
  double proportion = 0.0;
  mpq_class second_moment_exact;    // sum_f S_f(x)^2
  double second_moment_sum = 0.0;
  double chebyshev_bound = 0.0;     // second_moment_sum / y^2
  bool certified = false;           // count * y^2 <= sum_f S_f^2, exactly
};

ExceedanceReport exceedance_report(const EnsembleSpec& spec, const IntervalSpec& interval, double y,
                                   const FactorSieve& sieve, unsigned workers = 1);
ExceedanceReport exceedance_from_histogram(const StatisticHistogram& histogram, const IntervalSpec& interval,
                                           double y);

struct ProbeReport {
  int m = 1;
  double y = 0.0;
  double empirical_2m = 0.0;
  double empirical_4m = 0.0;
  double probe = 0.0;               // max(0, E[S^2m] - y^2m)^2 / E[S^4m]
  double proportion = 0.0;          // P(S_f > y)
  bool numerator_positive = false;  // E[S^2m] > y^2m
  bool certified = false;           // proportion >= probe (exact) when numerator_positive
  std::optional<double> threshold;  // ((d-2)/8)^{(d-2)/(2(d+1))}, d >= 3
  std::optional<bool> threshold_holds;
  std::string note;
};

ProbeReport lower_bound_probe(const EnsembleSpec& spec, const IntervalSpec& interval, double y, int m,
                              const FactorSieve& sieve, unsigned workers = 1);
ProbeReport probe_from_histogram(const StatisticHistogram& histogram, const EnsembleSpec& spec,
                                 const IntervalSpec& interval, double y, int m);

/// Largest |f_i(n)| possible over the ensemble and interval:
/// H sum_j hi^j for the largest degree. Saturates at 2^63-1.
std::uint64_t max_abs_value(const EnsembleSpec& spec, const IntervalSpec& interval);

}  // namespace chowla
