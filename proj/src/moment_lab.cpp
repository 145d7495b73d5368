#include "chowla/moment_lab.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chowla/parallel.hpp"

namespace chowla {

namespace {

constexpr std::size_t kShards = 64;
// Upper bound on the interval length the lab will resolve.
constexpr std::int64_t kMaxIntervalLength = std::int64_t{1} << 32;

mpz_class to_mpz(__int128 v) {
  const bool negative = v < 0;
  unsigned __int128 u = negative ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(u >> 64));
  mpz_class lo(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
  mpz_class out = (hi << 64) + lo;
  return negative ? mpz_class(-out) : out;
}

mpq_class pow_q(const mpq_class& base, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  mpq_class out(num, den);
  out.canonicalize();
  return out;
}

mpz_class pow_z(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

// Scaled weighted sum (re, im) of one tuple: scale * sum_n b_n prod lambda(f_i(n)).
std::pair<__int128, __int128> scaled_sum(const PolyTuple& tuple, const IntervalSpec& interval,
                                         const WeightSpec& weights, const FactorSieve& sieve) {
  __int128 re = 0, im = 0;
  for (std::int64_t n = interval.lo; n <= interval.hi; ++n) {
    if (weights.is_zero(n)) continue;
    int product = 1;
    for (const auto& f : tuple) {
      product *= liouville(evaluate(f, n), sieve);
      if (product == 0) break;
    }
    if (product == 0) continue;
    re += static_cast<__int128>(product) * weights.scaled_re(n);
    im += static_cast<__int128>(product) * weights.scaled_im(n);
  }
  return {re, im};
}

// Parses a decimal literal ([+-]digits[.digits][e[+-]digits]) exactly.
std::optional<mpq_class> parse_decimal(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  s = s.substr(i);
  if (s.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long fraction = 0;
  bool seen_digit = false, seen_dot = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++fraction;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return std::nullopt;
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') return std::nullopt;
    const std::string tail = s.substr(pos + 1);
    if (tail.empty() || tail.size() > 6) return std::nullopt;
    std::size_t used = 0;
    try {
      exponent = std::stol(tail, &used);
    } catch (...) {
      return std::nullopt;
    }
    if (used != tail.size()) return std::nullopt;
  }
  mpq_class value(mpz_class(digits, 10), 1);
  const long shift = exponent - fraction;
  if (shift > 0) value *= pow_z(10, static_cast<unsigned long>(shift));
  if (shift < 0) value /= pow_z(10, static_cast<unsigned long>(-shift));
  value.canonicalize();
  return negative ? mpq_class(-value) : value;
}

}  // namespace

IntervalSpec IntervalSpec::from_x(double x) {
  if (!std::isfinite(x) || x < 2.0) throw DomainError("IntervalSpec: x must be a finite real >= 2");
  IntervalSpec out;
  out.x = x;
  out.lo = static_cast<std::int64_t>(std::ceil(x));
  out.hi = static_cast<std::int64_t>(std::floor(2.0 * x));
  if (out.length() > kMaxIntervalLength) throw DomainError("IntervalSpec: interval too long");
  return out;
}

WeightSpec WeightSpec::ones(const IntervalSpec& interval) {
  WeightSpec w;
  w.kind_ = WeightKind::all_ones;
  w.source_ = "ones";
  w.lo_ = interval.lo;
  w.hi_ = interval.hi;
  w.re_.assign(static_cast<std::size_t>(interval.length()), 1);
  w.im_.assign(static_cast<std::size_t>(interval.length()), 0);
  return w;
}

WeightSpec WeightSpec::primes(const IntervalSpec& interval, const FactorSieve& sieve) {
  WeightSpec w = ones(interval);
  w.kind_ = WeightKind::prime_indicator;
  w.source_ = "prime";
  for (std::int64_t n = interval.lo; n <= interval.hi; ++n) {
    const auto u = static_cast<std::uint64_t>(n);
    const bool prime = sieve.contains(u) ? sieve.is_prime(u) : is_prime_u64(u);
    w.re_[static_cast<std::size_t>(n - w.lo_)] = prime ? 1 : 0;
  }
  return w;
}

WeightSpec WeightSpec::from_file(const std::filesystem::path& path, const IntervalSpec& interval) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open weight file: " + path.string());
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse(buffer.str(), interval, path.string());
}

WeightSpec WeightSpec::parse(const std::string& text, const IntervalSpec& interval, const std::string& origin) {
  std::map<std::int64_t, std::pair<mpq_class, mpq_class>> entries;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  const mpq_class limit = pow_q(mpq_class(1) + mpq_class(1, pow_z(10, 12)), 2);
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string field; std::getline(ls, field, ',');) fields.push_back(field);
    auto bad_line = [&](const std::string& why) {
      return ValidationError(origin + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 3) throw bad_line("expected n,re,im");
    const auto n_value = parse_decimal(fields[0]);
    if (!n_value || n_value->get_den() != 1 || !n_value->get_num().fits_slong_p()) {
      throw bad_line("n must be an integer");
    }
    const std::int64_t n = n_value->get_num().get_si();
    const auto re = parse_decimal(fields[1]);
    const auto im = parse_decimal(fields[2]);
    if (!re || !im) throw bad_line("weights must be decimal literals");
    if (*re * *re + *im * *im > limit) {
      throw ValidationError(origin + ": weight at n=" + std::to_string(n) + " has magnitude above 1");
    }
    if (!entries.emplace(n, std::make_pair(*re, *im)).second) {
      throw bad_line("duplicate weight for n=" + std::to_string(n));
    }
  }

  WeightSpec w = ones(interval);
  w.kind_ = WeightKind::file;
  w.source_ = origin;
  mpz_class scale = 1;
  for (const auto& [n, value] : entries) {
    if (n < interval.lo || n > interval.hi) continue;
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), value.first.get_den_mpz_t());
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), value.second.get_den_mpz_t());
  }
  if (scale > pow_z(10, 18)) {
    throw ValidationError(origin + ": weights need a common denominator above 10^18");
  }
  w.scale_ = scale;
  std::fill(w.re_.begin(), w.re_.end(), 0);
  for (const auto& [n, value] : entries) {
    if (n < interval.lo || n > interval.hi) continue;
    const mpq_class re = value.first * scale;
    const mpq_class im = value.second * scale;
    const auto idx = static_cast<std::size_t>(n - interval.lo);
    w.re_[idx] = re.get_num().get_si();
    w.im_[idx] = im.get_num().get_si();
    if (w.im_[idx] != 0) w.real_ = false;
  }
  return w;
}

mpq_class WeightSpec::squared_norm_sum() const {
  mpz_class total = 0;
  for (std::size_t i = 0; i < re_.size(); ++i) {
    const mpz_class a(static_cast<long>(re_[i]));
    const mpz_class b(static_cast<long>(im_[i]));
    total += a * a + b * b;
  }
  mpq_class out(total, scale_ * scale_);
  out.canonicalize();
  return out;
}

std::string WeightSpec::kind_name() const {
  switch (kind_) {
    case WeightKind::all_ones: return "ones";
    case WeightKind::prime_indicator: return "prime";
    case WeightKind::file: return "file";
  }
  return "unknown";
}

std::string ExactComplex::to_string() const {
  if (im == 0) return re.get_str();
  std::string out = re.get_str();
  out += im < 0 ? "-" : "+";
  out += mpq_class(abs(im)).get_str();
  out += "i";
  return out;
}

std::int64_t chowla_sum(const PolyTuple& tuple, const IntervalSpec& interval, const FactorSieve& sieve) {
  std::int64_t total = 0;
  for (std::int64_t n = interval.lo; n <= interval.hi; ++n) {
    int product = 1;
    for (const auto& f : tuple) {
      product *= liouville(evaluate(f, n), sieve);
      if (product == 0) break;
    }
    total += product;
  }
  return total;
}

ExactComplex weighted_chowla_sum(const PolyTuple& tuple, const IntervalSpec& interval, const WeightSpec& weights,
                                 const FactorSieve& sieve) {
  if (weights.lo() != interval.lo || weights.hi() != interval.hi) {
    throw DomainError("weighted_chowla_sum: weights were resolved on a different interval");
  }
  const auto [re, im] = scaled_sum(tuple, interval, weights, sieve);
  ExactComplex out{mpq_class(to_mpz(re), weights.scale()), mpq_class(to_mpz(im), weights.scale())};
  out.re.canonicalize();
  out.im.canonicalize();
  return out;
}

double normalized_statistic(const PolyTuple& tuple, const IntervalSpec& interval, const FactorSieve& sieve) {
  return std::abs(static_cast<double>(chowla_sum(tuple, interval, sieve))) / std::sqrt(interval.x);
}

void StatisticHistogram::merge(const StatisticHistogram& other) {
  for (const auto& [key, count] : other.counts) counts[key] += count;
  total += other.total;
}

StatisticHistogram collect_histogram(const EnsembleSpec& spec, const IntervalSpec& interval,
                                     const WeightSpec& weights, const FactorSieve& sieve, unsigned workers) {
  if (weights.lo() != interval.lo || weights.hi() != interval.hi) {
    throw DomainError("collect_histogram: weights were resolved on a different interval");
  }
  const std::uint64_t length = stream_length(spec);
  const auto shards = partition(length, kShards, spec.is_full() ? 1 : kSampleBlock);
  const auto partial = run_shards<StatisticHistogram>(shards.size(), workers, [&](std::size_t s) {
    StatisticHistogram local;
    for_each_tuple(spec, shards[s], [&](const PolyTuple& tuple) {
      ++local.counts[scaled_sum(tuple, interval, weights, sieve)];
      ++local.total;
    });
    return local;
  });
  StatisticHistogram merged;
  for (const auto& h : partial) merged.merge(h);
  return merged;
}

mpz_class gaussian_moment(int k) {
  if (k < 1) throw DomainError("gaussian_moment: k must be positive");
  if (k % 2) return 0;
  mpz_class out;
  mpz_2fac_ui(out.get_mpz_t(), static_cast<unsigned long>(k - 1));
  return out;
}

bool gaussian_moment_lower_bound_check(int m) {
  if (m < 1) throw DomainError("gaussian_moment_lower_bound_check: m must be positive");
  const mpz_class lhs = gaussian_moment(2 * m) * pow_z(2, static_cast<unsigned long>(m));
  const mpz_class rhs = pow_z(mpz_class(m), static_cast<unsigned long>(m));
  return lhs > rhs;
}

std::vector<MomentRow> moment_rows(const StatisticHistogram& histogram, const EnsembleSpec& spec,
                                   const IntervalSpec& interval, const WeightSpec& weights, int k_max) {
  if (k_max < 1) throw DomainError("moment_report: k_max must be positive");
  const auto count = histogram.total;
  const bool unweighted = weights.kind() == WeightKind::all_ones;
  const mpq_class x = interval.exact_x();
  const mpz_class main_term = pow_z(2 * mpz_class(static_cast<long>(spec.height())),
                                    static_cast<unsigned long>(spec.total_coefficients()));

  // Per histogram entry: z = W * scale as an exact Gaussian integer.
  struct Entry {
    mpz_class re, im, norm;
    mpz_class weight;
  };
  std::vector<Entry> entries;
  entries.reserve(histogram.counts.size());
  for (const auto& [key, c] : histogram.counts) {
    Entry e{to_mpz(key.first), to_mpz(key.second), 0, mpz_class(static_cast<unsigned long>(c))};
    e.norm = e.re * e.re + e.im * e.im;
    entries.push_back(std::move(e));
  }

  std::vector<MomentRow> rows;
  for (int k = 1; k <= k_max; ++k) {
    const auto half = static_cast<unsigned long>(k / 2);
    // W^ceil(k/2) conj(W)^floor(k/2) = |W|^{2 floor(k/2)} W^{k mod 2}
    mpz_class sum_re = 0, sum_im = 0, sum_abs2 = 0;
    for (const auto& e : entries) {
      const mpz_class modulus = pow_z(e.norm, half);
      if (k % 2) {
        sum_re += e.weight * modulus * e.re;
        sum_im += e.weight * modulus * e.im;
      } else {
        sum_re += e.weight * modulus;
      }
      sum_abs2 += e.weight * pow_z(e.norm, static_cast<unsigned long>(k));
    }
    const mpz_class scale_k = pow_z(weights.scale(), static_cast<unsigned long>(k));
    MomentRow row;
    row.k = k;
    row.raw_sum.re = mpq_class(sum_re, scale_k);
    row.raw_sum.im = mpq_class(sum_im, scale_k);
    row.raw_sum.re.canonicalize();
    row.raw_sum.im.canonicalize();

    const double root = std::pow(interval.x, 0.5 * k);
    const double denom = static_cast<double>(count) * root;
    if (count > 0) {
      row.empirical = row.raw_sum.re.get_d() / denom;
      row.empirical_imag = row.raw_sum.im.get_d() / denom;
    }

    if (count > 0) {
      // Normalized by the population size, which is the sample count only
      // for full enumeration.
      const mpq_class count_q(ensemble_size(spec));
      if (unweighted) {
        row.predicted_exact = mpq_class(gaussian_moment(k) * main_term) / count_q;
        row.in_theorem_range = k <= spec.max_degree() + 1;
      } else if (k == 1) {
        row.predicted_exact = mpq_class(0);
        row.in_theorem_range = true;
      } else if (k == 2) {
        row.predicted_exact = weights.squared_norm_sum() / x * mpq_class(main_term) / count_q;
        row.in_theorem_range = true;
      } else {
        row.in_theorem_range = false;
      }
      if (row.predicted_exact) {
        row.predicted_exact->canonicalize();
        row.predicted = row.predicted_exact->get_d();
        if (row.empirical != 0.0) row.ratio = *row.predicted / row.empirical + 0.0;
      }
    }

    if (!spec.is_full() && count > 1) {
      // Sample variance of v = W^.. / x^{k/2}: (sum|v|^2 - |sum v|^2 / n) / (n - 1).
      const mpq_class n_q(mpz_class(static_cast<unsigned long>(count)));
      mpq_class centered = mpq_class(sum_abs2) - mpq_class(sum_re * sum_re + sum_im * sum_im) / n_q;
      centered.canonicalize();
      const double variance =
          centered.get_d() / mpz_class(scale_k * scale_k).get_d() / std::pow(interval.x, k) / static_cast<double>(count - 1);
      row.standard_error = std::sqrt(std::max(0.0, variance) / static_cast<double>(count));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MomentReport moment_report(const EnsembleSpec& spec, const IntervalSpec& interval, const WeightSpec& weights,
                           int k_max, const FactorSieve& sieve, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  MomentReport report;
  report.spec = spec.describe();
  report.interval = interval;
  report.weights = weights.kind_name();
  report.monte_carlo = !spec.is_full();
  const auto histogram = collect_histogram(spec, interval, weights, sieve, workers);
  report.count = histogram.total;
  report.rows = moment_rows(histogram, spec, interval, weights, k_max);
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExceedanceReport exceedance_from_histogram(const StatisticHistogram& histogram, const IntervalSpec& interval,
                                           double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("exceedance_report: y must be a positive real");
  const mpq_class x = interval.exact_x();
  const mpq_class yq(y);
  const mpq_class threshold = yq * yq * x;  // S_f > y  <=>  C^2 > y^2 x
  ExceedanceReport report;
  report.population = histogram.total;
  mpz_class squares = 0;
  for (const auto& [key, c] : histogram.counts) {
    if (key.second != 0) throw DomainError("exceedance_report: statistic must be real");
    const mpz_class value = to_mpz(key.first);
    const mpz_class sq = value * value;
    squares += sq * mpz_class(static_cast<unsigned long>(c));
    if (mpq_class(sq) > threshold) report.count += c;
  }
  report.second_moment_exact = mpq_class(squares) / x;
  report.second_moment_exact.canonicalize();
  report.second_moment_sum = report.second_moment_exact.get_d();
  report.chebyshev_bound = report.second_moment_sum / (y * y);
  report.proportion = report.population ? static_cast<double>(report.count) / static_cast<double>(report.population) : 0.0;
  report.certified = mpq_class(mpz_class(static_cast<unsigned long>(report.count))) * yq * yq <=
                     report.second_moment_exact;
  return report;
}

ExceedanceReport exceedance_report(const EnsembleSpec& spec, const IntervalSpec& interval, double y,
                                   const FactorSieve& sieve, unsigned workers) {
  if (!spec.is_full()) throw DomainError("exceedance_report: requires full enumeration");
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("exceedance_report: y must be a positive real");
  const auto histogram = collect_histogram(spec, interval, WeightSpec::ones(interval), sieve, workers);
  return exceedance_from_histogram(histogram, interval, y);
}

ProbeReport probe_from_histogram(const StatisticHistogram& histogram, const EnsembleSpec& spec,
                                 const IntervalSpec& interval, double y, int m) {
  if (m < 1) throw DomainError("lower_bound_probe: m must be positive");
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("lower_bound_probe: y must be a non-negative real");
  if (histogram.total == 0) throw DomainError("lower_bound_probe: empty ensemble");
  const mpq_class x = interval.exact_x();
  const mpq_class yq(y);
  const mpq_class y2 = yq * yq;
  const mpq_class threshold = y2 * x;
  const auto um = static_cast<unsigned long>(m);

  mpz_class sum_2m = 0, sum_4m = 0;
  std::uint64_t exceed = 0;
  for (const auto& [key, c] : histogram.counts) {
    if (key.second != 0) throw DomainError("lower_bound_probe: statistic must be real");
    const mpz_class sq = to_mpz(key.first) * to_mpz(key.first);
    const mpz_class weight(static_cast<unsigned long>(c));
    const mpz_class p2m = pow_z(sq, um);
    sum_2m += weight * p2m;
    sum_4m += weight * p2m * p2m;
    if (mpq_class(sq) > threshold) exceed += c;
  }
  const mpq_class population(mpz_class(static_cast<unsigned long>(histogram.total)));
  // E[S^{2m}] = sum C^{2m} / (N x^m), E[S^{4m}] = sum C^{4m} / (N x^{2m})
  mpq_class e2m = mpq_class(sum_2m) / (population * pow_q(x, um));
  mpq_class e4m = mpq_class(sum_4m) / (population * pow_q(x, 2 * um));
  e2m.canonicalize();
  e4m.canonicalize();
  const mpq_class y2m = pow_q(y2, um);
  mpq_class proportion = mpq_class(mpz_class(static_cast<unsigned long>(exceed))) / population;
  proportion.canonicalize();

  ProbeReport report;
  report.m = m;
  report.y = y;
  report.empirical_2m = e2m.get_d();
  report.empirical_4m = e4m.get_d();
  report.proportion = proportion.get_d();
  report.numerator_positive = e2m > y2m;
  mpq_class probe = 0;
  if (report.numerator_positive && e4m > 0) {
    const mpq_class gap = e2m - y2m;
    probe = gap * gap / e4m;
    probe.canonicalize();
  }
  report.probe = probe.get_d();
  report.certified = !report.numerator_positive || proportion >= probe;

  const int d = spec.factors() == 1 ? spec.degrees()[0] : spec.max_degree();
  if (d >= 3) {
    report.threshold = std::pow((d - 2) / 8.0, (d - 2) / (2.0 * (d + 1)));
    report.threshold_holds = y <= *report.threshold;
  } else {
    report.note = "degree " + std::to_string(d) + " < 3: the positive-proportion threshold needs d >= 3";
  }
  return report;
}

ProbeReport lower_bound_probe(const EnsembleSpec& spec, const IntervalSpec& interval, double y, int m,
                              const FactorSieve& sieve, unsigned workers) {
  if (!spec.is_full()) throw DomainError("lower_bound_probe: requires full enumeration");
  const auto histogram = collect_histogram(spec, interval, WeightSpec::ones(interval), sieve, workers);
  return probe_from_histogram(histogram, spec, interval, y, m);
}

std::uint64_t max_abs_value(const EnsembleSpec& spec, const IntervalSpec& interval) {
  const auto top = static_cast<unsigned __int128>(interval.hi);
  unsigned __int128 power = 1, sum = 0;
  constexpr unsigned __int128 cap = std::numeric_limits<std::int64_t>::max();
  for (int j = 0; j <= spec.max_degree(); ++j) {
    sum += power;
    if (sum > cap) return static_cast<std::uint64_t>(cap);
    power *= top;
    if (power > cap) power = cap + 1;
  }
  const unsigned __int128 total = sum * static_cast<unsigned __int128>(spec.height());
  return total > cap ? static_cast<std::uint64_t>(cap) : static_cast<std::uint64_t>(total);
}

}  // namespace chowla
