#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "chowla/errors.hpp"

namespace chowla {

/// Integer polynomial c_0 + c_1 t + ... + c_d t^d, constant term first.
struct IntPolynomial {
  std::vector<std::int64_t> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  /// Height: max_j |c_j|.
  std::int64_t norm() const noexcept;

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;
};

using PolyTuple = std::vector<IntPolynomial>;

/// Exact f(n). Throws OverflowError when |f(n)| (or a Horner intermediate)
/// leaves the 63-bit budget |v| <= 2^62.
std::int64_t evaluate(std::span<const std::int64_t> coeffs, std::int64_t n);
inline std::int64_t evaluate(const IntPolynomial& f, std::int64_t n) { return evaluate(f.coeffs, n); }

enum class DegreeMode { exact, at_most };

struct FullEnumeration {
  friend bool operator==(const FullEnumeration&, const FullEnumeration&) = default;
};

struct MonteCarlo {
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const MonteCarlo&, const MonteCarlo&) = default;
};

using Sampling = std::variant<FullEnumeration, MonteCarlo>;

/// Degree profile, height bound and sampling plan of a polynomial ensemble.
class EnsembleSpec {
 public:
  EnsembleSpec(std::vector<int> degrees, std::int64_t height, DegreeMode mode = DegreeMode::exact,
               Sampling sampling = FullEnumeration{});

  const std::vector<int>& degrees() const noexcept { return degrees_; }
  std::size_t factors() const noexcept { return degrees_.size(); }
  std::int64_t height() const noexcept { return height_; }
  DegreeMode mode() const noexcept { return mode_; }
  const Sampling& sampling() const noexcept { return sampling_; }
  bool is_full() const noexcept { return std::holds_alternative<FullEnumeration>(sampling_); }

  /// D = sum_i (d_i + 1): the number of coefficients in a tuple.
  int total_coefficients() const noexcept { return total_coefficients_; }
  /// Largest degree in the profile.
  int max_degree() const noexcept { return max_degree_; }

  EnsembleSpec with_sampling(Sampling sampling) const;
  std::string describe() const;

 private:
  std::vector<int> degrees_;
  std::int64_t height_;
  DegreeMode mode_;
  Sampling sampling_;
  int total_coefficients_ = 0;
  int max_degree_ = 0;
};

/// Exact ensemble cardinality, ignoring the sampling plan.
mpz_class ensemble_size(const EnsembleSpec& spec);

/// Half-open range of stream positions.
struct IndexRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  std::uint64_t size() const noexcept { return last - first; }
};

/// Splits [0, length) into `shards` contiguous ranges whose boundaries are
/// multiples of `align` (except the final one).
std::vector<IndexRange> partition(std::uint64_t length, std::size_t shards, std::uint64_t align = 1);

/// Lexicographic enumeration of a full ensemble. Position i of the stream is
/// the mixed-radix decoding of i over the coefficient slots
/// (f_1.c_0, ..., f_1.c_{d_1}, f_2.c_0, ...), last slot varying fastest,
/// each slot running through its admissible values in increasing order.
class EnsembleCursor {
 public:
  EnsembleCursor(const EnsembleSpec& spec, IndexRange range);
  explicit EnsembleCursor(const EnsembleSpec& spec);

  /// Stores the next tuple in `out`; false once the range is exhausted.
  bool next(PolyTuple& out);

  /// Ensemble size as a 64-bit count; ResourceError when it does not fit.
  static std::uint64_t checked_size(const EnsembleSpec& spec);

 private:
  void decode(std::uint64_t index);
  std::int64_t value_of(std::size_t slot, std::int64_t digit) const noexcept;

  std::vector<std::int64_t> radix_;
  std::vector<std::int64_t> digits_;
  std::vector<std::size_t> slot_factor_;
  std::vector<std::size_t> slot_coeff_;
  std::vector<bool> leading_nonzero_;
  std::int64_t height_;
  PolyTuple current_;
  IndexRange range_;
  std::uint64_t position_;
  bool started_ = false;
};

/// All tuples of a small full ensemble, in stream order.
std::vector<PolyTuple> enumerate(const EnsembleSpec& spec);

/// Samples per independently seeded block. Block b of a run with seed s
/// is driven by derive_block_seed(s, b), so the stream does not depend on
/// how positions are split across workers.
inline constexpr std::uint64_t kSampleBlock = 1024;

std::uint64_t derive_block_seed(std::uint64_t seed, std::uint64_t block) noexcept;

/// Monte Carlo stream for spec.sampling() == MonteCarlo{count, seed}:
/// coefficients uniform on [-H, H]; leading coefficients redrawn until
/// nonzero in exact mode.
class SampleCursor {
 public:
  SampleCursor(const EnsembleSpec& spec, IndexRange range);
  explicit SampleCursor(const EnsembleSpec& spec);

  bool next(PolyTuple& out);

 private:
  void seek_block(std::uint64_t block);
  void draw(PolyTuple& out);

  EnsembleSpec spec_;
  std::uint64_t seed_;
  IndexRange range_;
  std::uint64_t position_;
  std::mt19937_64 rng_;
};

std::vector<PolyTuple> sample(const EnsembleSpec& spec);

/// Uniform integer in [0, bound) by rejection; platform independent.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Number of positions in the spec's stream (ensemble size or sample count).
std::uint64_t stream_length(const EnsembleSpec& spec);

/// Visits positions [range.first, range.last) of the spec's stream.
void for_each_tuple(const EnsembleSpec& spec, IndexRange range,
                    const std::function<void(const PolyTuple&)>& visit);

}  // namespace chowla
