#include "chowla/poly_ensemble.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace chowla {

std::int64_t IntPolynomial::norm() const noexcept {
  std::int64_t best = 0;
  for (std::int64_t c : coeffs) best = std::max(best, c < 0 ? -c : c);
  return best;
}

std::int64_t evaluate(std::span<const std::int64_t> coeffs, std::int64_t n) {
  __int128 acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    if (__builtin_mul_overflow(acc, static_cast<__int128>(n), &acc) ||
        __builtin_add_overflow(acc, static_cast<__int128>(*it), &acc)) {
      throw OverflowError("evaluate: intermediate value overflows 128 bits");
    }
  }
  if (acc > kFactorRangeMax || acc < -kFactorRangeMax) {
    throw OverflowError("evaluate: |f(" + std::to_string(n) + ")| exceeds 2^62");
  }
  return static_cast<std::int64_t>(acc);
}

EnsembleSpec::EnsembleSpec(std::vector<int> degrees, std::int64_t height, DegreeMode mode,
                           Sampling sampling)
    : degrees_(std::move(degrees)), height_(height), mode_(mode), sampling_(sampling) {
  if (degrees_.empty()) throw DomainError("EnsembleSpec: at least one degree is required");
  if (height_ < 1) throw DomainError("EnsembleSpec: height must be positive");
  if (height_ > (std::int64_t{1} << 40)) throw DomainError("EnsembleSpec: height too large");
  for (int d : degrees_) {
    if (d < 0) throw DomainError("EnsembleSpec: degrees must be non-negative");
    total_coefficients_ += d + 1;
    max_degree_ = std::max(max_degree_, d);
  }
}

EnsembleSpec EnsembleSpec::with_sampling(Sampling sampling) const {
  return EnsembleSpec(degrees_, height_, mode_, sampling);
}

std::string EnsembleSpec::describe() const {
  std::ostringstream os;
  os << "degrees=";
  for (std::size_t i = 0; i < degrees_.size(); ++i) os << (i ? "," : "") << degrees_[i];
  os << ";height=" << height_ << ";mode=" << (mode_ == DegreeMode::exact ? "exact" : "at_most");
  if (const auto* mc = std::get_if<MonteCarlo>(&sampling_)) {
    os << ";sampling=monte_carlo(" << mc->count << "," << mc->seed << ")";
  } else {
    os << ";sampling=full";
  }
  return os.str();
}

mpz_class ensemble_size(const EnsembleSpec& spec) {
  const mpz_class width = 2 * spec.height() + 1;
  mpz_class total = 1;
  for (int d : spec.degrees()) {
    mpz_class factor;
    mpz_pow_ui(factor.get_mpz_t(), width.get_mpz_t(), static_cast<unsigned long>(d));
    if (spec.mode() == DegreeMode::exact) {
      factor *= 2 * spec.height();
    } else {
      factor *= width;
    }
    total *= factor;
  }
  return total;
}

std::vector<IndexRange> partition(std::uint64_t length, std::size_t shards, std::uint64_t align) {
  if (shards == 0) shards = 1;
  if (align == 0) align = 1;
  const std::uint64_t units = (length + align - 1) / align;
  std::vector<IndexRange> out;
  out.reserve(shards);
  for (std::size_t k = 0; k < shards; ++k) {
    const auto lo = static_cast<std::uint64_t>(static_cast<unsigned __int128>(units) * k / shards);
    const auto hi = static_cast<std::uint64_t>(static_cast<unsigned __int128>(units) * (k + 1) / shards);
    out.push_back({std::min(lo * align, length), std::min(hi * align, length)});
  }
  return out;
}

std::uint64_t EnsembleCursor::checked_size(const EnsembleSpec& spec) {
  const mpz_class size = ensemble_size(spec);
  if (!size.fits_ulong_p() || size > mpz_class(std::numeric_limits<std::int64_t>::max())) {
    throw ResourceError("ensemble size " + size.get_str() + " cannot be enumerated",
                        std::numeric_limits<std::uint64_t>::max());
  }
  return size.get_ui();
}

EnsembleCursor::EnsembleCursor(const EnsembleSpec& spec)
    : EnsembleCursor(spec, IndexRange{0, checked_size(spec)}) {}

EnsembleCursor::EnsembleCursor(const EnsembleSpec& spec, IndexRange range)
    : height_(spec.height()), range_(range), position_(range.first) {
  const std::uint64_t size = checked_size(spec);
  if (range_.last > size || range_.first > range_.last) {
    throw DomainError("EnsembleCursor: range outside the ensemble");
  }
  const bool exact = spec.mode() == DegreeMode::exact;
  current_.resize(spec.factors());
  for (std::size_t f = 0; f < spec.factors(); ++f) {
    const int d = spec.degrees()[f];
    current_[f].coeffs.assign(static_cast<std::size_t>(d) + 1, 0);
    for (int j = 0; j <= d; ++j) {
      const bool leading = exact && j == d;
      radix_.push_back(leading ? 2 * height_ : 2 * height_ + 1);
      leading_nonzero_.push_back(leading);
      slot_factor_.push_back(f);
      slot_coeff_.push_back(static_cast<std::size_t>(j));
    }
  }
  digits_.assign(radix_.size(), 0);
}

std::int64_t EnsembleCursor::value_of(std::size_t slot, std::int64_t digit) const noexcept {
  const std::int64_t v = digit - height_;
  return leading_nonzero_[slot] && v >= 0 ? v + 1 : v;
}

void EnsembleCursor::decode(std::uint64_t index) {
  for (std::size_t slot = radix_.size(); slot-- > 0;) {
    const auto r = static_cast<std::uint64_t>(radix_[slot]);
    digits_[slot] = static_cast<std::int64_t>(index % r);
    index /= r;
    current_[slot_factor_[slot]].coeffs[slot_coeff_[slot]] = value_of(slot, digits_[slot]);
  }
}

bool EnsembleCursor::next(PolyTuple& out) {
  if (position_ >= range_.last) return false;
  if (!started_) {
    decode(position_);
    started_ = true;
  } else {
    for (std::size_t slot = radix_.size(); slot-- > 0;) {
      auto& coeff = current_[slot_factor_[slot]].coeffs[slot_coeff_[slot]];
      if (++digits_[slot] < radix_[slot]) {
        coeff = value_of(slot, digits_[slot]);
        break;
      }
      digits_[slot] = 0;
      coeff = value_of(slot, 0);
    }
  }
  ++position_;
  out = current_;
  return true;
}

std::vector<PolyTuple> enumerate(const EnsembleSpec& spec) {
  std::vector<PolyTuple> out;
  EnsembleCursor cursor(spec);
  PolyTuple t;
  while (cursor.next(t)) out.push_back(t);
  return out;
}

std::uint64_t derive_block_seed(std::uint64_t seed, std::uint64_t block) noexcept {
  // splitmix64 finalizer over a seed/block mix
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (block + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

namespace {
const MonteCarlo& monte_carlo_of(const EnsembleSpec& spec) {
  const auto* mc = std::get_if<MonteCarlo>(&spec.sampling());
  if (!mc) throw DomainError("sample: spec is not a Monte Carlo ensemble");
  return *mc;
}
}  // namespace

SampleCursor::SampleCursor(const EnsembleSpec& spec)
    : SampleCursor(spec, IndexRange{0, monte_carlo_of(spec).count}) {}

SampleCursor::SampleCursor(const EnsembleSpec& spec, IndexRange range)
    : spec_(spec), seed_(monte_carlo_of(spec).seed), range_(range), position_(range.first) {
  if (range_.last > monte_carlo_of(spec).count || range_.first > range_.last) {
    throw DomainError("SampleCursor: range outside the sample count");
  }
  seek_block(position_ / kSampleBlock);
  PolyTuple skip;
  for (std::uint64_t i = position_ % kSampleBlock; i > 0; --i) draw(skip);
}

void SampleCursor::seek_block(std::uint64_t block) { rng_.seed(derive_block_seed(seed_, block)); }

void SampleCursor::draw(PolyTuple& out) {
  const std::int64_t h = spec_.height();
  const auto width = static_cast<std::uint64_t>(2 * h + 1);
  const bool exact = spec_.mode() == DegreeMode::exact;
  out.resize(spec_.factors());
  for (std::size_t f = 0; f < spec_.factors(); ++f) {
    const int d = spec_.degrees()[f];
    auto& coeffs = out[f].coeffs;
    coeffs.resize(static_cast<std::size_t>(d) + 1);
    for (int j = 0; j <= d; ++j) {
      std::int64_t v;
      do {
        v = static_cast<std::int64_t>(uniform_below(rng_, width)) - h;
      } while (exact && j == d && v == 0);
      coeffs[static_cast<std::size_t>(j)] = v;
    }
  }
}

bool SampleCursor::next(PolyTuple& out) {
  if (position_ >= range_.last) return false;
  if (position_ % kSampleBlock == 0) seek_block(position_ / kSampleBlock);
  draw(out);
  ++position_;
  return true;
}

std::vector<PolyTuple> sample(const EnsembleSpec& spec) {
  std::vector<PolyTuple> out;
  SampleCursor cursor(spec);
  PolyTuple t;
  while (cursor.next(t)) out.push_back(t);
  return out;
}

std::uint64_t stream_length(const EnsembleSpec& spec) {
  if (const auto* mc = std::get_if<MonteCarlo>(&spec.sampling())) return mc->count;
  return EnsembleCursor::checked_size(spec);
}

void for_each_tuple(const EnsembleSpec& spec, IndexRange range,
                    const std::function<void(const PolyTuple&)>& visit) {
  PolyTuple t;
  if (spec.is_full()) {
    EnsembleCursor cursor(spec, range);
    while (cursor.next(t)) visit(t);
  } else {
    SampleCursor cursor(spec, range);
    while (cursor.next(t)) visit(t);
  }
}

}  // namespace chowla
