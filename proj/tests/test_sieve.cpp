#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "chowla/sieve.hpp"
#include "oracles.hpp"

using namespace chowla;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("chowla_test_" + name);
}

}  // namespace

TEST_CASE("smallest prime factors up to 10") {
  const auto s = build_sieve(10);
  const std::uint32_t expected[] = {2, 3, 2, 5, 2, 7, 2, 3, 2};
  REQUIRE(s.entries().size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(s.entries()[i] == expected[i]);
  const auto two = build_sieve(2);
  REQUIRE(two.entries().size() == 1);
  CHECK(two.spf(2) == 2);
}

TEST_CASE("sieve limits") {
  CHECK_THROWS_AS(build_sieve(1), DomainError);
  CHECK_THROWS_AS(build_sieve(std::uint64_t{1} << 32), ResourceError);
}

TEST_CASE("liouville small values") {
  const auto s = build_sieve(100);
  CHECK(liouville(0, s) == 0);
  CHECK(liouville(-9, s) == 1);
  CHECK(liouville(12, s) == -1);
  CHECK(liouville(1, s) == 1);
  for (std::int64_t n = -5000; n <= 5000; ++n) CHECK(liouville(n, s) == oracle::liouville(n));
}

TEST_CASE("liouville fallback agrees with trial division") {
  const auto s = build_sieve(1000);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto n = static_cast<std::int64_t>(rng() % 1'000'000'000'000ULL) + 1;
    CHECK(liouville(n, s) == oracle::liouville(n));
    CHECK(liouville_by_factoring(n) == oracle::liouville(n));
  }
  CHECK_THROWS_AS(liouville(kFactorRangeMax + 1, s), RangeError);
  CHECK_THROWS_AS(liouville(-kFactorRangeMax - 1, s), RangeError);
  CHECK(liouville(kFactorRangeMax, s) == 1);  // 2^62
}

TEST_CASE("complete multiplicativity") {
  const auto s = build_sieve(10000);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 3000; ++i) {
    const auto a = static_cast<std::int64_t>(rng() % 2'000'000'000ULL) + 1;
    const auto b = static_cast<std::int64_t>(rng() % 2'000'000'000ULL) + 1;
    CHECK(liouville(a * b, s) == liouville(a, s) * liouville(b, s));
  }
}

TEST_CASE("mobius") {
  const auto s = build_sieve(1000);
  CHECK(mobius(1, s) == 1);
  CHECK(mobius(4, s) == 0);
  CHECK(mobius(6, s) == 1);
  for (std::int64_t n = 1; n <= 3000; ++n) CHECK(mobius(n, s) == oracle::mobius(n));
  CHECK_THROWS_AS(mobius(0, s), DomainError);
}

TEST_CASE("liouville by moebius inversion") {
  const auto s = build_sieve(5000);
  CHECK(liouville_via_inversion(8, s) == -1);
  CHECK(liouville_via_inversion(1, s) == 1);
  CHECK(liouville_via_inversion(36, s) == 1);
  for (std::int64_t n = 1; n <= 5000; ++n) CHECK(liouville_via_inversion(n, s) == oracle::liouville(n));
  CHECK_THROWS_AS(liouville_via_inversion(5001, s), RangeError);
}

TEST_CASE("factorization") {
  CHECK(factor(60) == std::vector<std::uint64_t>{2, 2, 3, 5});
  const std::uint64_t mersenne = (std::uint64_t{1} << 61) - 1;
  CHECK(factor(mersenne) == std::vector<std::uint64_t>{mersenne});
  CHECK_THROWS_AS(factor((std::uint64_t{1} << 62) + 1), RangeError);
  CHECK_THROWS_AS(factor(1), RangeError);
  // semiprime of two 31-bit primes exercises rho
  const std::uint64_t p = 2147483647, q = 2147483629;
  CHECK(factor(p * q) == std::vector<std::uint64_t>{q, p});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t n = rng() % (std::uint64_t{1} << 40) + 2;
    std::uint64_t product = 1;
    for (auto f : factor(n)) {
      CHECK(oracle::is_prime(static_cast<std::int64_t>(f)));
      product *= f;
    }
    CHECK(product == n);
  }
}

TEST_CASE("miller rabin against trial division") {
  for (std::uint64_t n = 0; n < 20000; ++n) CHECK(is_prime_u64(n) == oracle::is_prime(static_cast<std::int64_t>(n)));
  CHECK(is_prime_u64(3215031751ULL) == false);  // strong pseudoprime to 2,3,5,7
  CHECK(is_prime_u64(18446744073709551557ULL));
}

TEST_CASE("summatory liouville and prime count") {
  const auto plain = build_sieve(2000);
  const auto with_sums = build_sieve(2000, true);
  CHECK(with_sums.has_partial_sums());
  std::int64_t running = 0;
  std::uint64_t primes = 0;
  for (std::uint64_t t = 1; t <= 2000; ++t) {
    running += oracle::liouville(static_cast<std::int64_t>(t));
    primes += oracle::is_prime(static_cast<std::int64_t>(t));
    CHECK(plain.summatory_liouville(t) == running);
    CHECK(with_sums.summatory_liouville(t) == running);
  }
  CHECK(plain.prime_count(2, 2000) == primes);
  CHECK(plain.prime_count(10, 20) == 4);
}

TEST_CASE("cache round trip") {
  const auto path = temp_file("cache.bin");
  const auto s = build_sieve(1'000'000);
  save_sieve_cache(s, path);
  CHECK(std::filesystem::file_size(path) == 8 + 8 + 4 * (1'000'000 - 1));
  const auto loaded = load_sieve_cache(path);
  CHECK(loaded.limit() == s.limit());
  CHECK(std::equal(loaded.entries().begin(), loaded.entries().end(), s.entries().begin()));

  const auto minimal = temp_file("minimal.bin");
  save_sieve_cache(build_sieve(2), minimal);
  CHECK(std::filesystem::file_size(minimal) == 20);
  CHECK(load_sieve_cache(minimal).limit() == 2);

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  try {
    load_sieve_cache(path);
    FAIL("corrupted magic accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(path.string()) != std::string::npos);
  }
  std::filesystem::resize_file(minimal, 18);
  CHECK_THROWS_AS(load_sieve_cache(minimal), ValidationError);
  CHECK_THROWS_AS(load_sieve_cache(temp_file("missing.bin")), ValidationError);
  std::filesystem::remove(path);
  std::filesystem::remove(minimal);
}
