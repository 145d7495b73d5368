#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chowla/circle_method.hpp"
#include "oracles.hpp"

using namespace chowla;

namespace {

// Laplace expansion along the first row of the L x L matrix (m_i^j).
mpz_class cofactor_det(const std::vector<std::vector<mpz_class>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  mpz_class det = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<std::vector<mpz_class>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<mpz_class> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != col) row.push_back(a[r][c]);
      }
      minor.push_back(row);
    }
    const mpz_class term = a[0][col] * cofactor_det(minor);
    det += col % 2 ? -term : term;
  }
  return det;
}

std::int64_t correlation_oracle(int d, const std::vector<std::int64_t>& m, std::int64_t H) {
  std::int64_t total = 0;
  for (const auto& c : oracle::polys(d, H, false)) {
    int product = 1;
    for (auto point : m) product *= oracle::liouville(oracle::poly_value(c, point));
    total += product;
  }
  return total;
}

}  // namespace

TEST_CASE("frequency bounds and grid") {
  CHECK(frequency_bound({1, {2}, 1}) == std::vector<std::int64_t>{7});
  CHECK(frequency_bound({2, {3}, 2}) == std::vector<std::int64_t>{80});
  CHECK(frequency_bound({0, {1}, 1}) == std::vector<std::int64_t>{2});
  CHECK(quadrature_grid({1, {2}, 1}).sizes == std::vector<std::uint64_t>{16});
  CHECK(quadrature_grid({1, {1, 2}, 1}).nodes() == 10 * 16);
  CHECK(exp_sum_bounds({2, {3}, 2}) == std::vector<std::int64_t>{54});
  CHECK_THROWS_AS(frequency_bound({30, {1000}, 1}), OverflowError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(CorrelationSpec({1, {1, 2, 3}, 1}).validate(), DomainError);
  CHECK_THROWS_AS(CorrelationSpec({1, {}, 1}).validate(), DomainError);
  CHECK_THROWS_AS(CorrelationSpec({1, {0}, 1}).validate(), DomainError);
  CHECK_THROWS_AS(CorrelationSpec({1, {1}, 0}).validate(), DomainError);
  CHECK_NOTHROW(CorrelationSpec({1, {2, 2}, 1}).validate());
}

TEST_CASE("correlation sums by enumeration") {
  const auto s = build_sieve(1000);
  CHECK(correlation_sum({1, {2}, 1}, s) == 0);
  for (int d = 0; d <= 2; ++d) {
    for (std::int64_t H : {1, 2}) {
      for (std::vector<std::int64_t> m : {std::vector<std::int64_t>{1}, {3}, {1, 2}, {2, 2}, {1, 3}}) {
        if (static_cast<int>(m.size()) > d + 1) continue;
        const CorrelationSpec spec{d, m, H};
        CHECK(correlation_sum(spec, s) == correlation_oracle(d, m, H));
        CHECK(correlation_sum(spec, s, 4) == correlation_sum(spec, s, 1));
      }
    }
  }
}

TEST_CASE("quadrature reproduces the correlation sum") {
  const auto s = build_sieve(1000);
  CHECK(std::abs(integral_quadrature({1, {2}, 1}, s)) < 1e-6);
  CHECK(std::abs(integral_quadrature({0, {1}, 1}, s) - 2.0) < 1e-9);
  for (const CorrelationSpec& spec : {CorrelationSpec{1, {1, 2}, 1}, CorrelationSpec{1, {2, 2}, 1},
                                     CorrelationSpec{2, {2, 3}, 2}, CorrelationSpec{2, {3}, 2}}) {
    const auto lhs = static_cast<double>(correlation_oracle(spec.degree, spec.points, spec.height));
    const auto rhs = integral_quadrature(spec, s);
    CHECK(std::abs(rhs - lhs) < 1e-6);
    QuadratureOptions twice;
    twice.oversample = 2;
    CHECK(std::abs(integral_quadrature(spec, s, twice) - lhs) < 1e-6);
  }
}

TEST_CASE("quadrature budget") {
  const auto s = build_sieve(1000);
  QuadratureOptions tight;
  tight.budget = 100;
  try {
    integral_quadrature({1, {1, 2}, 1}, s, tight);
    FAIL("budget not enforced");
  } catch (const ResourceError& e) {
    CHECK(e.requested() == 160);
    CHECK(std::string(e.what()).find("160") != std::string::npos);
  }
  tight.force = true;
  CHECK_NOTHROW(integral_quadrature({1, {1, 2}, 1}, s, tight));
}

TEST_CASE("vandermonde determinants") {
  CHECK(vandermonde_det({1, 2, 3}) == 2);
  CHECK(vandermonde_det({1, 2}) == 1);
  CHECK(vandermonde_det({2, 5, 7, 11}) == 6480);
  CHECK_THROWS_AS(vandermonde_det({2, 2}), DomainError);
  for (std::vector<std::int64_t> m : {std::vector<std::int64_t>{3, 1, 4}, {2, 5, 7, 11}, {9, 2, 6, 1, 8}}) {
    std::vector<std::vector<mpz_class>> matrix;
    for (auto point : m) {
      std::vector<mpz_class> row;
      mpz_class p = 1;
      for (std::size_t j = 0; j < m.size(); ++j) {
        row.push_back(p);
        p *= static_cast<long>(point);
      }
      matrix.push_back(row);
    }
    CHECK(vandermonde_det(m) == cofactor_det(matrix));
  }
}

TEST_CASE("power sums and bound reference") {
  // M_0 = 2, M_1 = 1 + 2 = 3
  CHECK(power_sum_product({1, 2}) == 6);
  // M_0 = 3, M_1 = 6, M_2 = 14
  CHECK(power_sum_product({1, 2, 3}) == 3 * 6 * 14);
  CHECK(bound_reference({2, {1, 2}, 2}) == doctest::Approx(32.0));
  CHECK(bound_reference({3, {5}, 2}) == doctest::Approx(125.0 * 16.0));
  CHECK_THROWS_AS(bound_reference({1, {2, 2}, 1}), DomainError);
}

TEST_CASE("verify identity") {
  const auto s = build_sieve(1000);
  const auto r = verify_identity({1, {2}, 1}, s, 1e-6);
  CHECK(r.pass);
  CHECK(r.lhs == 0);
  CHECK(verify_identity({1, {2, 2}, 1}, s, 1e-6).pass);
  const auto strict = verify_identity({2, {2, 3}, 2}, s, 0.0);
  CHECK(strict.pass == (strict.abs_err == 0.0));
}
