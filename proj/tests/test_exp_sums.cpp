#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chowla/exp_sums.hpp"
#include "oracles.hpp"

using namespace chowla;
using std::numbers::pi;

TEST_CASE("dirichlet kernel values") {
  for (std::int64_t H : {1, 2, 10, 1000}) CHECK(dirichlet_kernel(H, 0.0) == doctest::Approx(2.0 * H + 1));
  CHECK(dirichlet_kernel(2, pi) == doctest::Approx(1.0));
  // 1 + 2(cos 2pi/7 + cos 4pi/7 + cos 6pi/7) = 0
  CHECK(std::abs(dirichlet_kernel(3, 2 * pi / 7) - oracle::dirichlet(3, 2 * pi / 7)) < 1e-12);
  CHECK(std::abs(dirichlet_kernel(3, 2 * pi / 7)) < 1e-12);
  // periodic, even, and stable next to the removable singularity
  CHECK(dirichlet_kernel(5, 0.3 + 8 * pi) == doctest::Approx(dirichlet_kernel(5, 0.3)).epsilon(1e-9));
  CHECK(dirichlet_kernel(5, -0.3) == doctest::Approx(dirichlet_kernel(5, 0.3)));
  CHECK(dirichlet_kernel(7, 1e-9) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(dirichlet_kernel(7, 2 * pi + 1e-10) == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("closed form against direct sum") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const auto H = static_cast<std::int64_t>(rng() % 200) + 1;
    const double a = angle(rng);
    CHECK(std::abs(dirichlet_kernel(H, a) - oracle::dirichlet(H, a)) <= 1e-9 * (2.0 * H + 1));
    CHECK(std::abs(dirichlet_kernel_direct(H, a) - oracle::dirichlet(H, a)) <= 1e-9 * (2.0 * H + 1));
  }
}

TEST_CASE("lambda exponential sums") {
  const auto s = build_sieve(1000);
  for (double a : {0.0, 0.4, -2.0, 3.1}) {
    const auto v = lambda_exp_sum(a, 1, s);
    CHECK(v.real() == doctest::Approx(2 * std::cos(a)));
    CHECK(std::abs(v.imag()) < 1e-12);
  }
  std::int64_t l100 = 0;
  for (int n = 1; n <= 100; ++n) l100 += oracle::liouville(n);
  CHECK(lambda_exp_sum(0.0, 100, s).real() == doctest::Approx(2.0 * l100));
  CHECK(lambda_exp_sum(0.0, 0, s) == std::complex<double>(0.0, 0.0));

  const auto table = lambda_table(800, s);
  REQUIRE(table.size() == 801);
  CHECK(table[0] == 0);
  for (double a : {0.1, 1.7, -2.9}) {
    std::complex<double> direct = 0.0;
    for (int n = -800; n <= 800; ++n) direct += static_cast<double>(oracle::liouville(n)) * std::polar(1.0, n * a);
    CHECK(std::abs(lambda_exp_sum(a, table) - direct) < 1e-9);
    CHECK(std::abs(lambda_exp_sum(a, 800, s) - direct) < 1e-9);
    std::complex<double> one_sided = 0.0;
    for (int n = 1; n <= 800; ++n) one_sided += static_cast<double>(oracle::liouville(n)) * std::polar(1.0, n * a);
    CHECK(std::abs(lambda_exp_sum_one_sided(a, 800, s) - one_sided) < 1e-9);
  }
}

TEST_CASE("sup estimate") {
  const auto s = build_sieve(1000);
  const auto one = sup_estimate(1, 16, s);
  CHECK(one.value == doctest::Approx(1.0));
  CHECK(one.alpha_star == 0.0);
  CHECK(one.grid_points == 16);

  const std::int64_t X = 500;
  const std::uint64_t grid = default_sup_grid(X);
  double best = -1.0, best_alpha = 0.0;
  for (std::uint64_t k = 0; k < grid; ++k) {
    const double a = 2 * pi * static_cast<double>(k) / static_cast<double>(grid);
    std::complex<double> v = 0.0;
    for (int n = 1; n <= X; ++n) v += static_cast<double>(oracle::liouville(n)) * std::polar(1.0, n * a);
    if (std::abs(v) > best + 1e-9) {
      best = std::abs(v);
      best_alpha = a;
    }
  }
  for (unsigned w : {1u, 3u}) {
    const auto est = sup_estimate(X, grid, s, w);
    CHECK(est.value == doctest::Approx(best).epsilon(1e-9));
    CHECK(est.alpha_star == doctest::Approx(best_alpha));
  }
  CHECK(sup_estimate(X, grid, s, 1).value == sup_estimate(X, grid, s, 4).value);
}

TEST_CASE("kernel L1 norm") {
  // dense midpoint oracle for (1/2pi) int |1 + 2 cos a|
  const int n = 400000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += std::abs(1 + 2 * std::cos(-pi + (k + 0.5) * 2 * pi / n));
  const double dense = acc / n;
  CHECK(dense == doctest::Approx(1.436).epsilon(1e-3));
  CHECK(kernel_l1(1, 10000).estimate == doctest::Approx(dense).epsilon(1e-6));
  CHECK(kernel_l1(1, 10000).reference == doctest::Approx(1.0));
  double previous = 0.0;
  for (std::int64_t H : {2, 4, 8, 16, 32}) {
    const double v = kernel_l1(H, 200000).estimate;
    CHECK(v > previous);
    previous = v;
  }
  CHECK_THROWS_AS(kernel_l1(10, 50), DomainError);
}
