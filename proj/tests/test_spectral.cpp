#include <doctest.h>

#include <random>

#include "lacunary/combinatorics.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/spectral.hpp"
#include "oracle.hpp"

using namespace lacunary;

namespace {

double oracle_lq(const std::vector<std::complex<long double>>& spec, double q) {
  long double acc = 0;
  for (const auto& v : spec) acc += std::pow(std::abs(v), static_cast<long double>(q));
  return static_cast<double>(std::pow(acc / spec.size(), 1.0L / q));
}

CyclicFunction random_function(std::mt19937_64& rng, std::uint64_t p, std::size_t support) {
  CyclicFunction f(p);
  std::uniform_int_distribution<std::uint64_t> j(0, p - 1);
  std::normal_distribution<double> v(0, 1);
  for (std::size_t i = 0; i < support; ++i) f.set(static_cast<std::int64_t>(j(rng)), {v(rng), v(rng)});
  return f;
}

}  // namespace

TEST_CASE("three-point transform by hand") {
  CyclicFunction f(3);
  f.set(0, 1);
  f.set(1, 2);
  const auto r = transform(f, {4});
  REQUIRE(r.spectrum.size() == 3);
  const double h = std::sqrt(3.0);
  // fhat(k) = 1 + 2 w^k, w = exp(-2 pi i / 3)
  CHECK(std::abs(r.spectrum[0] - Complex(3, 0)) < 1e-12);
  CHECK(std::abs(r.spectrum[1] - Complex(0, -h)) < 1e-12);
  CHECK(std::abs(r.spectrum[2] - Complex(0, h)) < 1e-12);
  CHECK(r.norm_vn == doctest::Approx(3).epsilon(1e-12));
  CHECK(r.norm_a == doctest::Approx((3 + 2 * h) / 3).epsilon(1e-12));
  CHECK(r.norm_l2 == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  REQUIRE(r.norm_lq.size() == 1);
  CHECK(r.norm_lq[0].second == doctest::Approx(std::pow((81 + 9 + 9) / 3.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("cyclic function storage") {
  CyclicFunction f(7);
  f.set(-1, 2);
  CHECK(f.at(6) == Complex(2));
  f.set(6, 0);
  CHECK(f.support_size() == 0);
  CHECK_THROWS_AS(CyclicFunction(0), UsageError);
}

TEST_CASE("transforms agree with the oracle, Parseval holds") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint64_t p = std::vector<std::uint64_t>{5, 17, 101, 257, 1009}[trial % 5];
    const auto f = random_function(rng, p, 1 + trial % 12);
    const auto expected = oracle::dft(f.values(), p);
    const auto d = direct_dft(f);
    const auto fast = fast_dft(f);
    for (std::uint64_t k = 0; k < p; ++k) {
      CHECK(std::abs(Complex(d[k]) - Complex(static_cast<double>(expected[k].real()),
                                            static_cast<double>(expected[k].imag()))) < 1e-9);
      CHECK(std::abs(fast[k] - d[k]) < 1e-9);
    }
    double l2 = 0;
    for (const auto& [j, v] : f.values()) l2 += std::norm(v);
    const auto r = transform(f, {3, 7.5});
    CHECK(r.norm_l2 == doctest::Approx(std::sqrt(l2)).epsilon(1e-10));
    CHECK(r.norm_lq[0].second == doctest::Approx(oracle_lq(expected, 3)).epsilon(1e-10));
    CHECK(r.norm_lq[1].second == doctest::Approx(oracle_lq(expected, 7.5)).epsilon(1e-10));
    CHECK(r.norm_a <= r.norm_l2 + 1e-9);
    CHECK(r.norm_l2 <= r.norm_vn + 1e-9);
  }
  CHECK_THROWS_AS(transform(CyclicFunction(1009), {}, 1000), BudgetExceeded);
}

TEST_CASE("kernel coefficients and norms") {
  CHECK(fejer_coefficient(3, 0) == Rational{1, 1});
  CHECK(fejer_coefficient(3, 2) == Rational{2, 3});
  CHECK(fejer_coefficient(3, -3) == Rational{1, 2});
  CHECK(fejer_coefficient(3, 6) == Rational{0, 1});
  CHECK(fejer_coefficient(3, 7) == Rational{0, 1});
  CHECK_THROWS_AS(fejer_kernel(3, 11), UsageError);
  for (unsigned n = 1; n <= 8; ++n) {
    std::uint64_t q = 5;
    for (unsigned k = 1; q <= 4 * n; ++k) q = oracle::admissible_prime(k);
    const auto r = transform(fejer_kernel(n, q));
    CHECK(r.norm_a == doctest::Approx(1).epsilon(1e-12));
    CHECK(r.norm_vn == doctest::Approx(2.0 * n).epsilon(1e-12));
    for (double e : {3.0, 4.0, 6.0, 10.0}) {
      const auto c = kernel_norm_check(n, q, e);
      CHECK(c.holds());
      CHECK(c.q_dual == doctest::Approx(e / (e - 1)));
      CHECK(c.ceiling == doctest::Approx(std::pow(4.0 * n + 1, 1 / e)));
    }
  }
}

TEST_CASE("Hoelder on random pairs") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t p = std::vector<std::uint64_t>{17, 37, 101}[trial % 3];
    const auto f = random_function(rng, p, 1 + trial % 9);
    const auto g = random_function(rng, p, 1 + trial % 5);
    const double q = 2.5 + trial % 7;
    const auto h = holder_check(f, g, q);
    CHECK(h.pairing_consistent);
    CHECK(h.holds);
    CHECK(h.lhs <= h.rhs + 1e-9);
    Complex direct = 0;
    for (const auto& [j, v] : f.values()) direct += v * std::conj(g.at(static_cast<std::int64_t>(j)));
    CHECK(std::abs(h.direct - direct) < 1e-9);
  }
}

TEST_CASE("density bound and the kernel chain") {
  const FactorSubset e(4, 37, {1, 3, 8});
  CHECK(density_lower_bound(e, 8, 4) == doctest::Approx(std::sqrt(3 / (2 * std::pow(33.0, 0.5)))));
  CHECK(density_lower_bound(e, 2, 4) == doctest::Approx(std::sqrt(1 / (2 * std::pow(9.0, 0.5)))));
  const auto c = kernel_chain(e, 8, 4);
  CHECK(c.m == 3);
  CHECK(c.half_m == 1.5);
  CHECK(c.holds());
  CHECK(c.pairing >= c.half_m);
  CHECK(c.holder_rhs <= c.ceiling_rhs + 1e-9);
  CHECK_THROWS_AS(kernel_chain(e, 10, 4), UsageError);
}

TEST_CASE("weak-Sidon witness") {
  CHECK(weak_sidon_witness({0, 1}).n == 1);
  CHECK(weak_sidon_witness({1, 1}).n == 41);
  CHECK(weak_sidon_witness({2, 1}).n == 161);
  const auto w = weak_sidon_witness(parse_rational("1/2"));
  CHECK(w.n == 11);
  CHECK(w.lhs == "121");
  CHECK(w.rhs == "110");
  CHECK(w.holds);
  CHECK_THROWS_AS(weak_sidon_witness({-1, 1}), UsageError);
  CHECK(parse_rational("1.25") == Rational{5, 4});
  CHECK(parse_rational("-3") == Rational{-3, 1});
  CHECK(parse_rational("6/4") == Rational{3, 2});
  CHECK(to_string(Rational{7, 4}) == "7/4");
  CHECK(to_string(Rational{2, 1}) == "2");
  CHECK_THROWS_AS(parse_rational("x"), UsageError);
  CHECK_THROWS_AS(parse_rational("1/0"), UsageError);
}

TEST_CASE("Sidon inequality and Leinert bound on random quasi-independent sets") {
  std::mt19937_64 rng(77);
  int checked = 0;
  while (checked < 200) {
    const std::uint64_t p = std::vector<std::uint64_t>{101, 1009, 10007}[checked % 3];
    const auto g = oracle::random_subset(rng, 1, p - 1, 1 + checked % 12);
    const FactorSubset f(1, p, g);
    const auto x = extract_quasi_independent(f).extracted;
    const auto c = sidon_qi_check(x);
    CHECK(c.holds);
    CHECK(c.norm_vn == doctest::Approx(static_cast<double>(x.size())));
    CHECK(leinert_lower_bound(x) == doctest::Approx(std::sqrt(static_cast<double>(x.size()))));
    ++checked;
  }
  CHECK_THROWS_AS(sidon_qi_check(FactorSubset(3, 17, {1, 2, 3})), UsageError);
  CHECK_THROWS_AS(leinert_lower_bound(FactorSubset(3, 17, {})), UsageError);
}

TEST_CASE("default exponent grid") {
  CHECK(default_q_grid(2) == std::vector<double>{3, 4, 6, 10});
  CHECK(default_q_grid(5) == std::vector<double>{3, 4, 6, 10});
  CHECK(default_q_grid(8) == std::vector<double>{3, 4, 6, 10, 16});
}
