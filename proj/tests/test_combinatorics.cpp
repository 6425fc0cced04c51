#include <doctest.h>

#include <random>

#include "lacunary/combinatorics.hpp"
#include "lacunary/errors.hpp"
#include "oracle.hpp"

using namespace lacunary;

namespace {

TablePtr table_upto(unsigned n) { return std::make_shared<const FactorTable>(FactorTable::standard(n)); }

std::vector<Word> letters(const TablePtr& t, unsigned factor, const std::vector<Residue>& exps) {
  std::vector<Word> out;
  for (Residue e : exps) out.push_back(Word::letter(t, factor, static_cast<std::int64_t>(e)));
  return out;
}

oracle::Orders orders(const TablePtr& t) {
  oracle::Orders o;
  for (const auto& e : t->entries()) o.p[e.index] = e.order;
  return o;
}

std::vector<oracle::OWord> to_oracle(const std::vector<Word>& ws) {
  std::vector<oracle::OWord> out;
  for (const auto& w : ws) {
    oracle::OWord o;
    for (const auto& l : w.letters()) o.push_back({l.factor, static_cast<std::int64_t>(l.exp)});
    out.push_back(o);
  }
  return out;
}

// Random ground set mixing single letters from several factors and a few
// two-letter words.
std::vector<Word> random_ground(std::mt19937_64& rng, const TablePtr& t, std::size_t size) {
  std::set<Word> seen;
  std::uniform_int_distribution<unsigned> f(1, 3);
  std::uniform_int_distribution<std::int64_t> e(1, 10);
  std::bernoulli_distribution two(0.2);
  while (seen.size() < size) {
    std::vector<RawLetter> raw{{f(rng), e(rng)}};
    if (two(rng)) raw.push_back({f(rng), e(rng)});
    const Word w = reduce(t, raw);
    if (!is_identity(w)) seen.insert(w);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

TEST_CASE("z_value small examples") {
  const auto t5 = table_upto(1);
  CHECK(z_value(letters(t5, 1, {1, 2}), 2).value == 1);
  const auto t17 = table_upto(3);
  const auto three = letters(t17, 3, {1, 2, 3});
  const auto z = z_value(three, 2);
  CHECK(z.value == 2);
  CHECK(z.ground_size == 3);
  CHECK(z.samples.size() == 2);
  CHECK(z.strategy == "meet-in-middle");
  CHECK(z_value(letters(t17, 3, {4}), 2).value == 0);
  CHECK(z_value(letters(t17, 3, {1, 2, 3}), 2, kDefaultTupleBudget, ZsStrategy::naive) == z_value(three, 2, kDefaultTupleBudget, ZsStrategy::naive));
}

TEST_CASE("z_value witness samples realise the value") {
  const auto t = table_upto(3);
  const auto e = letters(t, 3, {1, 2, 3, 5, 8});
  for (auto strategy : {ZsStrategy::naive, ZsStrategy::meet_in_middle}) {
    const auto z = z_value(e, 4, kDefaultTupleBudget, strategy, 1, 100);
    CHECK(z.samples.size() == std::min<std::uint64_t>(z.value, 100));
    for (const auto& idx : z.samples) {
      std::vector<Word> tuple;
      for (auto i : idx) tuple.push_back(e[i]);
      CHECK(alternating_product(tuple, SignConvention::start_inverse) == z.witness);
    }
  }
}

TEST_CASE("naive and meet-in-middle agree with the oracle") {
  std::mt19937_64 rng(17);
  const auto t = table_upto(3);
  const auto o = orders(t);
  for (int trial = 0; trial < 50; ++trial) {
    const unsigned s = trial % 3 == 0 ? 4 : 2;
    const auto ground = random_ground(rng, t, s == 4 ? 5 + trial % 4 : 4 + trial % 8);
    const auto naive = z_value(ground, s, kDefaultTupleBudget, ZsStrategy::naive);
    const auto mitm = z_value(ground, s, kDefaultTupleBudget, ZsStrategy::meet_in_middle, 1 + trial % 3);
    CHECK(naive.value == mitm.value);
    CHECK(naive.witness == mitm.witness);
    CHECK(naive.samples == mitm.samples);
    CHECK(naive.value == oracle::zs(to_oracle(ground), s, o));
  }
}

TEST_CASE("translation invariance inside one factor") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = table_upto(5);
    const std::uint64_t p = 67;
    const auto g = oracle::random_subset(rng, 1, 40, 4 + trial % 4);
    const std::uint64_t shift = 1 + trial;
    std::vector<Residue> moved;
    for (auto x : g) moved.push_back((x + shift) % p == 0 ? p : (x + shift) % p);
    if (std::find(moved.begin(), moved.end(), p) != moved.end()) continue;
    for (unsigned s : {2U, 4U}) {
      CHECK(z_value(letters(t, 5, g), s).value == z_value(letters(t, 5, moved), s).value);
    }
  }
}

TEST_CASE("z_value budgets and argument checks") {
  const auto t = table_upto(3);
  const auto e = letters(t, 3, {1, 2, 3, 4, 5});
  CHECK_THROWS_AS(z_value(e, 2, 3), BudgetExceeded);
  CHECK_THROWS_AS(z_value(e, 2, 3, ZsStrategy::naive), BudgetExceeded);
  CHECK(zs_targets(2) == std::pair<std::uint64_t, std::uint64_t>{1, 2});
  CHECK(zs_targets(4) == std::pair<std::uint64_t, std::uint64_t>{4, 24});
  CHECK(zs_targets(6) == std::pair<std::uint64_t, std::uint64_t>{36, 720});
  CHECK_THROWS_AS(zs_targets(3), UsageError);
  CHECK(parse_strategy("mitm") == ZsStrategy::meet_in_middle);
  CHECK_THROWS_AS(parse_strategy("fast"), UsageError);
}

TEST_CASE("Leinert search in a small cyclic group") {
  const auto t = table_upto(3);
  const auto e = letters(t, 3, {1, 2, 3, 4});
  const auto found = leinert_violation(e, 2);
  REQUIRE(found.outcome == LeinertSearch::Outcome::found);
  REQUIRE(found.witness);
  CHECK(found.witness->indices == std::vector<std::size_t>{0, 1, 2, 1});
  CHECK(validate_leinert_witness(*found.witness));

  const auto all = leinert_witnesses(e, 2, 1000);
  CHECK(std::find(all.begin(), all.end(), std::vector<std::size_t>{0, 2, 3, 1}) != all.end());
  CHECK(std::is_sorted(all.begin(), all.end()));

  const auto truncated = leinert_violation(letters(t, 3, {1, 3}), 4, 2);
  CHECK(truncated.outcome == LeinertSearch::Outcome::none_truncated);
  CHECK_THROWS_AS(leinert_witnesses(e, 2, 1000, 3), BudgetExceeded);

  LeinertWitness bad = *found.witness;
  bad.tuple[1] = bad.tuple[0];
  CHECK_FALSE(validate_leinert_witness(bad));
}

TEST_CASE("Leinert search agrees with an unpruned oracle") {
  std::mt19937_64 rng(99);
  const auto t = table_upto(3);
  const auto o = orders(t);
  for (int trial = 0; trial < 60; ++trial) {
    const unsigned s = trial % 4 == 0 ? 3 : 2;
    const auto ground = random_ground(rng, t, s == 3 ? 3 + trial % 2 : 3 + trial % 5);
    const auto search = leinert_violation(ground, s);
    const auto expected = oracle::leinert_first(to_oracle(ground), s, o);
    CHECK((search.outcome == LeinertSearch::Outcome::found) == expected.has_value());
    if (expected) {
      REQUIRE(search.witness);
      CHECK(search.witness->indices == *expected);
    }
  }
}

TEST_CASE("quasi-independence checks") {
  CHECK(is_quasi_independent(FactorSubset(3, 17, {1, 2, 4, 8})).independent);
  const auto c = is_quasi_independent(FactorSubset(1, 13, {1, 4, 8}));
  CHECK_FALSE(c.independent);
  REQUIRE(c.collision);
  CHECK(c.collision->first == std::vector<Residue>{1, 4, 8});
  CHECK(c.collision->second.empty());
  const auto d = is_quasi_independent(FactorSubset(3, 17, {1, 2, 3}));
  REQUIRE(d.collision);
  CHECK(d.collision->first == std::vector<Residue>{3});
  CHECK(d.collision->second == std::vector<Residue>{1, 2});
  CHECK_THROWS_AS(is_quasi_independent(FactorSubset(3, 17, {1, 2, 3}), 2), BudgetExceeded);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::random_subset(rng, 1, 100, 1 + trial % 7);
    CHECK(is_quasi_independent(FactorSubset(1, 101, g)).independent == oracle::quasi_independent(g, 101));
  }
}

TEST_CASE("greedy extraction is maximal and large enough") {
  std::vector<Residue> nine;
  for (Residue x = 1; x <= 9; ++x) nine.push_back(x);
  const auto w = extract_quasi_independent(FactorSubset(1, 1007, nine));
  CHECK(w.extracted.exponents() == std::vector<Residue>{1, 2, 4, 8});
  CHECK(w.maximal);
  CHECK(extract_quasi_independent(FactorSubset(3, 17, {1, 2, 3})).extracted.exponents() ==
        std::vector<Residue>{1, 2});
  CHECK_THROWS_AS(extract_quasi_independent(FactorSubset(3, 17, {})), UsageError);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = oracle::random_subset(rng, 1, 10006, 1 + trial % 81);
    const auto x = extract_quasi_independent(FactorSubset(1, 10007, g));
    REQUIRE_FALSE(x.truncated);
    CHECK(x.extracted.size() >= ceil_log3(g.size()));
    CHECK(oracle::quasi_independent(x.extracted.exponents(), 10007));
    for (auto v : g) {
      if (x.extracted.contains(v)) continue;
      auto bigger = x.extracted.exponents();
      bigger.push_back(v);
      CHECK_FALSE(oracle::quasi_independent(bigger, 10007));
    }
  }
}

TEST_CASE("ceil_log3") {
  CHECK(ceil_log3(0) == 0);
  CHECK(ceil_log3(1) == 0);
  CHECK(ceil_log3(2) == 1);
  CHECK(ceil_log3(3) == 1);
  CHECK(ceil_log3(4) == 2);
  CHECK(ceil_log3(9) == 2);
  CHECK(ceil_log3(10) == 3);
  CHECK(ceil_log3(81) == 4);
  CHECK(ceil_log3(82) == 5);
  CHECK(ceil_log3(UINT64_MAX) == 41);
}
