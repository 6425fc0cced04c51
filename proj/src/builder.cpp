#include "lacunary/builder.hpp"

#include <algorithm>
#include <future>
#include <limits>

#include "lacunary/errors.hpp"

namespace lacunary {

ResidueSet::ResidueSet(std::uint64_t order) : order_(order) {
  if (order == 0) throw UsageError("residue set order must be positive");
  if (order > kMaxResidueSetOrder) {
    throw BudgetExceeded("factor order " + std::to_string(order) + " exceeds residue-set capacity " +
                         std::to_string(kMaxResidueSetOrder));
  }
  words_.assign((order + 63) / 64, 0);
}

void ResidueSet::insert(Residue r) noexcept {
  std::uint64_t& word = words_[r >> 6];
  const std::uint64_t bit = std::uint64_t{1} << (r & 63U);
  if ((word & bit) == 0) {
    word |= bit;
    ++count_;
  }
}

void ResidueSet::insert_shifted(const ResidueSet& other, Residue shift) {
  const std::uint64_t p = order_;
  other.for_each([&](Residue r) {
    Residue t = r + shift;
    if (t >= p) t -= p;
    insert(t);
  });
}

void ResidueSet::insert_all(const ResidueSet& other) {
  count_ = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    words_[i] |= other.words_[i];
    count_ += static_cast<std::uint64_t>(__builtin_popcountll(words_[i]));
  }
}

std::vector<Residue> ResidueSet::to_vector() const {
  std::vector<Residue> out;
  out.reserve(count_);
  for_each([&](Residue r) { out.push_back(r); });
  return out;
}

std::string to_string(AvoidanceRule rule) { return rule == AvoidanceRule::strict ? "strict" : "sufficient"; }

AvoidanceRule parse_avoidance(const std::string& name) {
  if (name == "strict") return AvoidanceRule::strict;
  if (name == "sufficient") return AvoidanceRule::sufficient;
  throw UsageError("unknown avoidance rule '" + name + "'");
}

ForbiddenStrata::ForbiddenStrata(std::uint64_t order, unsigned s) : order_(order), s_(s) {
  if (s == 0) throw UsageError("s must be >= 1");
  strata_.assign(2 * s + 1, ResidueSet(order));
  strata_[0].insert(0);
  refresh();
}

void ForbiddenStrata::refresh() {
  count_ = 0;
  cumulative_.clear();
  cumulative_.reserve(strata_.size());
  for (std::size_t w = 0; w < strata_.size(); ++w) {
    count_ += strata_[w].count();
    if (w == 0) {
      cumulative_.push_back(strata_[0]);
    } else {
      cumulative_.push_back(cumulative_.back());
      cumulative_.back().insert_all(strata_[w]);
    }
  }
}

ForbiddenStrata ForbiddenStrata::extend(Residue g) const {
  if (g == 0 || g >= order_) throw UsageError("exponent outside [1, p-1]");
  const std::uint64_t p = order_;
  const Residue shifts[5] = {0, g, p - g, (2 * g) % p, (p - (2 * g) % p) % p};
  const unsigned weights[5] = {0, 1, 1, 2, 2};

  ForbiddenStrata next(*this);
  for (unsigned w = 0; w <= max_weight(); ++w) {
    ResidueSet layer(p);
    for (int d = 0; d < 5; ++d) {
      if (weights[d] > w) continue;
      layer.insert_shifted(strata_[w - weights[d]], shifts[d]);
    }
    next.strata_[w] = std::move(layer);
  }
  next.generators_.push_back(g);
  next.refresh();
  return next;
}

std::optional<Residue> choose_next(const ForbiddenStrata& f, Residue pool_bound, const std::set<Residue>& used,
                                   AvoidanceRule rule, std::mt19937_64* rng) {
  const std::uint64_t p = f.order();
  if (pool_bound >= p) throw UsageError("pool bound must be at most p - 1");
  const unsigned top = f.max_weight();
  const unsigned single_limit = rule == AvoidanceRule::strict ? top : top - 1;
  const unsigned double_limit = rule == AvoidanceRule::strict ? top : top - 2;
  const ResidueSet& single = f.up_to(single_limit);
  const ResidueSet& twice = f.up_to(double_limit);

  auto admissible = [&](Residue g) {
    return !used.contains(g) && !single.contains(g) && !twice.contains((2 * g) % p);
  };
  if (rng == nullptr) {
    for (Residue g = 1; g <= pool_bound; ++g) {
      if (admissible(g)) return g;
    }
    return std::nullopt;
  }
  std::vector<Residue> candidates;
  for (Residue g = 1; g <= pool_bound; ++g) {
    if (admissible(g)) candidates.push_back(g);
  }
  if (candidates.empty()) return std::nullopt;
  // Rejection sampling keeps the pick uniform and independent of the
  // standard library's distribution implementation.
  const std::uint64_t size = candidates.size();
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % size;
  std::uint64_t draw = (*rng)();
  while (draw >= limit) draw = (*rng)();
  return candidates[draw % size];
}

FactorBuild build_factor_set(unsigned n, std::uint64_t p, unsigned s, std::uint64_t target, Residue pool,
                             AvoidanceRule rule, std::optional<std::uint64_t> seed) {
  if (s < 2 || s % 2 != 0) throw UsageError("s must be even and >= 2");
  if (pool == 0 || pool >= p) throw UsageError("pool bound must lie in [1, p-1]");

  std::optional<std::mt19937_64> rng;
  if (seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(*seed), static_cast<std::uint32_t>(*seed >> 32), n};
    rng.emplace(seq);
  }

  PNCertificate cert;
  cert.n = n;
  cert.p = p;
  cert.s = s;
  cert.pool_bound = pool;
  cert.target = target;
  cert.avoidance = to_string(rule);

  ForbiddenStrata strata(p, s);
  std::set<Residue> used;
  while (cert.chosen.size() < target) {
    auto g = choose_next(strata, pool, used, rule, rng ? &*rng : nullptr);
    if (!g) break;
    strata = strata.extend(*g);
    used.insert(*g);
    cert.chosen.push_back(*g);
    cert.forbidden_trace.push_back(strata.count());
  }
  cert.achieved = cert.chosen.size();

  FactorBuild out;
  out.set = FactorSubset(n, p, cert.chosen);
  out.feasible = cert.achieved == target;
  out.certificate = std::move(cert);
  return out;
}

std::uint64_t epsilon_count(std::size_t n, unsigned s) {
  // ways[w] = number of eps vectors over the processed coordinates of weight w.
  const unsigned top = 2 * s;
  std::vector<unsigned __int128> ways(top + 1, 0);
  ways[0] = 1;
  const unsigned __int128 cap = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<unsigned __int128> next(top + 1, 0);
    for (unsigned w = 0; w <= top; ++w) {
      next[w] += ways[w];
      if (w >= 1) next[w] += 2 * ways[w - 1];
      if (w >= 2) next[w] += 2 * ways[w - 2];
      if (next[w] > cap) next[w] = cap;
    }
    ways = std::move(next);
  }
  unsigned __int128 total = 0;
  for (unsigned w = 1; w <= top; ++w) total += ways[w];
  return total > cap ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(total);
}

namespace {

constexpr int kEntryOrder[5] = {0, 1, -1, 2, -2};

struct PNSearch {
  const std::vector<Residue>& g;
  std::uint64_t p;
  std::vector<int> eps;
  std::uint64_t examined = 0;

  Residue term(std::size_t j, int e) const {
    if (e == 0) return 0;
    const Residue v = (static_cast<Residue>(e > 0 ? e : -e) * g[j]) % p;
    return e > 0 ? v : (v == 0 ? 0 : p - v);
  }

  // Exact-weight DFS from position j with accumulated sum.
  bool dfs(std::size_t j, unsigned remaining, Residue sum) {
    if (remaining == 0) {
      ++examined;
      if (sum == 0) {
        std::fill(eps.begin() + static_cast<std::ptrdiff_t>(j), eps.end(), 0);
        return true;
      }
      return false;
    }
    if (j == g.size() || remaining > 2 * (g.size() - j)) return false;
    for (int e : kEntryOrder) {
      const unsigned a = static_cast<unsigned>(e < 0 ? -e : e);
      if (a > remaining) continue;
      eps[j] = e;
      Residue next = sum + term(j, e);
      if (next >= p) next -= p;
      if (dfs(j + 1, remaining - a, next)) return true;
    }
    eps[j] = 0;
    return false;
  }
};

}  // namespace

PNVerdict verify_pn_bruteforce(const FactorSubset& set, unsigned s, std::uint64_t budget, unsigned threads) {
  if (s == 0) throw UsageError("s must be >= 1");
  const std::uint64_t total = epsilon_count(set.size(), s);
  if (total > budget) {
    throw BudgetExceeded("verify_pn: " + std::to_string(total) + " epsilon vectors exceed budget " +
                         std::to_string(budget));
  }
  const auto& g = set.exponents();
  const std::uint64_t p = set.order();
  PNVerdict verdict;
  if (g.empty()) return verdict;

  for (unsigned w = 1; w <= 2 * s; ++w) {
    // Branch on the first coordinate; branches run concurrently and the
    // first branch in entry order that finds a violation wins.
    struct Branch {
      bool found = false;
      std::vector<int> eps;
      std::uint64_t examined = 0;
    };
    auto run_branch = [&, w](int e0) {
      Branch b;
      const unsigned a = static_cast<unsigned>(e0 < 0 ? -e0 : e0);
      if (a > w) return b;
      PNSearch search{g, p, std::vector<int>(g.size(), 0)};
      search.eps[0] = e0;
      b.found = search.dfs(1, w - a, search.term(0, e0));
      if (b.found) search.eps[0] = e0;
      b.examined = search.examined;
      b.eps = std::move(search.eps);
      return b;
    };
    std::vector<Branch> branches(5);
    if (threads > 1) {
      std::vector<std::future<Branch>> futures;
      for (int e0 : kEntryOrder) futures.push_back(std::async(std::launch::async, run_branch, e0));
      for (std::size_t i = 0; i < futures.size(); ++i) branches[i] = futures[i].get();
    } else {
      for (std::size_t i = 0; i < 5; ++i) {
        branches[i] = run_branch(kEntryOrder[i]);
        if (branches[i].found) break;
      }
    }
    for (auto& b : branches) verdict.examined += b.examined;
    for (auto& b : branches) {
      if (b.found) {
        verdict.holds = false;
        verdict.witness = std::move(b.eps);
        return verdict;
      }
    }
  }
  return verdict;
}

CountBound count_bound(std::uint64_t n, unsigned s) {
  using u128 = unsigned __int128;
  const u128 cap = std::numeric_limits<std::uint64_t>::max();
  auto binom = [&](std::uint64_t nn, std::uint64_t k) -> u128 {
    if (k > nn) return 0;
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
      r = r * (nn - k + i) / i;  // exact: r*(nn-k+i) is divisible by i
      if (r > cap) throw OverflowError("count_bound: binomial exceeds 64 bits");
    }
    return r;
  };
  CountBound out;
  u128 exact = 0;
  u128 four = 1;
  for (std::uint64_t k = 0; k <= 2ULL * s; ++k) {
    if (k > 0) four *= 4;
    if (four > cap) throw OverflowError("count_bound: 4^k exceeds 64 bits");
    exact += binom(n, k) * four;
    if (exact > cap) throw OverflowError("count_bound: exact count exceeds 64 bits");
  }
  u128 five = 1;
  for (unsigned k = 0; k < 2 * s; ++k) {
    five *= 5;
    if (five > cap) throw OverflowError("count_bound: 5^(2s) exceeds 64 bits");
  }
  const u128 crude = binom(n, 2ULL * s) * five;
  if (crude > cap) throw OverflowError("count_bound: crude bound exceeds 64 bits");
  out.exact = static_cast<std::uint64_t>(exact);
  out.crude = static_cast<std::uint64_t>(crude);
  return out;
}

std::uint64_t SizeRule::at(unsigned n) const {
  switch (kind) {
    case Kind::square:
      return std::uint64_t{n} * n;
    case Kind::linear:
      return n;
    case Kind::constant:
      return value;
  }
  return 0;
}

Profile named_profile(const std::string& name, unsigned s) {
  if (name == "paper") return {name, {SizeRule::Kind::square, 0}, AvoidanceRule::strict};
  if (name == "desk") {
    if (s == 2) return {name, {SizeRule::Kind::linear, 0}, AvoidanceRule::sufficient};
    return {name, {SizeRule::Kind::constant, 6}, AvoidanceRule::sufficient};
  }
  if (name == "tiny") return {name, {SizeRule::Kind::constant, 3}, AvoidanceRule::sufficient};
  throw UsageError("unknown profile '" + name + "'");
}

std::pair<unsigned, unsigned> default_range(const std::string& name, unsigned s) {
  if (name == "paper") return {3, 8};
  if (name == "desk") return s == 2 ? std::pair{8U, 16U} : std::pair{8U, 12U};
  if (name == "tiny") return {4, 8};
  throw UsageError("unknown profile '" + name + "'");
}

std::vector<Word> LacunaryFamily::union_words() const {
  std::vector<Word> out;
  for (const auto& f : factors) {
    auto ws = f.set.words(table);
    out.insert(out.end(), ws.begin(), ws.end());
  }
  return out;
}

std::size_t LacunaryFamily::element_count() const {
  std::size_t total = 0;
  for (const auto& f : factors) total += f.set.size();
  return total;
}

bool LacunaryFamily::operator==(const LacunaryFamily& other) const {
  const bool tables_equal = (table == other.table) || (table && other.table && *table == *other.table);
  return s == other.s && n_min == other.n_min && n_max == other.n_max && profile == other.profile &&
         seed == other.seed && tables_equal && factors == other.factors && n_feasible == other.n_feasible;
}

LacunaryFamily build_family(unsigned s, unsigned n_min, unsigned n_max, const Profile& profile,
                            std::optional<std::uint64_t> seed, unsigned threads) {
  if (s < 2 || s % 2 != 0) throw UsageError("s must be even and >= 2");
  if (n_min == 0) throw UsageError("n range starts at 1");
  LacunaryFamily family;
  family.s = s;
  family.n_min = n_min;
  family.n_max = n_max;
  family.profile = profile;
  family.seed = seed;
  family.table = std::make_shared<const FactorTable>(FactorTable::standard(n_max));
  if (n_min > n_max) return family;

  auto build_one = [&](unsigned n) {
    const std::uint64_t p = family.table->order(n);
    return build_factor_set(n, p, s, profile.size.at(n), pool_bound(n), profile.avoidance, seed);
  };
  std::vector<unsigned> ns;
  for (unsigned n = n_min; n <= n_max; ++n) ns.push_back(n);
  if (threads > 1) {
    std::vector<std::future<FactorBuild>> futures;
    for (unsigned n : ns) futures.push_back(std::async(std::launch::async, build_one, n));
    for (auto& f : futures) family.factors.push_back(f.get());
  } else {
    for (unsigned n : ns) family.factors.push_back(build_one(n));
  }
  for (const auto& f : family.factors) {
    if (f.feasible) {
      family.n_feasible = f.certificate.n;
      break;
    }
  }
  return family;
}

}  // namespace lacunary
