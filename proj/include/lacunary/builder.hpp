#pragma once

// Greedy construction of the factor sets E_n with property (P_N): no
// nontrivial combination sum_j eps_j g_j, eps_j in {0,+-1,+-2},
// sum_j |eps_j| <= 2s, vanishes mod p.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lacunary/group.hpp"
#include "lacunary/subset.hpp"

namespace lacunary {

// Residues mod p above this bound are refused by ResidueSet.
inline constexpr std::uint64_t kMaxResidueSetOrder = std::uint64_t{1} << 26;

// Dense bitset over Z_p.
class ResidueSet {
 public:
  ResidueSet() = default;
  explicit ResidueSet(std::uint64_t order);

  std::uint64_t order() const noexcept { return order_; }
  std::uint64_t count() const noexcept { return count_; }
  bool contains(Residue r) const noexcept { return (words_[r >> 6] >> (r & 63U)) & 1U; }
  void insert(Residue r) noexcept;
  // this |= { r + shift mod p : r in other }
  void insert_shifted(const ResidueSet& other, Residue shift);
  void insert_all(const ResidueSet& other);
  std::vector<Residue> to_vector() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const unsigned bit = static_cast<unsigned>(__builtin_ctzll(bits));
        f(static_cast<Residue>(w * 64 + bit));
        bits &= bits - 1;
      }
    }
  }

  bool operator==(const ResidueSet&) const = default;

 private:
  std::uint64_t order_ = 0;
  std::uint64_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class AvoidanceRule {
  // Avoid every product of weight <= 2s, for both g and g^2.
  strict,
  // Avoid weight <= 2s-1 for g and <= 2s-2 for g^2; the least that keeps
  // (P_{N+1}).
  sufficient,
};

std::string to_string(AvoidanceRule rule);
AvoidanceRule parse_avoidance(const std::string& name);

// strata[w] = { sum_j eps_j g_j mod p : weight(eps) = w } for the exponents
// added so far, w in [0, 2s]. Immutable; extend() returns a new value.
class ForbiddenStrata {
 public:
  ForbiddenStrata(std::uint64_t order, unsigned s);

  std::uint64_t order() const noexcept { return order_; }
  unsigned s() const noexcept { return s_; }
  unsigned max_weight() const noexcept { return 2 * s_; }
  const ResidueSet& stratum(unsigned w) const { return strata_.at(w); }
  // Union of strata[0..w].
  const ResidueSet& up_to(unsigned w) const { return cumulative_.at(w); }
  // Total residues across strata (counted per stratum).
  std::uint64_t count() const noexcept { return count_; }
  const std::vector<Residue>& generators() const noexcept { return generators_; }

  ForbiddenStrata extend(Residue g) const;

 private:
  void refresh();

  std::uint64_t order_;
  unsigned s_;
  std::vector<ResidueSet> strata_;
  std::vector<ResidueSet> cumulative_;
  std::uint64_t count_ = 0;
  std::vector<Residue> generators_;
};

inline ForbiddenStrata strata_extend(const ForbiddenStrata& f, Residue g) { return f.extend(g); }

// Smallest (or, given rng, uniformly random) unused g in [1, pool_bound]
// admissible under `rule`; nullopt when the pool is exhausted.
std::optional<Residue> choose_next(const ForbiddenStrata& f, Residue pool_bound, const std::set<Residue>& used,
                                   AvoidanceRule rule, std::mt19937_64* rng = nullptr);

struct PNCertificate {
  unsigned n = 0;
  std::uint64_t p = 0;
  unsigned s = 0;
  std::vector<Residue> chosen;  // in selection order
  Residue pool_bound = 0;
  std::uint64_t target = 0;
  std::uint64_t achieved = 0;
  // ForbiddenStrata::count() after each selection.
  std::vector<std::uint64_t> forbidden_trace;
  std::string avoidance;

  bool operator==(const PNCertificate&) const = default;
};

struct FactorBuild {
  FactorSubset set;
  PNCertificate certificate;
  bool feasible = false;  // target met

  bool operator==(const FactorBuild&) const = default;
};

FactorBuild build_factor_set(unsigned n, std::uint64_t p, unsigned s, std::uint64_t target, Residue pool_bound,
                             AvoidanceRule rule, std::optional<std::uint64_t> seed = std::nullopt);

struct PNVerdict {
  bool holds = true;
  // Violating eps aligned with the sorted exponents of the checked set.
  std::optional<std::vector<int>> witness;
  std::uint64_t examined = 0;
};

// Number of eps in {0,+-1,+-2}^N with 0 < weight <= 2s. Saturates at
// UINT64_MAX.
std::uint64_t epsilon_count(std::size_t n, unsigned s);

inline constexpr std::uint64_t kDefaultEpsilonBudget = 50'000'000;

// Exhaustive check of (P) by weight, then lexicographically (entry order
// 0, 1, -1, 2, -2). Throws BudgetExceeded when epsilon_count exceeds budget.
PNVerdict verify_pn_bruteforce(const FactorSubset& set, unsigned s,
                               std::uint64_t budget = kDefaultEpsilonBudget, unsigned threads = 1);

struct CountBound {
  std::uint64_t exact = 0;  // sum_{k<=2s} C(N,k) 4^k
  std::uint64_t crude = 0;  // C(N,2s) 5^(2s)
};

// Throws OverflowError when either value leaves 64 bits.
CountBound count_bound(std::uint64_t n, unsigned s);

struct SizeRule {
  enum class Kind { square, linear, constant } kind = Kind::linear;
  std::uint64_t value = 0;  // constant size
  std::uint64_t at(unsigned n) const;
  bool operator==(const SizeRule&) const = default;
};

// Only the power-of-two pool B_n = 2^n is supported.
struct Profile {
  std::string name;
  SizeRule size;
  AvoidanceRule avoidance = AvoidanceRule::strict;
  bool operator==(const Profile&) const = default;
};

// "paper": n^2, strict avoidance. "desk": n for s = 2 and 6 otherwise,
// sufficient avoidance. "tiny": 3, sufficient avoidance.
Profile named_profile(const std::string& name, unsigned s);
// Default n range for a named profile.
std::pair<unsigned, unsigned> default_range(const std::string& name, unsigned s);

inline Residue pool_bound(unsigned n) { return Residue{1} << n; }

struct LacunaryFamily {
  unsigned s = 2;
  unsigned n_min = 1;
  unsigned n_max = 0;
  Profile profile;
  std::optional<std::uint64_t> seed;
  TablePtr table;
  std::vector<FactorBuild> factors;  // ascending n
  std::optional<unsigned> n_feasible;

  // All stored elements as words, ascending n then exponent.
  std::vector<Word> union_words() const;
  std::size_t element_count() const;
  bool operator==(const LacunaryFamily& other) const;
};

LacunaryFamily build_family(unsigned s, unsigned n_min, unsigned n_max, const Profile& profile,
                            std::optional<std::uint64_t> seed = std::nullopt, unsigned threads = 1);

}  // namespace lacunary
