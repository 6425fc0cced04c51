#pragma once

// Exact Z_s computation, Leinert-condition search and quasi-independence.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/group.hpp"
#include "lacunary/subset.hpp"

namespace lacunary {

enum class ZsStrategy { naive, meet_in_middle };

std::string to_string(ZsStrategy strategy);
ZsStrategy parse_strategy(const std::string& name);

inline constexpr std::uint64_t kDefaultTupleBudget = 200'000'000;
inline constexpr std::size_t kDefaultSampleCount = 4;

struct ZsCertificate {
  unsigned s = 0;
  std::uint64_t ground_size = 0;
  std::uint64_t value = 0;
  Word witness;                                  // an x attaining the sup
  std::vector<std::vector<std::size_t>> samples;  // ground-set indices, lexicographic
  std::string strategy;
  std::uint64_t tuples_examined = 0;

  bool operator==(const ZsCertificate&) const = default;
};

// Z_s(elements) = sup_x #{pairwise-distinct (x_1..x_s) : x_1^-1 x_2 x_3^-1 ... = x}.
// Ties for the sup are broken by the smallest canonical key. Throws
// BudgetExceeded when the tuple count (naive) or join size (meet-in-middle)
// exceeds `budget`.
ZsCertificate z_value(std::span<const Word> elements, unsigned s, std::uint64_t budget = kDefaultTupleBudget,
                      ZsStrategy strategy = ZsStrategy::meet_in_middle, unsigned threads = 1,
                      std::size_t samples = kDefaultSampleCount);

// ((s/2)!)^2 and s!; rejects odd s.
std::pair<std::uint64_t, std::uint64_t> zs_targets(unsigned s);

struct LeinertWitness {
  unsigned s = 0;
  std::vector<std::size_t> indices;  // into the searched element list
  std::vector<Word> tuple;

  bool operator==(const LeinertWitness&) const = default;
};

struct LeinertSearch {
  enum class Outcome { found, none_exhaustive, none_truncated } outcome = Outcome::none_exhaustive;
  std::optional<LeinertWitness> witness;
  std::uint64_t nodes = 0;

  bool operator==(const LeinertSearch&) const = default;
};

std::string to_string(LeinertSearch::Outcome outcome);
LeinertSearch::Outcome parse_leinert_outcome(const std::string& name);

inline constexpr std::uint64_t kDefaultLeinertBudget = 500'000'000;

// Lexicographically first (a_1..a_2s), a_i != a_{i+1}, with
// a_1 a_2^-1 ... a_2s^-1 = e. Stops after `budget` search nodes.
LeinertSearch leinert_violation(std::span<const Word> elements, unsigned s,
                                std::uint64_t budget = kDefaultLeinertBudget);

// Every witness in lexicographic order, up to `limit`. Throws BudgetExceeded
// when `budget` nodes do not suffice.
std::vector<std::vector<std::size_t>> leinert_witnesses(std::span<const Word> elements, unsigned s,
                                                        std::size_t limit,
                                                        std::uint64_t budget = kDefaultLeinertBudget);

// Re-checks adjacency and the alternating product through group-core.
bool validate_leinert_witness(const LeinertWitness& w);

inline constexpr unsigned kDefaultSubsetBudget = 22;

struct QICheck {
  bool independent = true;
  // Two distinct subsets with equal sums (later-enumerated first).
  std::optional<std::pair<std::vector<Residue>, std::vector<Residue>>> collision;
};

// All 2^m subset sums mod p distinct? Throws BudgetExceeded when m > budget.
QICheck is_quasi_independent(const FactorSubset& set, unsigned budget = kDefaultSubsetBudget);

struct QIWitness {
  FactorSubset parent;
  FactorSubset extracted;
  std::string subset_sum_digest;  // FNV-1a 64 over sorted subset sums, hex
  bool maximal = false;
  bool truncated = false;  // subset-sum budget hit mid-sweep

  bool operator==(const QIWitness&) const = default;
};

// Greedy ascending sweep keeping quasi-independence; maximal unless
// truncated.
QIWitness extract_quasi_independent(const FactorSubset& set, unsigned budget = kDefaultSubsetBudget);

// ceil(log_3 n) computed exactly; 0 for n <= 1.
unsigned ceil_log3(std::uint64_t n);

}  // namespace lacunary
