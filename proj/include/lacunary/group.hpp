#pragma once

// Exact arithmetic in free products G = *_n Z_{p_n} of cyclic groups of odd
// prime order. Elements are reduced words; a_n is the residue 1 in factor n.

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lacunary {

using Residue = std::uint64_t;

// Largest factor index whose prime still leaves headroom for residue
// addition in 64 bits (p_n < 2^63).
inline constexpr unsigned kMaxFactorIndex = 61;

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

// Least odd prime strictly greater than 2^(n+1). Throws UsageError for n == 0
// and OverflowError for n > kMaxFactorIndex.
std::uint64_t smallest_admissible_prime(unsigned n);

struct FactorEntry {
  unsigned index = 0;
  std::uint64_t order = 0;
  bool operator==(const FactorEntry&) const = default;
};

class FactorTable {
 public:
  static constexpr std::string_view kStandardRule = "smallest-odd-prime-above-2^(n+1)";
  static constexpr std::string_view kExplicitRule = "explicit";

  // Entries n = 1..n_max under the standard rule.
  static FactorTable standard(unsigned n_max);

  // Arbitrary odd primes. Validates primality, oddness, distinctness and
  // strictly increasing indices; enforces p_n > 2^(n+1) when `rule` is the
  // standard rule.
  FactorTable(std::vector<FactorEntry> entries, std::string rule = std::string(kExplicitRule));

  const std::vector<FactorEntry>& entries() const noexcept { return entries_; }
  const std::string& rule() const noexcept { return rule_; }
  bool contains(unsigned index) const noexcept;
  // Throws UsageError when the factor is missing.
  std::uint64_t order(unsigned index) const;

  bool operator==(const FactorTable&) const = default;

 private:
  std::vector<FactorEntry> entries_;
  std::string rule_;
};

using TablePtr = std::shared_ptr<const FactorTable>;

// a_factor^exp with 1 <= exp <= p_factor - 1.
struct Letter {
  unsigned factor = 0;
  Residue exp = 0;
  auto operator<=>(const Letter&) const = default;
};

// Unreduced input letter; exponent is any signed integer.
struct RawLetter {
  unsigned factor = 0;
  std::int64_t exp = 0;
};

// Reduced normal form: adjacent letters lie in different factors. The empty
// word is the identity. Equality compares letters only.
class Word {
 public:
  Word() = default;
  explicit Word(TablePtr table) : table_(std::move(table)) {}

  // Single-letter word a_factor^exp, exp taken mod p.
  static Word letter(TablePtr table, unsigned factor, std::int64_t exp);

  const std::vector<Letter>& letters() const noexcept { return letters_; }
  const TablePtr& table() const noexcept { return table_; }
  std::size_t length() const noexcept { return letters_.size(); }

  bool operator==(const Word& other) const { return letters_ == other.letters_; }
  auto operator<=>(const Word& other) const { return letters_ <=> other.letters_; }

 private:
  friend Word reduce(TablePtr table, std::span<const RawLetter> raw);
  friend Word multiply(const Word& a, const Word& b);
  friend Word invert(const Word& a);
  friend class WordBuilder;

  TablePtr table_;
  std::vector<Letter> letters_;
};

Word reduce(TablePtr table, std::span<const RawLetter> raw);
// Throws UsageError when the operands use different factor tables.
Word multiply(const Word& a, const Word& b);
Word invert(const Word& a);
inline bool is_identity(const Word& a) noexcept { return a.letters().empty(); }

enum class SignConvention {
  start_plain,    // a1 a2^-1 a3 a4^-1 ...
  start_inverse,  // x1^-1 x2 x3^-1 ...
};

// Sign of position i (0-based) under a convention: true means inverted.
constexpr bool inverted_at(SignConvention c, std::size_t i) noexcept {
  return (i % 2 == 0) == (c == SignConvention::start_inverse);
}

Word alternating_product(std::span<const Word> tuple, SignConvention convention);
Word alternating_product(TablePtr table, std::span<const Letter> tuple, SignConvention convention);

// Per letter: factor index as 4-byte big-endian, then exponent as 8-byte
// big-endian. The identity maps to the empty string.
std::string canonical_key(const Word& w);

// Incremental right-multiplication on a letter stack; used by the
// enumeration engines to avoid re-reducing whole tuples.
class WordBuilder {
 public:
  explicit WordBuilder(const FactorTable& table) : table_(&table) {}

  void clear() noexcept { letters_.clear(); }
  // this <- this * w^(inverse ? -1 : 1)
  void append(const Word& w, bool inverse);
  void append_letter(unsigned factor, Residue exp);

  const std::vector<Letter>& letters() const noexcept { return letters_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool is_identity() const noexcept { return letters_.empty(); }
  std::string key() const;
  Word word(TablePtr table) const;

 private:
  const FactorTable* table_;
  std::vector<Letter> letters_;
};

std::string to_string(const Word& w);

}  // namespace lacunary
