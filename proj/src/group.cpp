#include "lacunary/group.hpp"

#include <algorithm>
#include <sstream>

#include "lacunary/errors.hpp"

namespace lacunary {
namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    e >>= 1U;
  }
  return result;
}

Residue normalize(std::int64_t e, std::uint64_t p) {
  const auto pm = static_cast<std::int64_t>(p);
  std::int64_t r = e % pm;
  if (r < 0) r += pm;
  return static_cast<Residue>(r);
}

Residue negate(Residue e, std::uint64_t p) { return e == 0 ? 0 : p - e; }

// acc <- acc * a_factor^exp with acc already reduced.
void push_letter(std::vector<Letter>& acc, const FactorTable& table, unsigned factor, Residue exp) {
  if (exp == 0) return;
  if (!acc.empty() && acc.back().factor == factor) {
    const std::uint64_t p = table.order(factor);
    Residue sum = acc.back().exp + exp;  // both < p < 2^63
    if (sum >= p) sum -= p;
    if (sum == 0) {
      acc.pop_back();
    } else {
      acc.back().exp = sum;
    }
    return;
  }
  acc.push_back({factor, exp});
}

const FactorTable& require_table(const TablePtr& t) {
  if (!t) throw UsageError("word has no factor table");
  return *t;
}

TablePtr common_table(const TablePtr& a, const TablePtr& b) {
  if (!a) return b;
  if (!b) return a;
  if (a != b && !(*a == *b)) throw UsageError("words use different factor tables");
  return a;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++r;
  }
  // These bases are a proven deterministic set below 2^64.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t smallest_admissible_prime(unsigned n) {
  if (n == 0) throw UsageError("factor index must be >= 1");
  if (n > kMaxFactorIndex) {
    throw OverflowError("factor index " + std::to_string(n) + " exceeds supported width (max " +
                        std::to_string(kMaxFactorIndex) + ")");
  }
  std::uint64_t candidate = (std::uint64_t{1} << (n + 1)) + 1;
  while (!is_prime(candidate)) candidate += 2;
  return candidate;
}

FactorTable FactorTable::standard(unsigned n_max) {
  std::vector<FactorEntry> entries;
  entries.reserve(n_max);
  for (unsigned n = 1; n <= n_max; ++n) entries.push_back({n, smallest_admissible_prime(n)});
  return FactorTable(std::move(entries), std::string(kStandardRule));
}

FactorTable::FactorTable(std::vector<FactorEntry> entries, std::string rule)
    : entries_(std::move(entries)), rule_(std::move(rule)) {
  const bool standard = rule_ == kStandardRule;
  std::vector<std::uint64_t> orders;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index == 0) throw UsageError("factor index must be >= 1");
    if (i > 0 && entries_[i - 1].index >= e.index) throw UsageError("factor table entries must be sorted by index");
    if (e.order % 2 == 0 || !is_prime(e.order)) {
      throw UsageError("factor order " + std::to_string(e.order) + " is not an odd prime");
    }
    if (e.order >= (std::uint64_t{1} << 63)) throw OverflowError("factor order exceeds 63 bits");
    if (standard && (e.index > kMaxFactorIndex || e.order <= (std::uint64_t{1} << (e.index + 1)))) {
      throw UsageError("factor order must exceed 2^(n+1) under the standard rule");
    }
    orders.push_back(e.order);
  }
  std::sort(orders.begin(), orders.end());
  if (std::adjacent_find(orders.begin(), orders.end()) != orders.end()) {
    throw UsageError("factor orders must be pairwise distinct");
  }
}

bool FactorTable::contains(unsigned index) const noexcept {
  return std::binary_search(entries_.begin(), entries_.end(), FactorEntry{index, 0},
                            [](const FactorEntry& a, const FactorEntry& b) { return a.index < b.index; });
}

std::uint64_t FactorTable::order(unsigned index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const FactorEntry& e, unsigned i) { return e.index < i; });
  if (it == entries_.end() || it->index != index) {
    throw UsageError("factor " + std::to_string(index) + " is not in the table");
  }
  return it->order;
}

Word Word::letter(TablePtr table, unsigned factor, std::int64_t exp) {
  const RawLetter raw{factor, exp};
  return reduce(std::move(table), std::span<const RawLetter>(&raw, 1));
}

Word reduce(TablePtr table, std::span<const RawLetter> raw) {
  const FactorTable& t = require_table(table);
  Word out(std::move(table));
  for (const auto& r : raw) {
    push_letter(out.letters_, t, r.factor, normalize(r.exp, t.order(r.factor)));
  }
  return out;
}

Word multiply(const Word& a, const Word& b) {
  TablePtr table = common_table(a.table(), b.table());
  Word out(table);
  out.letters_ = a.letters_;
  if (b.letters_.empty()) return out;
  const FactorTable& t = require_table(table);
  for (const auto& l : b.letters_) push_letter(out.letters_, t, l.factor, l.exp);
  return out;
}

Word invert(const Word& a) {
  Word out(a.table());
  out.letters_.reserve(a.letters_.size());
  for (auto it = a.letters_.rbegin(); it != a.letters_.rend(); ++it) {
    out.letters_.push_back({it->factor, negate(it->exp, a.table()->order(it->factor))});
  }
  return out;
}

Word alternating_product(std::span<const Word> tuple, SignConvention convention) {
  if (tuple.empty()) throw UsageError("alternating product of an empty tuple");
  TablePtr table;
  for (const auto& w : tuple) table = common_table(table, w.table());
  WordBuilder builder(require_table(table));
  for (std::size_t i = 0; i < tuple.size(); ++i) builder.append(tuple[i], inverted_at(convention, i));
  return builder.word(table);
}

Word alternating_product(TablePtr table, std::span<const Letter> tuple, SignConvention convention) {
  if (tuple.empty()) throw UsageError("alternating product of an empty tuple");
  WordBuilder builder(require_table(table));
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const auto& l = tuple[i];
    const std::uint64_t p = table->order(l.factor);
    if (l.exp == 0 || l.exp >= p) throw UsageError("letter exponent out of range");
    builder.append_letter(l.factor, inverted_at(convention, i) ? negate(l.exp, p) : l.exp);
  }
  return builder.word(table);
}

namespace {

void append_key(std::string& out, const std::vector<Letter>& letters) {
  out.reserve(out.size() + letters.size() * 12);
  for (const auto& l : letters) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((l.factor >> shift) & 0xFFU));
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((l.exp >> shift) & 0xFFU));
  }
}

}  // namespace

std::string canonical_key(const Word& w) {
  std::string key;
  append_key(key, w.letters());
  return key;
}

void WordBuilder::append(const Word& w, bool inverse) {
  const auto& ls = w.letters();
  if (!inverse) {
    for (const auto& l : ls) push_letter(letters_, *table_, l.factor, l.exp);
    return;
  }
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
    push_letter(letters_, *table_, it->factor, negate(it->exp, table_->order(it->factor)));
  }
}

void WordBuilder::append_letter(unsigned factor, Residue exp) { push_letter(letters_, *table_, factor, exp); }

std::string WordBuilder::key() const {
  std::string key;
  append_key(key, letters_);
  return key;
}

Word WordBuilder::word(TablePtr table) const {
  Word out(std::move(table));
  out.letters_ = letters_;
  return out;
}

std::string to_string(const Word& w) {
  if (is_identity(w)) return "e";
  std::ostringstream os;
  bool first = true;
  for (const auto& l : w.letters()) {
    if (!first) os << ' ';
    os << 'a' << l.factor << '^' << l.exp;
    first = false;
  }
  return os.str();
}

}  // namespace lacunary
