#include "lacunary/subset.hpp"

#include <algorithm>

#include "lacunary/errors.hpp"

namespace lacunary {

FactorSubset::FactorSubset(unsigned factor, std::uint64_t order, std::vector<Residue> exponents)
    : factor_(factor), order_(order), exponents_(std::move(exponents)) {
  if (order_ < 2) throw UsageError("factor order must be at least 2");
  std::sort(exponents_.begin(), exponents_.end());
  if (std::adjacent_find(exponents_.begin(), exponents_.end()) != exponents_.end()) {
    throw UsageError("factor subset has duplicate exponents");
  }
  if (!exponents_.empty() && (exponents_.front() == 0 || exponents_.back() >= order_)) {
    throw UsageError("factor subset exponent outside [1, p-1]");
  }
}

bool FactorSubset::contains(Residue e) const noexcept {
  return std::binary_search(exponents_.begin(), exponents_.end(), e);
}

std::vector<Word> FactorSubset::words(const TablePtr& table) const {
  if (!table || table->order(factor_) != order_) throw UsageError("factor subset does not match the table");
  std::vector<Word> out;
  out.reserve(exponents_.size());
  for (Residue e : exponents_) out.push_back(Word::letter(table, factor_, static_cast<std::int64_t>(e)));
  return out;
}

}  // namespace lacunary
