#pragma once

#include <cstdint>
#include <vector>

#include "lacunary/group.hpp"

namespace lacunary {

// A finite subset of one cyclic factor Z_order, stored as sorted distinct
// exponent residues in [1, order - 1].
class FactorSubset {
 public:
  FactorSubset() = default;
  // Sorts and validates; throws UsageError on duplicates or out-of-range
  // exponents.
  FactorSubset(unsigned factor, std::uint64_t order, std::vector<Residue> exponents);

  unsigned factor() const noexcept { return factor_; }
  std::uint64_t order() const noexcept { return order_; }
  const std::vector<Residue>& exponents() const noexcept { return exponents_; }
  std::size_t size() const noexcept { return exponents_.size(); }
  bool empty() const noexcept { return exponents_.empty(); }
  bool contains(Residue e) const noexcept;

  // Elements as single-letter words of `table`.
  std::vector<Word> words(const TablePtr& table) const;

  bool operator==(const FactorSubset&) const = default;

 private:
  unsigned factor_ = 0;
  std::uint64_t order_ = 0;
  std::vector<Residue> exponents_;
};

}  // namespace lacunary
