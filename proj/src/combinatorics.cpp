#include "lacunary/combinatorics.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "lacunary/errors.hpp"

namespace lacunary {
namespace {

using KeyCounts = std::unordered_map<std::string, std::uint64_t>;

TablePtr shared_table(std::span<const Word> elements) {
  TablePtr table;
  for (const auto& w : elements) {
    if (!w.table()) throw UsageError("element has no factor table");
    if (!table) {
      table = w.table();
    } else if (table != w.table() && !(*table == *w.table())) {
      throw UsageError("elements use different factor tables");
    }
  }
  return table;
}

void require_distinct(std::span<const Word> elements) {
  std::vector<std::string> keys;
  keys.reserve(elements.size());
  for (const auto& w : elements) keys.push_back(canonical_key(w));
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw UsageError("elements must be distinct");
}

// m (m-1) ... (m-k+1), saturating.
std::uint64_t falling(std::uint64_t m, unsigned k) {
  if (k > m) return 0;
  unsigned __int128 r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= (m - i);
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

Word word_from_key(const TablePtr& table, const std::string& key) {
  std::vector<RawLetter> raw;
  for (std::size_t off = 0; off + 12 <= key.size(); off += 12) {
    std::uint32_t factor = 0;
    std::uint64_t exp = 0;
    for (int i = 0; i < 4; ++i) factor = (factor << 8) | static_cast<unsigned char>(key[off + i]);
    for (int i = 0; i < 8; ++i) exp = (exp << 8) | static_cast<unsigned char>(key[off + 4 + i]);
    raw.push_back({factor, static_cast<std::int64_t>(exp)});
  }
  return reduce(table, raw);
}

// Visits every injective k-tuple over [0, m) whose first entry is in
// `firsts`, in lexicographic order, with the signed product of
// elements[t_i]^(sign at offset + i). Visitor returns false to stop.
template <class Visit>
void for_each_injective(std::span<const Word> elements, const FactorTable& table, unsigned k, std::size_t offset,
                        SignConvention convention, std::span<const std::size_t> firsts, Visit&& visit) {
  const std::size_t m = elements.size();
  std::vector<WordBuilder> prefix(k + 1, WordBuilder(table));
  std::vector<std::size_t> tuple(k);
  std::vector<char> used(m, 0);
  bool stop = false;
  auto rec = [&](auto&& self, unsigned depth) -> void {
    if (depth == k) {
      if (!visit(std::span<const std::size_t>(tuple), prefix[k])) stop = true;
      return;
    }
    auto step = [&](std::size_t i) {
      used[i] = 1;
      tuple[depth] = i;
      prefix[depth + 1] = prefix[depth];
      prefix[depth + 1].append(elements[i], inverted_at(convention, offset + depth));
      self(self, depth + 1);
      used[i] = 0;
    };
    if (depth == 0) {
      for (std::size_t i : firsts) {
        step(i);
        if (stop) return;
      }
      return;
    }
    for (std::size_t i = 0; i < m && !stop; ++i) {
      if (!used[i]) step(i);
    }
  };
  if (k == 0) {
    visit(std::span<const std::size_t>(tuple), prefix[0]);
    return;
  }
  rec(rec, 0);
}

std::vector<std::vector<std::size_t>> split_firsts(std::size_t m, unsigned threads) {
  const std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(threads, m));
  std::vector<std::vector<std::size_t>> out(t);
  for (std::size_t i = 0; i < m; ++i) out[i % t].push_back(i);
  return out;
}

std::pair<std::string, std::uint64_t> best_of(const KeyCounts& counts) {
  std::pair<std::string, std::uint64_t> best{"", 0};
  bool any = false;
  for (const auto& [key, count] : counts) {
    if (!any || count > best.second || (count == best.second && key < best.first)) {
      best = {key, count};
      any = true;
    }
  }
  return best;
}

bool disjoint(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  for (std::size_t x : a) {
    for (std::size_t y : b) {
      if (x == y) return false;
    }
  }
  return true;
}

struct HalfGroup {
  Word product;
  std::vector<std::vector<std::size_t>> tuples;
};

std::vector<HalfGroup> half_groups(std::span<const Word> elements, const TablePtr& table, unsigned k,
                                   std::size_t offset, std::map<std::string, std::size_t>* index_out) {
  std::vector<std::size_t> all(elements.size());
  std::iota(all.begin(), all.end(), 0);
  std::map<std::string, std::size_t> index;
  std::vector<HalfGroup> groups;
  for_each_injective(elements, *table, k, offset, SignConvention::start_inverse, all,
                     [&](std::span<const std::size_t> t, const WordBuilder& b) {
                       auto [it, inserted] = index.try_emplace(b.key(), groups.size());
                       if (inserted) groups.push_back({b.word(table), {}});
                       groups[it->second].tuples.emplace_back(t.begin(), t.end());
                       return true;
                     });
  if (index_out) *index_out = std::move(index);
  return groups;
}

ZsCertificate z_naive(std::span<const Word> elements, const TablePtr& table, unsigned s, unsigned threads,
                      std::size_t samples) {
  ZsCertificate cert;
  const auto parts = split_firsts(elements.size(), threads);
  auto run = [&](const std::vector<std::size_t>& firsts) {
    KeyCounts counts;
    std::uint64_t seen = 0;
    for_each_injective(elements, *table, s, 0, SignConvention::start_inverse, firsts,
                       [&](std::span<const std::size_t>, const WordBuilder& b) {
                         ++counts[b.key()];
                         ++seen;
                         return true;
                       });
    return std::pair{std::move(counts), seen};
  };
  KeyCounts merged;
  auto absorb = [&](std::pair<KeyCounts, std::uint64_t> part) {
    cert.tuples_examined += part.second;
    if (merged.empty()) {
      merged = std::move(part.first);
      return;
    }
    for (auto& [k, v] : part.first) merged[k] += v;
  };
  if (parts.size() > 1) {
    std::vector<std::future<std::pair<KeyCounts, std::uint64_t>>> futures;
    for (const auto& p : parts) futures.push_back(std::async(std::launch::async, run, std::cref(p)));
    for (auto& f : futures) absorb(f.get());
  } else if (!parts.empty()) {
    absorb(run(parts[0]));
  }
  const auto [best_key, best_count] = best_of(merged);
  cert.value = best_count;
  if (best_count == 0) return cert;
  cert.witness = word_from_key(table, best_key);

  std::vector<std::size_t> all(elements.size());
  std::iota(all.begin(), all.end(), 0);
  for_each_injective(elements, *table, s, 0, SignConvention::start_inverse, all,
                     [&](std::span<const std::size_t> t, const WordBuilder& b) {
                       if (b.key() == best_key) cert.samples.emplace_back(t.begin(), t.end());
                       return cert.samples.size() < samples;
                     });
  return cert;
}

ZsCertificate z_mitm(std::span<const Word> elements, const TablePtr& table, unsigned s, unsigned threads,
                     std::size_t samples) {
  ZsCertificate cert;
  const unsigned left_len = s / 2;
  const unsigned right_len = s - left_len;
  const auto left = half_groups(elements, table, left_len, 0, nullptr);
  std::map<std::string, std::size_t> right_index;
  const auto right = half_groups(elements, table, right_len, left_len, &right_index);

  auto join = [&](std::size_t begin, std::size_t stride) {
    KeyCounts counts;
    std::uint64_t checked = 0;
    WordBuilder b(*table);
    for (std::size_t li = begin; li < left.size(); li += stride) {
      const auto& gl = left[li];
      for (const auto& gr : right) {
        std::uint64_t pairs = 0;
        for (const auto& l : gl.tuples) {
          for (const auto& r : gr.tuples) {
            ++checked;
            if (disjoint(l, r)) ++pairs;
          }
        }
        if (pairs == 0) continue;
        b.clear();
        b.append(gl.product, false);
        b.append(gr.product, false);
        counts[b.key()] += pairs;
      }
    }
    return std::pair{std::move(counts), checked};
  };
  const std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(threads, left.size()));
  KeyCounts merged;
  auto absorb = [&](std::pair<KeyCounts, std::uint64_t> part) {
    cert.tuples_examined += part.second;
    if (merged.empty()) {
      merged = std::move(part.first);
      return;
    }
    for (auto& [k, v] : part.first) merged[k] += v;
  };
  if (t > 1) {
    std::vector<std::future<std::pair<KeyCounts, std::uint64_t>>> futures;
    for (std::size_t i = 0; i < t; ++i) futures.push_back(std::async(std::launch::async, join, i, t));
    for (auto& f : futures) absorb(f.get());
  } else {
    absorb(join(0, 1));
  }
  const auto [best_key, best_count] = best_of(merged);
  cert.value = best_count;
  if (best_count == 0) return cert;
  cert.witness = word_from_key(table, best_key);

  // Recover representations: right half must equal L^-1 x.
  std::vector<std::vector<std::size_t>> reps;
  WordBuilder b(*table);
  for (const auto& gl : left) {
    b.clear();
    b.append(gl.product, true);
    b.append(cert.witness, false);
    auto it = right_index.find(b.key());
    if (it == right_index.end()) continue;
    for (const auto& l : gl.tuples) {
      for (const auto& r : right[it->second].tuples) {
        if (!disjoint(l, r)) continue;
        auto full = l;
        full.insert(full.end(), r.begin(), r.end());
        reps.push_back(std::move(full));
      }
    }
  }
  std::sort(reps.begin(), reps.end());
  if (reps.size() != best_count) throw std::logic_error("meet-in-middle representation recovery mismatch");
  reps.resize(std::min(reps.size(), samples));
  cert.samples = std::move(reps);
  return cert;
}

}  // namespace

std::string to_string(ZsStrategy strategy) {
  return strategy == ZsStrategy::naive ? "naive" : "meet-in-middle";
}

ZsStrategy parse_strategy(const std::string& name) {
  if (name == "naive") return ZsStrategy::naive;
  if (name == "meet-in-middle" || name == "mitm") return ZsStrategy::meet_in_middle;
  throw UsageError("unknown Z_s strategy '" + name + "'");
}

ZsCertificate z_value(std::span<const Word> elements, unsigned s, std::uint64_t budget, ZsStrategy strategy,
                      unsigned threads, std::size_t samples) {
  if (s < 2) throw UsageError("Z_s requires s >= 2");
  require_distinct(elements);
  const std::uint64_t m = elements.size();
  std::uint64_t work = 0;
  if (strategy == ZsStrategy::naive) {
    work = falling(m, s);
  } else {
    const unsigned __int128 join =
        static_cast<unsigned __int128>(falling(m, s / 2)) * falling(m, s - s / 2);
    work = join > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                            : static_cast<std::uint64_t>(join);
  }
  if (work > budget) {
    throw BudgetExceeded("z_value(" + to_string(strategy) + "): " + std::to_string(work) +
                         " tuples exceed budget " + std::to_string(budget));
  }
  ZsCertificate cert;
  if (m >= s) {
    const TablePtr table = shared_table(elements);
    cert = strategy == ZsStrategy::naive ? z_naive(elements, table, s, threads, samples)
                                         : z_mitm(elements, table, s, threads, samples);
  }
  cert.s = s;
  cert.ground_size = m;
  cert.strategy = to_string(strategy);
  return cert;
}

std::pair<std::uint64_t, std::uint64_t> zs_targets(unsigned s) {
  if (s < 2 || s % 2 != 0) throw UsageError("s must be even and >= 2");
  if (s > 20) throw OverflowError("s! exceeds 64 bits");
  std::uint64_t half = 1;
  for (unsigned i = 2; i <= s / 2; ++i) half *= i;
  std::uint64_t full = 1;
  for (unsigned i = 2; i <= s; ++i) full *= i;
  return {half * half, full};
}

std::string to_string(LeinertSearch::Outcome outcome) {
  switch (outcome) {
    case LeinertSearch::Outcome::found:
      return "found";
    case LeinertSearch::Outcome::none_exhaustive:
      return "none-exhaustive";
    case LeinertSearch::Outcome::none_truncated:
      return "none-truncated";
  }
  return "unknown";
}

LeinertSearch::Outcome parse_leinert_outcome(const std::string& name) {
  if (name == "found") return LeinertSearch::Outcome::found;
  if (name == "none-exhaustive") return LeinertSearch::Outcome::none_exhaustive;
  if (name == "none-truncated") return LeinertSearch::Outcome::none_truncated;
  throw FormatError("unknown Leinert outcome '" + name + "'");
}

namespace {

// DFS over adjacent-distinct 2s-tuples with start-plain signs. The last
// entry is forced (a_2s must equal the prefix product), so it is looked up
// instead of enumerated. A prefix too long to cancel is pruned.
class LeinertEngine {
 public:
  LeinertEngine(std::span<const Word> elements, unsigned s, std::uint64_t budget)
      : elements_(elements), len_(2 * s), budget_(budget) {
    if (s == 0) throw UsageError("Leinert search requires s >= 1");
    require_distinct(elements);
    if (!elements.empty()) table_ = shared_table(elements);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      index_.emplace(canonical_key(elements[i]), i);
      max_len_ = std::max(max_len_, elements[i].length());
    }
  }

  // Calls on_witness(tuple) in lexicographic order; it returns false to stop.
  // Returns false when the node budget ran out.
  template <class OnWitness>
  bool run(OnWitness&& on_witness) {
    if (elements_.empty()) return true;
    std::vector<WordBuilder> prefix(len_, WordBuilder(*table_));
    std::vector<std::size_t> tuple(len_);
    bool stop = false;
    bool truncated = false;
    auto rec = [&](auto&& self, unsigned depth) -> void {
      if (++nodes_ > budget_) {
        truncated = stop = true;
        return;
      }
      const WordBuilder& cur = prefix[depth];
      const std::size_t remaining = len_ - depth;
      if (cur.length() > remaining * max_len_) return;
      if (remaining == 1) {
        auto it = index_.find(cur.key());
        if (it == index_.end() || it->second == tuple[depth - 1]) return;
        tuple[depth] = it->second;
        if (!on_witness(std::span<const std::size_t>(tuple))) stop = true;
        return;
      }
      for (std::size_t i = 0; i < elements_.size() && !stop; ++i) {
        if (depth > 0 && i == tuple[depth - 1]) continue;
        tuple[depth] = i;
        prefix[depth + 1] = cur;
        prefix[depth + 1].append(elements_[i], inverted_at(SignConvention::start_plain, depth));
        self(self, depth + 1);
      }
    };
    rec(rec, 0);
    return !truncated;
  }

  std::uint64_t nodes() const noexcept { return nodes_; }
  const TablePtr& table() const noexcept { return table_; }

 private:
  std::span<const Word> elements_;
  std::size_t len_;
  std::uint64_t budget_;
  TablePtr table_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_len_ = 0;
  std::uint64_t nodes_ = 0;
};

}  // namespace

LeinertSearch leinert_violation(std::span<const Word> elements, unsigned s, std::uint64_t budget) {
  LeinertEngine engine(elements, s, budget);
  LeinertSearch result;
  const bool complete = engine.run([&](std::span<const std::size_t> t) {
    LeinertWitness w;
    w.s = s;
    w.indices.assign(t.begin(), t.end());
    for (std::size_t i : t) w.tuple.push_back(elements[i]);
    result.witness = std::move(w);
    return false;
  });
  result.nodes = engine.nodes();
  if (result.witness) {
    result.outcome = LeinertSearch::Outcome::found;
  } else {
    result.outcome = complete ? LeinertSearch::Outcome::none_exhaustive : LeinertSearch::Outcome::none_truncated;
  }
  return result;
}

std::vector<std::vector<std::size_t>> leinert_witnesses(std::span<const Word> elements, unsigned s,
                                                        std::size_t limit, std::uint64_t budget) {
  LeinertEngine engine(elements, s, budget);
  std::vector<std::vector<std::size_t>> out;
  if (limit == 0) return out;
  const bool complete = engine.run([&](std::span<const std::size_t> t) {
    out.emplace_back(t.begin(), t.end());
    return out.size() < limit;
  });
  if (!complete && out.size() < limit) {
    throw BudgetExceeded("leinert_witnesses: node budget " + std::to_string(budget) + " exhausted");
  }
  return out;
}

bool validate_leinert_witness(const LeinertWitness& w) {
  if (w.tuple.size() != 2 * static_cast<std::size_t>(w.s) || w.tuple.empty()) return false;
  for (std::size_t i = 0; i + 1 < w.tuple.size(); ++i) {
    if (w.tuple[i] == w.tuple[i + 1]) return false;
  }
  return is_identity(alternating_product(w.tuple, SignConvention::start_plain));
}

namespace {

std::vector<Residue> subset_of(const std::vector<Residue>& elems, std::uint64_t mask) {
  std::vector<Residue> out;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if ((mask >> i) & 1U) out.push_back(elems[i]);
  }
  return out;
}

std::string fnv1a_hex(const std::vector<Residue>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Residue v : values) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFFU;
      h *= 0x100000001b3ULL;
    }
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xFU];
    h >>= 4;
  }
  return out;
}

Residue add_mod(Residue a, Residue b, std::uint64_t p) {
  Residue r = a + b;  // a, b < p < 2^63
  return r >= p ? r - p : r;
}

}  // namespace

QICheck is_quasi_independent(const FactorSubset& set, unsigned budget) {
  const std::size_t m = set.size();
  if (m > budget || m >= 63) {
    throw BudgetExceeded("is_quasi_independent: 2^" + std::to_string(m) + " subset sums exceed budget 2^" +
                         std::to_string(budget));
  }
  const auto& e = set.exponents();
  const std::uint64_t total = std::uint64_t{1} << m;
  std::vector<std::pair<Residue, std::uint64_t>> sums(total);
  sums[0] = {0, 0};
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    const unsigned low = static_cast<unsigned>(__builtin_ctzll(mask));
    sums[mask] = {add_mod(sums[mask & (mask - 1)].first, e[low], set.order()), mask};
  }
  std::sort(sums.begin(), sums.end());
  // First repeat in enumeration order: the group whose second mask is least.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> first;  // (later, earlier)
  for (std::size_t i = 1; i < sums.size(); ++i) {
    if (sums[i].first != sums[i - 1].first) continue;
    if (i >= 2 && sums[i - 2].first == sums[i].first) continue;  // only the group's second mask
    if (!first || sums[i].second < first->first) first = std::pair{sums[i].second, sums[i - 1].second};
  }
  QICheck out;
  if (first) {
    out.independent = false;
    out.collision = std::pair{subset_of(e, first->first), subset_of(e, first->second)};
  }
  return out;
}

QIWitness extract_quasi_independent(const FactorSubset& set, unsigned budget) {
  if (set.empty()) throw UsageError("extract_quasi_independent requires a nonempty set");
  const std::uint64_t p = set.order();
  std::vector<Residue> sums{0};  // sorted subset sums of the extracted set
  std::vector<Residue> chosen;
  QIWitness w;
  w.parent = set;
  std::vector<Residue> shifted;
  for (Residue x : set.exponents()) {
    bool admissible = true;
    for (Residue t : sums) {
      if (std::binary_search(sums.begin(), sums.end(), add_mod(t, x, p))) {
        admissible = false;
        break;
      }
    }
    if (!admissible) continue;
    if (chosen.size() >= budget) {
      w.truncated = true;
      break;
    }
    chosen.push_back(x);
    shifted.resize(sums.size());
    std::transform(sums.begin(), sums.end(), shifted.begin(), [&](Residue t) { return add_mod(t, x, p); });
    std::sort(shifted.begin(), shifted.end());
    std::vector<Residue> merged;
    merged.reserve(sums.size() * 2);
    std::merge(sums.begin(), sums.end(), shifted.begin(), shifted.end(), std::back_inserter(merged));
    sums = std::move(merged);
  }
  w.extracted = FactorSubset(set.factor(), p, chosen);
  w.subset_sum_digest = fnv1a_hex(sums);
  w.maximal = !w.truncated;
  return w;
}

unsigned ceil_log3(std::uint64_t n) {
  unsigned k = 0;
  unsigned __int128 power = 1;
  while (power < n) {
    power *= 3;
    ++k;
  }
  return k;
}

}  // namespace lacunary
