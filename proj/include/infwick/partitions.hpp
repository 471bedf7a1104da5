#pragma once

#include <string>
#include <utility>
#include <vector>

namespace infwick {

inline constexpr int kPairEnumerationCap = 12;
inline constexpr int kNcEnumerationCap = 10;

// Perfect matching of [m], stored as a fixed-point-free involution on
// 1-based positions: partner(k) is the point paired with k.
class PairPartition {
 public:
  // partner must satisfy partner[partner[k]-1] == k and partner[k] != k.
  explicit PairPartition(std::vector<int> partner);

  int points() const { return static_cast<int>(partner_.size()); }
  int partner(int k) const;
  const std::vector<int>& partner_array() const { return partner_; }

  // Pairs (k, partner(k)) with k < partner(k), sorted by k.
  std::vector<std::pair<int, int>> pairs() const;

  std::string to_string() const;  // e.g. "(1,2)(3,4)"

  friend bool operator==(const PairPartition&, const PairPartition&) = default;
  friend bool operator<(const PairPartition& a, const PairPartition& b) {
    return a.partner_ < b.partner_;
  }

 private:
  std::vector<int> partner_;
};

// All perfect matchings of [m] in lexicographic order of the partner array.
// Odd m yields the empty list; m above the cap is a size-limit error.
std::vector<PairPartition> enumerate_pair_partitions(int m, int cap = kPairEnumerationCap);

// True iff there are no a < b < c < d with partner(a) = c and partner(b) = d.
bool is_noncrossing(const PairPartition& p);

// Set partition of [n] with no two blocks interleaving. Blocks are kept
// internally sorted and ordered by their least element.
class NcPartition {
 public:
  NcPartition(int n, std::vector<std::vector<int>> blocks);

  int points() const { return n_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int block_of(int k) const { return block_of_[k - 1]; }
  std::string to_string() const;

  friend bool operator==(const NcPartition&, const NcPartition&) = default;

 private:
  int n_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
};

// All non-crossing partitions of [n]; count is Catalan(n). The order is
// lexicographic in the restricted-growth string (block index per position).
std::vector<NcPartition> enumerate_nc(int n, int cap = kNcEnumerationCap);

// Crossing test for a general set partition given as blocks over [n].
bool is_noncrossing_blocks(int n, const std::vector<std::vector<int>>& blocks);

struct PairRestriction {
  // Ordered pairs (k, l) in B x B with partner(k) = l.
  std::vector<std::pair<int, int>> inside;
  // Points k in B whose partner lies outside B.
  std::vector<int> leaving;
};

PairRestriction restrict_pairs(const PairPartition& p, const std::vector<int>& b);

}  // namespace infwick
