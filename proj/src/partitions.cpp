#include "infwick/partitions.hpp"

#include <algorithm>
#include <set>

#include "infwick/errors.hpp"

namespace infwick {

PairPartition::PairPartition(std::vector<int> partner) : partner_(std::move(partner)) {
  const int m = static_cast<int>(partner_.size());
  if (m == 0 || m % 2 != 0) {
    throw std::invalid_argument("PairPartition: point count must be even and positive");
  }
  for (int k = 1; k <= m; ++k) {
    const int p = partner_[k - 1];
    if (p < 1 || p > m) throw std::invalid_argument("PairPartition: partner out of range");
    if (p == k) throw std::invalid_argument("PairPartition: fixed point at " + std::to_string(k));
    if (partner_[p - 1] != k) throw std::invalid_argument("PairPartition: not an involution");
  }
}

int PairPartition::partner(int k) const {
  if (k < 1 || k > points()) throw std::invalid_argument("PairPartition: position out of range");
  return partner_[k - 1];
}

std::vector<std::pair<int, int>> PairPartition::pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(partner_.size() / 2);
  for (int k = 1; k <= points(); ++k) {
    if (partner_[k - 1] > k) out.emplace_back(k, partner_[k - 1]);
  }
  return out;
}

std::string PairPartition::to_string() const {
  std::string s;
  for (const auto& [a, b] : pairs()) {
    s += "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  }
  return s;
}

namespace {

void enumerate_pairings_rec(std::vector<int>& partner, std::vector<bool>& used,
                            std::vector<PairPartition>& out) {
  const int m = static_cast<int>(partner.size());
  int first = -1;
  for (int k = 0; k < m; ++k) {
    if (!used[k]) {
      first = k;
      break;
    }
  }
  if (first < 0) {
    out.emplace_back(partner);
    return;
  }
  used[first] = true;
  // Ascending partner choice for the least open point gives lexicographic
  // order of the resulting partner arrays.
  for (int mate = first + 1; mate < m; ++mate) {
    if (used[mate]) continue;
    used[mate] = true;
    partner[first] = mate + 1;
    partner[mate] = first + 1;
    enumerate_pairings_rec(partner, used, out);
    used[mate] = false;
  }
  used[first] = false;
}

}  // namespace

std::vector<PairPartition> enumerate_pair_partitions(int m, int cap) {
  if (m % 2 != 0 || m <= 0) return {};
  if (m > cap) {
    throw SizeLimitError("enumerate_pair_partitions: m = " + std::to_string(m) +
                         " exceeds cap " + std::to_string(cap));
  }
  std::vector<PairPartition> out;
  std::vector<int> partner(m, 0);
  std::vector<bool> used(m, false);
  enumerate_pairings_rec(partner, used, out);
  return out;
}

bool is_noncrossing(const PairPartition& p) {
  const auto ps = p.pairs();
  for (std::size_t x = 0; x < ps.size(); ++x) {
    for (std::size_t y = x + 1; y < ps.size(); ++y) {
      const auto [a, c] = ps[x];
      const auto [b, d] = ps[y];
      // Pairs interleave iff exactly one endpoint of (b,d) lies inside (a,c).
      const bool b_in = a < b && b < c;
      const bool d_in = a < d && d < c;
      if (b_in != d_in) return false;
    }
  }
  return true;
}

bool is_noncrossing_blocks(int n, const std::vector<std::vector<int>>& blocks) {
  std::vector<int> block_of(n + 1, -1);
  std::vector<int> last(blocks.size(), 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int k : blocks[b]) block_of[k] = static_cast<int>(b);
    last[b] = *std::max_element(blocks[b].begin(), blocks[b].end());
  }
  // Stack scan: a block must close (reach its last element) before any
  // enclosing block is touched again.
  std::vector<int> first(blocks.size(), 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    first[b] = *std::min_element(blocks[b].begin(), blocks[b].end());
  }
  std::vector<int> stack;
  for (int k = 1; k <= n; ++k) {
    const int b = block_of[k];
    if (first[b] == k) {
      stack.push_back(b);
    } else if (stack.empty() || stack.back() != b) {
      return false;
    }
    while (!stack.empty() && last[stack.back()] == k) stack.pop_back();
  }
  return true;
}

NcPartition::NcPartition(int n, std::vector<std::vector<int>> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  if (n_ < 1) throw std::invalid_argument("NcPartition: n must be positive");
  block_of_.assign(n_, -1);
  for (auto& block : blocks_) {
    if (block.empty()) throw std::invalid_argument("NcPartition: empty block");
    std::sort(block.begin(), block.end());
    for (int k : block) {
      if (k < 1 || k > n_) throw std::invalid_argument("NcPartition: index out of range");
      if (block_of_[k - 1] != -1) throw std::invalid_argument("NcPartition: blocks overlap");
      block_of_[k - 1] = 0;  // provisional, rewritten below
    }
  }
  for (int k = 1; k <= n_; ++k) {
    if (block_of_[k - 1] == -1) {
      throw std::invalid_argument("NcPartition: blocks do not cover [n]");
    }
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int k : blocks_[b]) block_of_[k - 1] = static_cast<int>(b);
  }
  if (!is_noncrossing_blocks(n_, blocks_)) {
    throw std::invalid_argument("NcPartition: blocks cross");
  }
}

std::string NcPartition::to_string() const {
  std::string s;
  for (const auto& block : blocks_) {
    s += "{";
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(block[i]);
    }
    s += "}";
  }
  return s;
}

namespace {

// Restricted-growth enumeration with the non-crossing constraint: position k
// may join block b only if no point between b's current last element and k
// belongs to a block opened before b closed over that gap.
void enumerate_nc_rec(int n, int pos, std::vector<int>& rgs, std::vector<int>& block_last,
                      std::vector<std::vector<int>>& blocks, std::vector<NcPartition>& out) {
  if (pos > n) {
    out.emplace_back(n, blocks);
    return;
  }
  const int open = static_cast<int>(blocks.size());
  for (int b = 0; b <= open; ++b) {
    if (b < open) {
      bool crosses = false;
      for (int j = block_last[b] + 1; j < pos; ++j) {
        if (blocks[rgs[j - 1]].front() < block_last[b]) {
          // Joining b would enclose a point of a block that started before
          // b's last element: that block crosses {block_last[b], pos}.
          crosses = true;
          break;
        }
      }
      if (crosses) continue;
      const int saved_last = block_last[b];
      blocks[b].push_back(pos);
      block_last[b] = pos;
      rgs[pos - 1] = b;
      enumerate_nc_rec(n, pos + 1, rgs, block_last, blocks, out);
      blocks[b].pop_back();
      block_last[b] = saved_last;
    } else {
      blocks.push_back({pos});
      block_last.push_back(pos);
      rgs[pos - 1] = b;
      enumerate_nc_rec(n, pos + 1, rgs, block_last, blocks, out);
      blocks.pop_back();
      block_last.pop_back();
    }
  }
}

}  // namespace

std::vector<NcPartition> enumerate_nc(int n, int cap) {
  if (n < 1) throw std::invalid_argument("enumerate_nc: n must be positive");
  if (n > cap) {
    throw SizeLimitError("enumerate_nc: n = " + std::to_string(n) + " exceeds cap " +
                         std::to_string(cap));
  }
  std::vector<NcPartition> out;
  std::vector<int> rgs(n, 0);
  std::vector<int> block_last;
  std::vector<std::vector<int>> blocks;
  enumerate_nc_rec(n, 1, rgs, block_last, blocks, out);
  return out;
}

PairRestriction restrict_pairs(const PairPartition& p, const std::vector<int>& b) {
  const int m = p.points();
  std::set<int> in_b;
  for (int k : b) {
    if (k < 1 || k > m) throw std::invalid_argument("restrict_pairs: index out of range");
    in_b.insert(k);
  }
  PairRestriction r;
  for (int k : in_b) {
    const int mate = p.partner(k);
    if (in_b.count(mate)) {
      r.inside.emplace_back(k, mate);
    } else {
      r.leaving.push_back(k);
    }
  }
  return r;
}

}  // namespace infwick
