#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infwick/partitions.hpp"
#include "infwick/perms.hpp"
#include "infwick/rational.hpp"

namespace infwick {

// Letters over {identity, transpose}.
enum class Eps : std::uint8_t { Id, T };
using EpsWord = std::vector<Eps>;

// Letters over {plain copy, starred copy} of one base permutation.
using StarWord = std::vector<bool>;

inline constexpr int kCountWordCap = 8;      // concrete admissible counting
inline constexpr int kClassifyWordCap = 12;  // symbolic classification

std::string eps_word_to_string(const EpsWord& e);

// A word of permuted-matrix letters at a common side N. Index tuples run
// cyclically: letter k sits between indices i_k and i_{k+1}, with
// i_{m+1} = i_1.
class WickWord {
 public:
  explicit WickWord(std::vector<EntryPermutation> letters);
  static WickWord from_eps(const EpsWord& e, int n);

  int length() const { return static_cast<int>(letters_.size()); }
  int side() const { return letters_.front().side(); }
  const EntryPermutation& letter(int k) const { return letters_[k - 1]; }

  // Present iff every letter is structurally Identity or Transpose.
  std::optional<EpsWord> as_eps_word() const;

 private:
  std::vector<EntryPermutation> letters_;
};

// Number of index tuples (i_1..i_m) in [N]^m with
//   s_k(i_k, i_{k+1}) = T(s_{p(k)}(i_{p(k)}, i_{p(k)+1}))  for every k.
// Depth-first assignment of i_1..i_m; as soon as one side of a pair's cell
// equation is fully assigned, the other side's indices are forced through
// the inverse permutation, so each pair is resolved once.
long long count_admissible(const PairPartition& p, const WickWord& w);

// Number of partial tuples (i_s, j_s) for s in B that extend to a full
// admissible tuple, obtained by projecting the full enumeration.
long long count_admissible_restricted(const PairPartition& p, const WickWord& w,
                                      const std::vector<int>& b);

// log_N count(B) - |B| + |B^2 restricted to p| / 2 - 1. Undefined (throws)
// when the restricted count is zero.
double exponent_restricted(const PairPartition& p, const WickWord& w, const std::vector<int>& b);

// count / N^(m/2 + 1), exact.
Rational v_pi(const PairPartition& p, const WickWord& w);

// Sum of v_pi over all pairings of [m]; zero for odd m.
Rational expected_trace_exact(const WickWord& w);

enum class PairingClass { Class0 = 0, Class1 = 1, Class2 = 2 };

// Trichotomy of a pairing against an id/transpose word:
//   Class0: non-crossing and every pair matched (contributes 1).
//   Class1: the mismatched pairs form a set B = {i(1)<...<i(2m')} with
//           p(i(s)) = i(m'+s), and the matched pairs are non-crossing among
//           themselves and nest inside the cyclic gaps of B (contribute 1/N).
//   Class2: everything else (contributes O(N^-2)).
// B is forced: a pair may sit inside B only if mismatched and outside it
// only if matched, which collapses the subset search to a single witness.
// Matched pairs crossing the block B are rejected; admitting them would
// misclassify pairings whose exact count is N^(m/2 - 1).
PairingClass classify_pairing(const PairPartition& p, const EpsWord& e);

struct AsymptoticTrace {
  long long phi = 0;        // |Class0 pairings|
  long long phi_prime = 0;  // |Class1 pairings|
};

AsymptoticTrace asymptotic_trace(const EpsWord& e);

// Pairings not ruled out for a word in a generic permuted copy and its
// adjoint: non-crossing with e(k) != e(p(k)) at every point. Everything
// else is o(1/N).
std::vector<PairPartition> null_surviving_pairings(const StarWord& e);

struct PairingContribution {
  PairPartition pairing;
  long long admissible_count = 0;
  Rational v_value;
  std::optional<double> exponent;         // log_N count - (m/2 + 1); empty if count = 0
  std::optional<PairingClass> cls;        // only for pure id/transpose words
};

std::vector<PairingContribution> pairing_contributions(const WickWord& w);

}  // namespace infwick
