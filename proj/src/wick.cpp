#include "infwick/wick.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "infwick/errors.hpp"

namespace infwick {

std::string eps_word_to_string(const EpsWord& e) {
  std::string s;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (k) s += ",";
    s += (e[k] == Eps::Id) ? "id" : "t";
  }
  return s;
}

WickWord::WickWord(std::vector<EntryPermutation> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw std::invalid_argument("WickWord: empty word");
  for (const auto& p : letters_) {
    if (p.side() != letters_.front().side()) {
      throw std::invalid_argument("WickWord: letters have mixed N");
    }
  }
}

WickWord WickWord::from_eps(const EpsWord& e, int n) {
  std::vector<EntryPermutation> letters;
  letters.reserve(e.size());
  for (Eps x : e) {
    letters.push_back(x == Eps::Id ? EntryPermutation::identity(n)
                                   : EntryPermutation::transpose(n));
  }
  return WickWord(std::move(letters));
}

std::optional<EpsWord> WickWord::as_eps_word() const {
  EpsWord e;
  e.reserve(letters_.size());
  for (const auto& p : letters_) {
    if (p.kind() == PermKind::Identity) {
      e.push_back(Eps::Id);
    } else if (p.kind() == PermKind::Transpose) {
      e.push_back(Eps::T);
    } else {
      return std::nullopt;
    }
  }
  return e;
}

namespace {

struct PairSide {
  int letter;      // 1-based letter index k; cell is s_k(i_k, i_next)
  int var_a;       // i_k
  int var_b;       // i_{k+1 cyclic}
  int completion;  // depth at which both vars are assigned
};

struct Constraint {
  PairSide left, right;
  int trigger;  // min completion over the two sides
};

struct DfsState {
  const WickWord* word = nullptr;
  int m = 0;
  int n = 0;
  std::vector<Constraint> constraints;
  std::vector<std::vector<int>> triggers_at;  // depth -> constraint indices
  std::vector<int> val;                       // 1-based, 0 = unassigned
  std::vector<int> forced;                    // 1-based, 0 = none
  std::vector<int> undo;                      // forced vars to clear per frame
};

DfsState make_state(const PairPartition& p, const WickWord& w) {
  const int m = w.length();
  if (p.points() != m) throw std::invalid_argument("count_admissible: word/pairing length mismatch");
  if (m > kCountWordCap) {
    throw SizeLimitError("count_admissible: word length " + std::to_string(m) + " exceeds cap " +
                         std::to_string(kCountWordCap));
  }
  DfsState st;
  st.word = &w;
  st.m = m;
  st.n = w.side();
  st.val.assign(m + 1, 0);
  st.forced.assign(m + 1, 0);
  st.triggers_at.assign(m + 1, {});
  const auto mk_side = [m](int k) {
    PairSide s;
    s.letter = k;
    s.var_a = k;
    s.var_b = (k == m) ? 1 : k + 1;
    s.completion = std::max(s.var_a, s.var_b == 1 ? s.var_a : s.var_b);
    return s;
  };
  for (const auto& [k, l] : p.pairs()) {
    Constraint c;
    c.left = mk_side(k);
    c.right = mk_side(l);
    c.trigger = std::min(c.left.completion, c.right.completion);
    st.triggers_at[c.trigger].push_back(static_cast<int>(st.constraints.size()));
    st.constraints.push_back(c);
  }
  return st;
}

// Value of a variable if known at depth d (assigned or forced), else 0.
inline int known_value(const DfsState& st, int var, int depth) {
  if (var <= depth) return st.val[var];
  return st.forced[var];
}

// Applies the forced target t to var; returns false on contradiction.
inline bool impose(DfsState& st, int var, int t, int depth) {
  const int cur = known_value(st, var, depth);
  if (cur != 0) return cur == t;
  st.forced[var] = t;
  st.undo.push_back(var);
  return true;
}

Cell side_cell(const DfsState& st, const PairSide& s, int depth) {
  return st.word->letter(s.letter).apply(known_value(st, s.var_a, depth),
                                         known_value(st, s.var_b, depth));
}

// Resolves one pair at its trigger depth: evaluates the completed side and
// forces (or checks) the other side through the inverse permutation.
bool resolve_constraint(DfsState& st, const Constraint& c, int depth) {
  const bool left_done = c.left.completion <= depth;
  const PairSide& done = left_done ? c.left : c.right;
  const PairSide& other = left_done ? c.right : c.left;
  const Cell image = side_cell(st, done, depth);
  // s_done(cell) = T(s_other(cell')) <=> cell' = s_other^-1(T(image)).
  const Cell target = st.word->letter(other.letter).apply_inverse(image.j, image.i);
  return impose(st, other.var_a, target.i, depth) && impose(st, other.var_b, target.j, depth);
}

template <typename OnSolution>
void dfs(DfsState& st, int depth, OnSolution&& on_solution) {
  if (depth > st.m) {
    on_solution(st.val);
    return;
  }
  const int lo = st.forced[depth] ? st.forced[depth] : 1;
  const int hi = st.forced[depth] ? st.forced[depth] : st.n;
  for (int v = lo; v <= hi; ++v) {
    st.val[depth] = v;
    const std::size_t undo_mark = st.undo.size();
    bool ok = true;
    for (int ci : st.triggers_at[depth]) {
      if (!resolve_constraint(st, st.constraints[ci], depth)) {
        ok = false;
        break;
      }
    }
    if (ok) dfs(st, depth + 1, on_solution);
    while (st.undo.size() > undo_mark) {
      st.forced[st.undo.back()] = 0;
      st.undo.pop_back();
    }
  }
  st.val[depth] = 0;
}

}  // namespace

long long count_admissible(const PairPartition& p, const WickWord& w) {
  DfsState st = make_state(p, w);
  long long count = 0;
  dfs(st, 1, [&count](const std::vector<int>&) { ++count; });
  return count;
}

long long count_admissible_restricted(const PairPartition& p, const WickWord& w,
                                      const std::vector<int>& b) {
  const int m = w.length();
  for (int k : b) {
    if (k < 1 || k > m) throw std::invalid_argument("count_admissible_restricted: B out of range");
  }
  std::vector<int> bs(b);
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  if (bs.empty()) return count_admissible(p, w) > 0 ? 1 : 0;

  DfsState st = make_state(p, w);
  std::set<std::vector<int>> projections;
  std::vector<int> key(2 * bs.size());
  dfs(st, 1, [&](const std::vector<int>& val) {
    for (std::size_t s = 0; s < bs.size(); ++s) {
      key[2 * s] = val[bs[s]];
      key[2 * s + 1] = val[bs[s] == m ? 1 : bs[s] + 1];  // j_s = i_{s+1}
    }
    projections.insert(key);
  });
  return static_cast<long long>(projections.size());
}

double exponent_restricted(const PairPartition& p, const WickWord& w, const std::vector<int>& b) {
  const long long c = count_admissible_restricted(p, w, b);
  if (c == 0) {
    throw UndefinedExponentError("exponent_restricted: empty admissible set");
  }
  std::vector<int> bs(b);
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  const auto restriction = restrict_pairs(p, bs);
  const double b2_pi = static_cast<double>(restriction.inside.size());
  return std::log(static_cast<double>(c)) / std::log(static_cast<double>(w.side())) -
         static_cast<double>(bs.size()) + b2_pi / 2.0 - 1.0;
}

Rational v_pi(const PairPartition& p, const WickWord& w) {
  const long long c = count_admissible(p, w);
  return Rational(c) / Rational(pow_bigint(w.side(), w.length() / 2 + 1));
}

Rational expected_trace_exact(const WickWord& w) {
  if (w.length() % 2 != 0) return Rational(0);
  Rational total = 0;
  for (const auto& p : enumerate_pair_partitions(w.length(), kCountWordCap)) {
    total += v_pi(p, w);
  }
  return total;
}

PairingClass classify_pairing(const PairPartition& p, const EpsWord& e) {
  const int m = p.points();
  if (static_cast<int>(e.size()) != m) {
    throw std::invalid_argument("classify_pairing: word/pairing length mismatch");
  }
  if (m > kClassifyWordCap) {
    throw SizeLimitError("classify_pairing: word length exceeds cap");
  }
  std::vector<int> b;
  std::vector<std::vector<int>> blocks;
  bool all_matched = true;
  for (const auto& [x, y] : p.pairs()) {
    if (e[x - 1] != e[y - 1]) {
      all_matched = false;
      b.push_back(x);
      b.push_back(y);
    } else {
      blocks.push_back({x, y});
    }
  }
  if (all_matched) return is_noncrossing(p) ? PairingClass::Class0 : PairingClass::Class2;

  std::sort(b.begin(), b.end());
  const int half = static_cast<int>(b.size()) / 2;
  for (int s = 0; s < half; ++s) {
    if (p.partner(b[s]) != b[s + half]) return PairingClass::Class2;
  }
  blocks.push_back(b);
  return is_noncrossing_blocks(m, blocks) ? PairingClass::Class1 : PairingClass::Class2;
}

AsymptoticTrace asymptotic_trace(const EpsWord& e) {
  AsymptoticTrace t;
  if (e.empty() || e.size() % 2 != 0) return t;
  if (static_cast<int>(e.size()) > kClassifyWordCap) {
    throw SizeLimitError("asymptotic_trace: word length exceeds cap");
  }
  for (const auto& p : enumerate_pair_partitions(static_cast<int>(e.size()), kClassifyWordCap)) {
    const PairingClass c = classify_pairing(p, e);
    if (c == PairingClass::Class0) ++t.phi;
    if (c == PairingClass::Class1) ++t.phi_prime;
  }
  return t;
}

std::vector<PairPartition> null_surviving_pairings(const StarWord& e) {
  std::vector<PairPartition> out;
  if (e.empty() || e.size() % 2 != 0) return out;
  if (static_cast<int>(e.size()) > kClassifyWordCap) {
    throw SizeLimitError("null_surviving_pairings: word length exceeds cap");
  }
  for (const auto& p : enumerate_pair_partitions(static_cast<int>(e.size()), kClassifyWordCap)) {
    if (!is_noncrossing(p)) continue;
    bool alternating = true;
    for (int k = 1; k <= p.points(); ++k) {
      if (e[k - 1] == e[p.partner(k) - 1]) {
        alternating = false;
        break;
      }
    }
    if (alternating) out.push_back(p);
  }
  return out;
}

std::vector<PairingContribution> pairing_contributions(const WickWord& w) {
  std::vector<PairingContribution> out;
  if (w.length() % 2 != 0) return out;
  const auto eps = w.as_eps_word();
  const Rational denom(pow_bigint(w.side(), w.length() / 2 + 1));
  for (const auto& p : enumerate_pair_partitions(w.length(), kCountWordCap)) {
    PairingContribution pc{p, 0, Rational(0), std::nullopt, std::nullopt};
    pc.admissible_count = count_admissible(p, w);
    pc.v_value = Rational(pc.admissible_count) / denom;
    if (pc.admissible_count > 0) {
      pc.exponent = std::log(static_cast<double>(pc.admissible_count)) /
                        std::log(static_cast<double>(w.side())) -
                    (w.length() / 2.0 + 1.0);
    }
    if (eps) pc.cls = classify_pairing(p, *eps);
    out.push_back(std::move(pc));
  }
  return out;
}

}  // namespace infwick
