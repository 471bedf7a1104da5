#include <doctest.h>

#include <set>

#include "infwick/errors.hpp"
#include "infwick/wick.hpp"

using namespace infwick;

namespace {

// Full N^m scan with no propagation: the independence oracle for the
// counting engine.
long long naive_count(const PairPartition& p, const WickWord& w) {
  const int m = w.length();
  const int n = w.side();
  std::vector<int> idx(m + 1, 1);
  long long count = 0;
  const auto next_of = [m](int k) { return k == m ? 1 : k + 1; };
  for (;;) {
    bool ok = true;
    for (const auto& [k, l] : p.pairs()) {
      const Cell a = w.letter(k).apply(idx[k], idx[next_of(k)]);
      const Cell b = w.letter(l).apply(idx[l], idx[next_of(l)]);
      if (!(a.i == b.j && a.j == b.i)) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
    int d = m;
    while (d >= 1 && idx[d] == n) idx[d--] = 1;
    if (d == 0) break;
    ++idx[d];
  }
  return count;
}

// Literal existential search over subsets of the mismatched pairs; used to
// confirm that the forced-witness classifier loses nothing.
PairingClass classify_by_subset_search(const PairPartition& p, const EpsWord& e) {
  const int m = p.points();
  std::vector<std::pair<int, int>> mismatched, matched;
  for (const auto& pr : p.pairs()) {
    (e[pr.first - 1] != e[pr.second - 1] ? mismatched : matched).push_back(pr);
  }
  if (mismatched.empty() && is_noncrossing(p)) return PairingClass::Class0;
  for (unsigned mask = 1; mask < (1u << mismatched.size()); ++mask) {
    std::vector<int> b;
    std::vector<std::vector<int>> blocks;
    bool outside_matched = true;
    for (std::size_t x = 0; x < mismatched.size(); ++x) {
      if (mask & (1u << x)) {
        b.push_back(mismatched[x].first);
        b.push_back(mismatched[x].second);
      } else {
        outside_matched = false;  // a mismatched pair left outside B
      }
    }
    if (!outside_matched) continue;
    std::sort(b.begin(), b.end());
    const int half = static_cast<int>(b.size()) / 2;
    bool shift = true;
    for (int s = 0; s < half; ++s) shift = shift && p.partner(b[s]) == b[s + half];
    if (!shift) continue;
    for (const auto& pr : matched) blocks.push_back({pr.first, pr.second});
    blocks.push_back(b);
    if (is_noncrossing_blocks(m, blocks)) return PairingClass::Class1;
  }
  return PairingClass::Class2;
}

EpsWord eps_of(unsigned mask, int len) {
  EpsWord e(len);
  for (int k = 0; k < len; ++k) e[k] = (mask >> k) & 1 ? Eps::T : Eps::Id;
  return e;
}

}  // namespace

TEST_CASE("admissible counts on pinned instances") {
  for (int n : {2, 3, 4, 7}) {
    const Rational rn(n);
    CHECK(count_admissible(PairPartition({2, 1}), WickWord::from_eps({Eps::Id, Eps::Id}, n)) ==
          1LL * n * n);
    CHECK(count_admissible(PairPartition({2, 1}), WickWord::from_eps({Eps::Id, Eps::T}, n)) == n);
    CHECK(count_admissible(PairPartition({3, 4, 1, 2}),
                           WickWord::from_eps({Eps::Id, Eps::Id, Eps::Id, Eps::Id}, n)) == n);
    CHECK(v_pi(PairPartition({2, 1}), WickWord::from_eps({Eps::Id, Eps::Id}, n)) == Rational(1));
    CHECK(v_pi(PairPartition({2, 1}), WickWord::from_eps({Eps::Id, Eps::T}, n)) == 1 / rn);
    CHECK(v_pi(PairPartition({3, 4, 1, 2}),
               WickWord::from_eps({Eps::Id, Eps::Id, Eps::Id, Eps::Id}, n)) == 1 / (rn * rn));
  }
}

TEST_CASE("counting engine equals the naive full scan") {
  // Words over {id, t, one fixed explicit draw}, m <= 4, N <= 5.
  for (int n : {2, 3, 5}) {
    const EntryPermutation sigma = sample_uniform(n, 11);
    const std::vector<EntryPermutation> letters{EntryPermutation::identity(n),
                                                EntryPermutation::transpose(n), sigma};
    for (int m : {2, 4}) {
      std::vector<int> choice(m, 0);
      for (;;) {
        std::vector<EntryPermutation> ws;
        for (int k = 0; k < m; ++k) ws.push_back(letters[choice[k]]);
        const WickWord w(std::move(ws));
        for (const auto& p : enumerate_pair_partitions(m)) {
          CHECK(count_admissible(p, w) == naive_count(p, w));
        }
        int d = m - 1;
        while (d >= 0 && choice[d] == 2) choice[d--] = 0;
        if (d < 0) break;
        ++choice[d];
      }
    }
  }
}

TEST_CASE("restricted counts") {
  const int n = 3;
  const PairPartition p({2, 1, 4, 3});
  const WickWord w = WickWord::from_eps({Eps::Id, Eps::T, Eps::Id, Eps::T}, n);

  // B = [m] reproduces the full count.
  CHECK(count_admissible_restricted(p, w, {1, 2, 3, 4}) == count_admissible(p, w));
  // B empty: extendability of the empty tuple.
  CHECK(count_admissible_restricted(p, w, {}) == (count_admissible(p, w) > 0 ? 1 : 0));

  // B = {1,2} against a direct scan over full solutions projected by hand.
  std::set<std::vector<int>> projections;
  for (int i1 = 1; i1 <= n; ++i1)
    for (int i2 = 1; i2 <= n; ++i2)
      for (int i3 = 1; i3 <= n; ++i3)
        for (int i4 = 1; i4 <= n; ++i4) {
          const auto cell = [&](int k, int a, int b) { return w.letter(k).apply(a, b); };
          const Cell c1 = cell(1, i1, i2), c2 = cell(2, i2, i3);
          const Cell c3 = cell(3, i3, i4), c4 = cell(4, i4, i1);
          if (c1.i == c2.j && c1.j == c2.i && c3.i == c4.j && c3.j == c4.i) {
            projections.insert({i1, i2, i2, i3});
          }
        }
  CHECK(count_admissible_restricted(p, w, {1, 2}) ==
        static_cast<long long>(projections.size()));

  CHECK_THROWS_AS(count_admissible_restricted(p, w, {0}), std::invalid_argument);
}

TEST_CASE("restricted exponent") {
  const int n = 4;
  const PairPartition p({2, 1});
  const WickWord w = WickWord::from_eps({Eps::Id, Eps::T}, n);
  // Full-set consistency with the unrestricted exponent.
  CHECK(exponent_restricted(p, w, {1, 2}) == doctest::Approx(-1.0));
  // Singleton: count N, |B^2| = 0.
  CHECK(exponent_restricted(p, w, {1}) == doctest::Approx(-1.0));

  // a(B) >= a on an exhaustive scan of nonempty subsets at m = 4, N = 3.
  const WickWord w4 = WickWord::from_eps({Eps::Id, Eps::T, Eps::T, Eps::Id}, 3);
  for (const auto& pr : enumerate_pair_partitions(4)) {
    if (count_admissible(pr, w4) == 0) continue;
    const double a_full = exponent_restricted(pr, w4, {1, 2, 3, 4});
    for (unsigned mask = 1; mask < 16; ++mask) {
      std::vector<int> b;
      for (int k = 0; k < 4; ++k) {
        if (mask & (1u << k)) b.push_back(k + 1);
      }
      CHECK(exponent_restricted(pr, w4, b) >= a_full - 1e-9);
    }
  }

  // Zero count leaves the exponent undefined. This table sends both diagonal
  // cells off the diagonal and swaps the off-diagonal cells with diagonal
  // ones, so s(c) = T(s(T(c))) fails everywhere.
  const EntryPermutation sw = EntryPermutation::explicit_table(2, {1, 0, 3, 2});
  const WickWord wz(std::vector<EntryPermutation>{sw, sw});
  REQUIRE(count_admissible(PairPartition({2, 1}), wz) == 0);
  CHECK_THROWS_AS(exponent_restricted(PairPartition({2, 1}), wz, {1}),
                  UndefinedExponentError);
}

TEST_CASE("exact traces of pinned words") {
  for (int n = 2; n <= 8; ++n) {
    const Rational rn(n);
    CHECK(expected_trace_exact(WickWord::from_eps({Eps::Id, Eps::Id}, n)) == Rational(1));
    CHECK(expected_trace_exact(WickWord::from_eps({Eps::Id, Eps::Id, Eps::Id, Eps::Id}, n)) ==
          Rational(2) + 1 / (rn * rn));
    CHECK(expected_trace_exact(WickWord::from_eps({Eps::Id, Eps::T}, n)) == 1 / rn);
    CHECK(expected_trace_exact(WickWord::from_eps({Eps::Id, Eps::Id, Eps::T, Eps::T}, n)) ==
          Rational(1) + 1 / rn + 1 / (rn * rn));
  }
  CHECK(expected_trace_exact(WickWord::from_eps({Eps::Id, Eps::T, Eps::Id}, 5)) == Rational(0));
}

TEST_CASE("word construction errors") {
  CHECK_THROWS_AS(WickWord(std::vector<EntryPermutation>{}), std::invalid_argument);
  CHECK_THROWS_AS(WickWord(std::vector<EntryPermutation>{EntryPermutation::identity(2),
                                                          EntryPermutation::identity(3)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(count_admissible(PairPartition({2, 1, 4, 3}),
                                   WickWord::from_eps({Eps::Id, Eps::Id}, 3)),
                  std::invalid_argument);
  EpsWord too_long(10, Eps::Id);
  CHECK_THROWS_AS(count_admissible(PairPartition(std::vector<int>{2, 1, 4, 3, 6, 5, 8, 7, 10, 9}),
                                   WickWord::from_eps(too_long, 2)),
                  SizeLimitError);
}

TEST_CASE("pairing classification on pinned words") {
  CHECK(classify_pairing(PairPartition({3, 4, 1, 2}), {Eps::Id, Eps::T, Eps::Id, Eps::T}) ==
        PairingClass::Class2);
  CHECK(classify_pairing(PairPartition({3, 4, 1, 2}), {Eps::Id, Eps::Id, Eps::T, Eps::T}) ==
        PairingClass::Class1);
  CHECK(classify_pairing(PairPartition({2, 1, 4, 3}), {Eps::Id, Eps::Id, Eps::T, Eps::T}) ==
        PairingClass::Class0);
  // A matched pair interleaving the mismatched block stays in class 2: its
  // exact contribution is N^-2, not N^-1.
  CHECK(classify_pairing(PairPartition({3, 4, 1, 2}), {Eps::Id, Eps::T, Eps::T, Eps::T}) ==
        PairingClass::Class2);
  CHECK(classify_pairing(PairPartition({4, 3, 2, 1}), {Eps::Id, Eps::T, Eps::T, Eps::T}) ==
        PairingClass::Class1);
}

TEST_CASE("classifier agrees with the existential subset search") {
  for (int m : {2, 4, 6, 8}) {
    const auto pairings = enumerate_pair_partitions(m);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      const EpsWord e = eps_of(mask, m);
      for (const auto& p : pairings) {
        CHECK(classify_pairing(p, e) == classify_by_subset_search(p, e));
      }
    }
  }
}

TEST_CASE("classification matches exact contributions at small sizes") {
  for (int m : {2, 4, 6}) {
    const auto pairings = enumerate_pair_partitions(m);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      const EpsWord e = eps_of(mask, m);
      for (const auto& p : pairings) {
        const PairingClass c = classify_pairing(p, e);
        for (int n : {4, 5, 6}) {
          const Rational v = v_pi(p, WickWord::from_eps(e, n));
          const Rational rn(n);
          switch (c) {
            case PairingClass::Class0:
              CHECK(v == Rational(1));
              break;
            case PairingClass::Class1:
              CHECK(v == 1 / rn);
              break;
            case PairingClass::Class2:
              CHECK(v <= 1 / (rn * rn));
              break;
          }
        }
      }
    }
  }
}

TEST_CASE("asymptotic trace") {
  CHECK(asymptotic_trace({Eps::Id, Eps::T}).phi == 0);
  CHECK(asymptotic_trace({Eps::Id, Eps::T}).phi_prime == 1);
  CHECK(asymptotic_trace({Eps::Id, Eps::Id, Eps::T, Eps::T}).phi == 1);
  CHECK(asymptotic_trace({Eps::Id, Eps::Id, Eps::T, Eps::T}).phi_prime == 1);
  CHECK(asymptotic_trace({Eps::Id, Eps::Id, Eps::Id, Eps::Id}).phi == 2);
  CHECK(asymptotic_trace({Eps::Id, Eps::Id, Eps::Id, Eps::Id}).phi_prime == 0);
  CHECK(asymptotic_trace({Eps::Id, Eps::T, Eps::Id}).phi == 0);
  CHECK(asymptotic_trace({Eps::Id, Eps::T, Eps::Id}).phi_prime == 0);
}

TEST_CASE("null prediction for generic permuted copies") {
  CHECK(null_surviving_pairings({false, true}).size() == 1);
  CHECK(null_surviving_pairings({false, true}).front() == PairPartition({2, 1}));
  CHECK(null_surviving_pairings({false, false}).empty());
  CHECK(null_surviving_pairings({false, true, false, true}).size() == 2);
  CHECK(null_surviving_pairings({false, true, true, false}).size() == 1);
  CHECK(null_surviving_pairings({false, false, true, true}).size() == 1);
}

TEST_CASE("pairing contributions table") {
  const auto rows = pairing_contributions(WickWord::from_eps({Eps::Id, Eps::Id, Eps::T, Eps::T}, 4));
  REQUIRE(rows.size() == 3);
  Rational total = 0;
  for (const auto& r : rows) total += r.v_value;
  CHECK(total == Rational(1) + Rational(1, 4) + Rational(1, 16));
  CHECK(rows[0].cls == PairingClass::Class0);
  CHECK(rows[1].cls == PairingClass::Class1);
  CHECK(rows[2].cls == PairingClass::Class2);
  CHECK(rows[0].exponent == doctest::Approx(0.0));
  CHECK(rows[1].exponent == doctest::Approx(-1.0));
}
