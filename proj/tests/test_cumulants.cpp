#include <doctest.h>

#include <map>

#include <nlohmann/json.hpp>

#include "infwick/cumulants.hpp"
#include "infwick/errors.hpp"
#include "infwick/prng.hpp"

using namespace infwick;

namespace {

const std::vector<LetterLabel> kGT{{"G", 0}, {"GT", 1}};

std::vector<Word> words_up_to(std::size_t alphabet, int max_len) {
  std::vector<Word> out;
  std::vector<Word> layer{Word{}};
  for (int d = 1; d <= max_len; ++d) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (std::size_t a = 0; a < alphabet; ++a) {
        Word x = w;
        x.push_back(static_cast<int>(a));
        next.push_back(std::move(x));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

EpsWord word_to_eps(const Word& w) {
  EpsWord e(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) e[k] = w[k] ? Eps::T : Eps::Id;
  return e;
}

// The limit tables of a Gaussian copy and its transpose.
CumulantTable transpose_tables(int degree) {
  CumulantTable t(kGT, degree);
  for (const auto& w : words_up_to(2, degree)) {
    const EpsWord e = word_to_eps(w);
    t.set(w, Rational(w.size() == 2 && e[0] == e[1] ? 1 : 0),
          Rational(predicted_transpose_cumulant(e)));
  }
  return t;
}

Rational random_rational(Prng& g) {
  const long long num = static_cast<long long>(g.below(19)) - 9;
  const long long den = static_cast<long long>(g.below(9)) + 1;
  return Rational(num, den);
}

}  // namespace

TEST_CASE("eval_f_pi block products") {
  const auto ones = [](const Word&) { return Rational(1); };
  CHECK(eval_f_pi(ones, NcPartition(2, {{1, 2}}), Word{0, 0}) == Rational(1));

  // Pair tables of the transpose pair: matched pairs carry 1, mixed carry 0.
  const auto pair_table = [](const Word& w) {
    return Rational(w.size() == 2 && w[0] == w[1] ? 1 : 0);
  };
  const Word w{0, 0, 1, 1};
  CHECK(eval_f_pi(pair_table, NcPartition(4, {{1, 2}, {3, 4}}), w) == Rational(1));
  CHECK(eval_f_pi(pair_table, NcPartition(4, {{1, 4}, {2, 3}}), w) == Rational(0));
  CHECK_THROWS_AS(eval_f_pi(ones, NcPartition(2, {{1, 2}}), Word{0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("eval_partial_f_pi one-block-primed sums") {
  const auto f = [](const Word& w) { return Rational(w.size() == 2 && w[0] == w[1] ? 1 : 0); };
  const auto fp = [](const Word& w) { return Rational(w.size() == 2 && w[0] != w[1] ? 1 : 0); };
  CHECK(eval_partial_f_pi(f, fp, NcPartition(2, {{1, 2}}), Word{0, 1}) == Rational(1));
  // Two mixed pairs: each term has a vanishing unprimed factor.
  CHECK(eval_partial_f_pi(f, fp, NcPartition(4, {{1, 2}, {3, 4}}), Word{0, 1, 0, 1}) ==
        Rational(0));
  const auto zero = [](const Word&) { return Rational(0); };
  CHECK(eval_partial_f_pi(f, zero, NcPartition(4, {{1, 2}, {3, 4}}), Word{0, 1, 0, 1}) ==
        Rational(0));
}

TEST_CASE("partial evaluation is the first-order coefficient of the block product") {
  // Oracle: expand prod_V (f(w|V) + t f'(w|V)) as a polynomial in t by
  // direct convolution and read off the linear coefficient.
  Prng g(2024);
  std::map<Word, Rational> f_vals, fp_vals;
  const auto f = [&](const Word& w) {
    auto it = f_vals.find(w);
    if (it == f_vals.end()) it = f_vals.emplace(w, random_rational(g)).first;
    return it->second;
  };
  const auto fp = [&](const Word& w) {
    auto it = fp_vals.find(w);
    if (it == fp_vals.end()) it = fp_vals.emplace(w, random_rational(g)).first;
    return it->second;
  };
  for (int n = 1; n <= 5; ++n) {
    const auto words = words_up_to(2, n);
    for (const auto& p : enumerate_nc(n)) {
      for (const auto& w : words) {
        if (static_cast<int>(w.size()) != n) continue;
        std::vector<Rational> poly{Rational(1)};
        for (const auto& block : p.blocks()) {
          Word sub;
          for (int k : block) sub.push_back(w[k - 1]);
          std::vector<Rational> next(poly.size() + 1, Rational(0));
          for (std::size_t d = 0; d < poly.size(); ++d) {
            next[d] += poly[d] * f(sub);
            next[d + 1] += poly[d] * fp(sub);
          }
          poly = std::move(next);
        }
        CHECK(eval_f_pi(f, p, w) == poly[0]);
        CHECK(eval_partial_f_pi(f, fp, p, w) == (poly.size() > 1 ? poly[1] : Rational(0)));
      }
    }
  }
}

TEST_CASE("moments from the transpose-pair tables") {
  const InfinitesimalLaw law = cumulants_to_moments(transpose_tables(4), 4);
  CHECK(law.phi(Word{0}) == Rational(0));
  CHECK(law.phi_prime(Word{0}) == Rational(0));
  CHECK(law.phi(Word{0, 0, 1, 1}) == Rational(1));
  CHECK(law.phi_prime(Word{0, 0, 1, 1}) == Rational(1));
  CHECK(law.phi(Word{0, 1, 0, 1}) == Rational(0));
  CHECK(law.phi_prime(Word{0, 1, 0, 1}) == Rational(0));
  CHECK(law.phi(Word{0, 1}) == Rational(0));
  CHECK(law.phi_prime(Word{0, 1}) == Rational(1));
}

TEST_CASE("semicircular moments invert to a single second cumulant") {
  const std::vector<LetterLabel> a{{"s", 0}};
  InfinitesimalLaw law(a);
  const long long moments[] = {0, 1, 0, 2, 0, 5};
  for (int d = 1; d <= 6; ++d) {
    law.set_moment(Word(static_cast<std::size_t>(d), 0), Rational(moments[d - 1]), Rational(0));
  }
  const CumulantTable t = moments_to_cumulants(law, 6);
  for (int d = 1; d <= 6; ++d) {
    const Word w(static_cast<std::size_t>(d), 0);
    CHECK(t.kappa(w) == Rational(d == 2 ? 1 : 0));
    CHECK(t.kappa_prime(w) == Rational(0));
  }
}

TEST_CASE("vanishing phi' gives vanishing kappa'") {
  Prng g(55);
  InfinitesimalLaw law(kGT);
  for (const auto& w : words_up_to(2, 5)) law.set_moment(w, random_rational(g), Rational(0));
  const CumulantTable t = moments_to_cumulants(law, 5);
  for (const auto& [w, v] : t.entries()) {
    (void)w;
    CHECK(v.second == Rational(0));
  }
}

TEST_CASE("round trip on random rational tables") {
  Prng g(77);
  for (int trial = 0; trial < 3; ++trial) {
    CumulantTable t(kGT, 6);
    for (const auto& w : words_up_to(2, 6)) t.set(w, random_rational(g), random_rational(g));
    const InfinitesimalLaw law = cumulants_to_moments(t, 6);
    const CumulantTable back = moments_to_cumulants(law, 6);
    for (const auto& w : words_up_to(2, 6)) {
      CHECK(back.kappa(w) == t.kappa(w));
      CHECK(back.kappa_prime(w) == t.kappa_prime(w));
    }
    // And the other composition order.
    const InfinitesimalLaw law2 = cumulants_to_moments(back, 6);
    for (const auto& w : words_up_to(2, 6)) {
      CHECK(law2.phi(w) == law.phi(w));
      CHECK(law2.phi_prime(w) == law.phi_prime(w));
    }
  }
}

TEST_CASE("classification law closes onto the predicted cumulants") {
  InfinitesimalLaw law(kGT);
  for (const auto& w : words_up_to(2, 6)) {
    const AsymptoticTrace at = asymptotic_trace(word_to_eps(w));
    law.set_moment(w, Rational(at.phi), Rational(at.phi_prime));
  }
  const CumulantTable t = moments_to_cumulants(law, 6);
  for (const auto& w : words_up_to(2, 6)) {
    const EpsWord e = word_to_eps(w);
    CHECK(t.kappa(w) == Rational(w.size() == 2 && e[0] == e[1] ? 1 : 0));
    CHECK(t.kappa_prime(w) == Rational(predicted_transpose_cumulant(e)));
  }
}

TEST_CASE("freeness check flags the transpose pair") {
  const InfinitesimalLaw law = cumulants_to_moments(transpose_tables(4), 4);
  const FreenessReport report = check_infinitesimal_freeness(law, 4);
  CHECK_FALSE(report.infinitesimally_free());
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.word == Word{0, 1}) {
      found = true;
      CHECK(v.kappa == Rational(0));
      CHECK(v.kappa_prime == Rational(1));
      CHECK(v.kappa_prime_flagged);
    }
  }
  CHECK(found);
}

TEST_CASE("freeness check accepts genuinely free constructions") {
  // Two free standard semicircular letters: all mixed cumulants vanish by
  // construction, and the alternating consequence must hold as well.
  CumulantTable t(std::vector<LetterLabel>{{"a", 0}, {"b", 1}}, 4);
  for (const auto& w : words_up_to(2, 4)) {
    t.set(w, Rational(w.size() == 2 && w[0] == w[1] ? 1 : 0), Rational(0));
  }
  const FreenessReport report = check_infinitesimal_freeness(cumulants_to_moments(t, 4), 4);
  CHECK(report.infinitesimally_free());
  CHECK_FALSE(report.alternating.empty());
  for (const auto& c : report.alternating) CHECK(c.ok);
}

TEST_CASE("freeness check accepts the null-permutation law") {
  // phi' identically zero and mixed plain moments zero, as for independently
  // permuted copies: only the alternating star pattern would survive, and
  // plain letters have none.
  CumulantTable t(std::vector<LetterLabel>{{"cs", 0}, {"ct", 1}}, 4);
  for (const auto& w : words_up_to(2, 4)) t.set(w, Rational(0), Rational(0));
  const FreenessReport report = check_infinitesimal_freeness(cumulants_to_moments(t, 4), 4);
  CHECK(report.infinitesimally_free());
}

TEST_CASE("freeness check requires tags") {
  InfinitesimalLaw law(std::vector<LetterLabel>{{"a", 0}, {"b", std::nullopt}});
  law.set_moment(Word{0}, Rational(0), Rational(0));
  law.set_moment(Word{1}, Rational(0), Rational(0));
  CHECK_THROWS_AS(check_infinitesimal_freeness(law, 1), std::invalid_argument);
}

TEST_CASE("predicted transpose cumulants") {
  CHECK(predicted_transpose_cumulant({Eps::Id, Eps::T}) == 1);
  CHECK(predicted_transpose_cumulant({Eps::T, Eps::Id}) == 1);
  CHECK(predicted_transpose_cumulant({Eps::Id, Eps::Id}) == 0);
  CHECK(predicted_transpose_cumulant({Eps::Id, Eps::T, Eps::Id, Eps::T}) == 0);
  CHECK(predicted_transpose_cumulant({Eps::Id, Eps::Id, Eps::T, Eps::T}) == 1);
  CHECK(predicted_transpose_cumulant({Eps::Id, Eps::T, Eps::T}) == 0);
  CHECK(predicted_transpose_cumulant({Eps::Id}) == 0);
  CHECK_THROWS_AS(predicted_transpose_cumulant({}), std::invalid_argument);

  // Swapping the two symbols globally leaves the prediction unchanged.
  for (int len = 1; len <= 8; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      EpsWord e(len), flipped(len);
      for (int k = 0; k < len; ++k) {
        e[k] = (mask >> k) & 1 ? Eps::T : Eps::Id;
        flipped[k] = (mask >> k) & 1 ? Eps::Id : Eps::T;
      }
      CHECK(predicted_transpose_cumulant(e) == predicted_transpose_cumulant(flipped));
    }
  }
}

TEST_CASE("cumulant table json round trip") {
  const CumulantTable t = transpose_tables(3);
  const CumulantTable back = CumulantTable::from_json(t.to_json());
  CHECK(back.degree() == 3);
  for (const auto& [w, v] : t.entries()) {
    CHECK(back.kappa(w) == v.first);
    CHECK(back.kappa_prime(w) == v.second);
  }
}

TEST_CASE("incomplete tables raise") {
  InfinitesimalLaw law(kGT);
  law.set_moment(Word{0}, Rational(0), Rational(0));
  CHECK_THROWS_AS(moments_to_cumulants(law, 2), IncompleteTableError);
  CumulantTable t(kGT, 2);
  t.set(Word{0}, Rational(0), Rational(0));
  CHECK_THROWS_AS(cumulants_to_moments(t, 2), IncompleteTableError);
  CHECK_THROWS_AS(cumulants_to_moments(t, 3), IncompleteTableError);
}

TEST_CASE("unit moments are pinned") {
  InfinitesimalLaw law(kGT);
  CHECK(law.phi(Word{}) == Rational(1));
  CHECK(law.phi_prime(Word{}) == Rational(0));
  CHECK_THROWS_AS(law.set_moment(Word{}, Rational(2), Rational(0)), std::invalid_argument);
  CHECK_NOTHROW(law.set_moment(Word{}, Rational(1), Rational(0)));
}
