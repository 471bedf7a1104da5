#include "infwick/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

#include "infwick/errors.hpp"

namespace infwick {

std::string word_to_string(const Word& w, const std::vector<LetterLabel>& alphabet) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) s += ".";
    s += alphabet.at(w[k]).symbol;
  }
  return s;
}

InfinitesimalLaw::InfinitesimalLaw(std::vector<LetterLabel> alphabet)
    : alphabet_(std::move(alphabet)) {
  if (alphabet_.empty()) throw std::invalid_argument("InfinitesimalLaw: empty alphabet");
}

void InfinitesimalLaw::check_word(const Word& w) const {
  for (int letter : w) {
    if (letter < 0 || letter >= static_cast<int>(alphabet_.size())) {
      throw std::invalid_argument("InfinitesimalLaw: letter outside alphabet");
    }
  }
}

void InfinitesimalLaw::set_moment(const Word& w, Rational phi, Rational phi_prime) {
  check_word(w);
  if (w.empty()) {
    // The unit conditions phi(1) = 1, phi'(1) = 0 are fixed.
    if (phi != 1 || phi_prime != 0) {
      throw std::invalid_argument("InfinitesimalLaw: unit moments are fixed to (1, 0)");
    }
    return;
  }
  moments_[w] = {std::move(phi), std::move(phi_prime)};
}

void InfinitesimalLaw::set_phi_prime_variance(const Word& w, double variance) {
  check_word(w);
  if (variance < 0) throw std::invalid_argument("InfinitesimalLaw: negative variance");
  phi_prime_variance_[w] = variance;
}

Rational InfinitesimalLaw::phi(const Word& w) const {
  if (w.empty()) return Rational(1);
  const auto it = moments_.find(w);
  if (it == moments_.end()) {
    throw IncompleteTableError("InfinitesimalLaw: no phi entry for " +
                               word_to_string(w, alphabet_));
  }
  return it->second.first;
}

Rational InfinitesimalLaw::phi_prime(const Word& w) const {
  if (w.empty()) return Rational(0);
  const auto it = moments_.find(w);
  if (it == moments_.end()) {
    throw IncompleteTableError("InfinitesimalLaw: no phi' entry for " +
                               word_to_string(w, alphabet_));
  }
  return it->second.second;
}

double InfinitesimalLaw::phi_prime_variance(const Word& w) const {
  const auto it = phi_prime_variance_.find(w);
  return it == phi_prime_variance_.end() ? 0.0 : it->second;
}

bool InfinitesimalLaw::has(const Word& w) const {
  return w.empty() || moments_.count(w) > 0;
}

CumulantTable::CumulantTable(std::vector<LetterLabel> alphabet, int degree)
    : alphabet_(std::move(alphabet)), degree_(degree) {
  if (degree_ < 1) throw std::invalid_argument("CumulantTable: degree must be positive");
}

void CumulantTable::set(const Word& w, Rational kappa, Rational kappa_prime) {
  if (w.empty()) throw std::invalid_argument("CumulantTable: empty word");
  entries_[w] = {std::move(kappa), std::move(kappa_prime)};
}

void CumulantTable::set_kappa_prime_variance(const Word& w, double variance) {
  kappa_prime_variance_[w] = variance;
}

Rational CumulantTable::kappa(const Word& w) const {
  const auto it = entries_.find(w);
  if (it == entries_.end()) {
    throw IncompleteTableError("CumulantTable: no kappa entry for " +
                               word_to_string(w, alphabet_));
  }
  return it->second.first;
}

Rational CumulantTable::kappa_prime(const Word& w) const {
  const auto it = entries_.find(w);
  if (it == entries_.end()) {
    throw IncompleteTableError("CumulantTable: no kappa' entry for " +
                               word_to_string(w, alphabet_));
  }
  return it->second.second;
}

double CumulantTable::kappa_prime_variance(const Word& w) const {
  const auto it = kappa_prime_variance_.find(w);
  return it == kappa_prime_variance_.end() ? 0.0 : it->second;
}

nlohmann::json CumulantTable::to_json() const {
  nlohmann::json j;
  j["degree"] = degree_;
  j["alphabet"] = nlohmann::json::array();
  for (const auto& letter : alphabet_) {
    nlohmann::json l;
    l["symbol"] = letter.symbol;
    if (letter.algebra_tag) l["tag"] = *letter.algebra_tag;
    j["alphabet"].push_back(l);
  }
  j["entries"] = nlohmann::json::array();
  for (const auto& [word, value] : entries_) {
    nlohmann::json entry;
    entry["word"] = nlohmann::json::array();
    for (int letter : word) entry["word"].push_back(alphabet_[letter].symbol);
    entry["kappa"] = rational_to_string(value.first);
    entry["kappa_prime"] = rational_to_string(value.second);
    j["entries"].push_back(entry);
  }
  return j;
}

CumulantTable CumulantTable::from_json(const nlohmann::json& j) {
  std::vector<LetterLabel> alphabet;
  for (const auto& l : j.at("alphabet")) {
    LetterLabel letter;
    letter.symbol = l.at("symbol").get<std::string>();
    if (l.contains("tag")) letter.algebra_tag = l.at("tag").get<int>();
    alphabet.push_back(letter);
  }
  CumulantTable table(alphabet, j.at("degree").get<int>());
  for (const auto& entry : j.at("entries")) {
    Word w;
    for (const auto& sym : entry.at("word")) {
      const std::string s = sym.get<std::string>();
      const auto it = std::find_if(alphabet.begin(), alphabet.end(),
                                   [&](const LetterLabel& l) { return l.symbol == s; });
      if (it == alphabet.end()) throw std::invalid_argument("CumulantTable: unknown symbol " + s);
      w.push_back(static_cast<int>(it - alphabet.begin()));
    }
    table.set(w, Rational(entry.at("kappa").get<std::string>()),
              Rational(entry.at("kappa_prime").get<std::string>()));
  }
  return table;
}

namespace {

Word subword(const Word& w, const std::vector<int>& positions) {
  Word out;
  out.reserve(positions.size());
  for (int k : positions) out.push_back(w[k - 1]);
  return out;
}

const std::vector<NcPartition>& nc_cache(int n) {
  static std::vector<std::vector<NcPartition>> cache = [] {
    std::vector<std::vector<NcPartition>> c(kNcEnumerationCap + 1);
    for (int k = 1; k <= kNcEnumerationCap; ++k) c[k] = enumerate_nc(k);
    return c;
  }();
  if (n < 1 || n > kNcEnumerationCap) {
    throw SizeLimitError("nc_cache: degree exceeds the NC enumeration cap");
  }
  return cache[n];
}

// Memoized moment -> cumulant inversion. kappa depends only on phi; the
// primed recursion is linear in phi' at fixed kappa, which the variance
// propagation below exploits.
struct Inverter {
  const InfinitesimalLaw& law;
  std::map<Word, Rational> kappa_memo;

  const Rational& kappa(const Word& w) {
    const auto it = kappa_memo.find(w);
    if (it != kappa_memo.end()) return it->second;
    const int n = static_cast<int>(w.size());
    Rational value = law.phi(w);
    for (const auto& p : nc_cache(n)) {
      if (p.blocks().size() == 1) continue;
      Rational term = 1;
      for (const auto& block : p.blocks()) term *= kappa(subword(w, block));
      value -= term;
    }
    return kappa_memo.emplace(w, std::move(value)).first->second;
  }

  // kappa' with phi' supplied as a function, so unit-vector runs give the
  // Jacobian columns used for variance propagation.
  std::map<Word, Rational> prime_memo;
  std::function<Rational(const Word&)> phi_prime_fn;

  const Rational& kappa_prime(const Word& w) {
    const auto it = prime_memo.find(w);
    if (it != prime_memo.end()) return it->second;
    const int n = static_cast<int>(w.size());
    Rational value = phi_prime_fn(w);
    for (const auto& p : nc_cache(n)) {
      if (p.blocks().size() == 1) continue;
      for (std::size_t v = 0; v < p.blocks().size(); ++v) {
        Rational term = kappa_prime(subword(w, p.blocks()[v]));
        if (term == 0) continue;
        for (std::size_t u = 0; u < p.blocks().size(); ++u) {
          if (u != v) term *= kappa(subword(w, p.blocks()[u]));
        }
        value -= term;
      }
    }
    return prime_memo.emplace(w, std::move(value)).first->second;
  }
};

std::vector<Word> all_words(std::size_t alphabet_size, int max_degree) {
  std::vector<Word> out;
  std::vector<Word> layer{Word{}};
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (std::size_t a = 0; a < alphabet_size; ++a) {
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

}  // namespace

Rational eval_f_pi(const std::function<Rational(const Word&)>& f, const NcPartition& p,
                   const Word& w) {
  if (p.points() != static_cast<int>(w.size())) {
    throw std::invalid_argument("eval_f_pi: word/partition length mismatch");
  }
  Rational value = 1;
  for (const auto& block : p.blocks()) value *= f(subword(w, block));
  return value;
}

Rational eval_partial_f_pi(const std::function<Rational(const Word&)>& f,
                           const std::function<Rational(const Word&)>& f_prime,
                           const NcPartition& p, const Word& w) {
  if (p.points() != static_cast<int>(w.size())) {
    throw std::invalid_argument("eval_partial_f_pi: word/partition length mismatch");
  }
  Rational value = 0;
  for (std::size_t v = 0; v < p.blocks().size(); ++v) {
    Rational term = f_prime(subword(w, p.blocks()[v]));
    if (term == 0) continue;
    for (std::size_t u = 0; u < p.blocks().size(); ++u) {
      if (u != v) term *= f(subword(w, p.blocks()[u]));
    }
    value += term;
  }
  return value;
}

InfinitesimalLaw cumulants_to_moments(const CumulantTable& table, int max_degree) {
  if (max_degree > table.degree()) {
    throw IncompleteTableError("cumulants_to_moments: table degree too small");
  }
  InfinitesimalLaw law(table.alphabet());
  const auto kappa_fn = [&table](const Word& w) { return table.kappa(w); };
  const auto kappa_prime_fn = [&table](const Word& w) { return table.kappa_prime(w); };
  for (const auto& w : all_words(table.alphabet().size(), max_degree)) {
    const int n = static_cast<int>(w.size());
    Rational phi = 0;
    Rational phi_prime = 0;
    for (const auto& p : nc_cache(n)) {
      phi += eval_f_pi(kappa_fn, p, w);
      phi_prime += eval_partial_f_pi(kappa_fn, kappa_prime_fn, p, w);
    }
    law.set_moment(w, std::move(phi), std::move(phi_prime));
  }
  return law;
}

CumulantTable moments_to_cumulants(const InfinitesimalLaw& law, int max_degree) {
  CumulantTable table(law.alphabet(), max_degree);
  const auto words = all_words(law.alphabet().size(), max_degree);

  Inverter inv{law, {}, {}, [&law](const Word& w) { return law.phi_prime(w); }};
  for (const auto& w : words) table.set(w, inv.kappa(w), inv.kappa_prime(w));

  bool any_variance = false;
  for (const auto& w : words) {
    if (law.phi_prime_variance(w) > 0) {
      any_variance = true;
      break;
    }
  }
  if (any_variance) {
    // kappa'(w) = sum_v J[w][v] phi'(v); variances propagate through the
    // squared Jacobian. Columns come from unit-vector phi' runs.
    std::map<Word, double> variance;
    for (const auto& v : words) {
      const double var_v = law.phi_prime_variance(v);
      if (var_v <= 0) continue;
      Inverter column{law, {}, {},
                      [&v](const Word& w) { return Rational(w == v ? 1 : 0); }};
      column.kappa_memo = inv.kappa_memo;
      for (const auto& w : words) {
        const double coeff = static_cast<double>(column.kappa_prime(w));
        if (coeff != 0.0) variance[w] += coeff * coeff * var_v;
      }
    }
    for (const auto& [w, var] : variance) table.set_kappa_prime_variance(w, var);
  }
  return table;
}

namespace {

bool tags_all_equal(const Word& w, const std::vector<LetterLabel>& alphabet) {
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (*alphabet[w[k]].algebra_tag != *alphabet[w[0]].algebra_tag) return false;
  }
  return true;
}

bool tags_alternating(const Word& w, const std::vector<LetterLabel>& alphabet) {
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (*alphabet[w[k]].algebra_tag == *alphabet[w[k - 1]].algebra_tag) return false;
  }
  return true;
}

// Linear form over phi' entries plus an exact phi-only constant.
struct PrimeForm {
  std::map<Word, Rational> coeff;
  void add(const Word& w, const Rational& c) {
    if (w.empty()) return;  // phi'(1) = 0
    coeff[w] += c;
  }
  double value(const InfinitesimalLaw& law) const {
    Rational v = 0;
    for (const auto& [w, c] : coeff) v += c * law.phi_prime(w);
    return static_cast<double>(v);
  }
  double variance(const InfinitesimalLaw& law) const {
    double var = 0;
    for (const auto& [w, c] : coeff) {
      const double cd = static_cast<double>(c);
      var += cd * cd * law.phi_prime_variance(w);
    }
    return var;
  }
};

// Expansion of phi(prod of centered letters) over a subset of positions.
Rational centered_phi(const InfinitesimalLaw& law, const Word& w, const std::vector<int>& keep) {
  const int n = static_cast<int>(keep.size());
  Rational total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Word sub;
    Rational sign = 1;
    for (int k = 0; k < n; ++k) {
      if (mask & (1u << k)) {
        sub.push_back(w[keep[k] - 1]);
      } else {
        sign *= -law.phi(Word{w[keep[k] - 1]});
      }
    }
    total += sign * law.phi(sub);
  }
  return total;
}

}  // namespace

FreenessReport check_infinitesimal_freeness(const InfinitesimalLaw& law, int max_degree) {
  for (const auto& letter : law.alphabet()) {
    if (!letter.algebra_tag) {
      throw std::invalid_argument("check_infinitesimal_freeness: untagged letter " +
                                  letter.symbol);
    }
  }
  FreenessReport report;
  report.max_degree = max_degree;
  const CumulantTable table = moments_to_cumulants(law, max_degree);

  for (const auto& [w, value] : table.entries()) {
    if (w.size() < 2 || tags_all_equal(w, law.alphabet())) continue;
    FreenessViolation v;
    v.word = w;
    v.word_str = word_to_string(w, law.alphabet());
    v.kappa = value.first;
    v.kappa_prime = value.second;
    v.kappa_prime_tolerance = 3.0 * std::sqrt(table.kappa_prime_variance(w));
    v.kappa_flagged = v.kappa != 0;
    v.kappa_prime_flagged =
        std::abs(static_cast<double>(v.kappa_prime)) > v.kappa_prime_tolerance;
    if (v.kappa_flagged || v.kappa_prime_flagged) report.violations.push_back(std::move(v));
  }

  // Centered alternating words: phi vanishes and phi' reduces to the sum of
  // one-letter phi' terms. Evaluated as a consequence, not as the test.
  for (const auto& w : all_words(law.alphabet().size(), max_degree)) {
    if (w.size() < 2 || !tags_alternating(w, law.alphabet())) continue;
    const int n = static_cast<int>(w.size());
    std::vector<int> all(n);
    for (int k = 0; k < n; ++k) all[k] = k + 1;

    const Rational phi_defect = centered_phi(law, w, all);

    PrimeForm form;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      Word sub;
      Rational sign = 1;
      for (int k = 0; k < n; ++k) {
        if (mask & (1u << k)) {
          sub.push_back(w[k]);
        } else {
          sign *= -law.phi(Word{w[k]});
        }
      }
      form.add(sub, sign);
    }
    for (int j = 1; j <= n; ++j) {
      std::vector<int> rest;
      for (int k = 1; k <= n; ++k) {
        if (k != j) rest.push_back(k);
      }
      form.add(Word{w[j - 1]}, -centered_phi(law, w, rest));
    }

    AlternatingCheck check;
    check.word = w;
    check.word_str = word_to_string(w, law.alphabet());
    check.phi_defect = static_cast<double>(phi_defect);
    check.phi_prime_defect = form.value(law);
    check.tolerance = 3.0 * std::sqrt(form.variance(law));
    check.ok = phi_defect == 0 && std::abs(check.phi_prime_defect) <= check.tolerance;
    report.alternating.push_back(std::move(check));
  }
  return report;
}

int predicted_transpose_cumulant(const EpsWord& e) {
  if (e.empty()) throw std::invalid_argument("predicted_transpose_cumulant: empty word");
  const int p = static_cast<int>(e.size());
  if (p % 2 != 0) return 0;
  const int m = p / 2;
  if (e[0] == e[m]) return 0;          // e_1 != e_{m+1}
  if (e[m - 1] == e[2 * m - 1]) return 0;  // e_m != e_{2m}
  for (int s = 2; s <= m - 1; ++s) {
    if (e[s - 1] == e[2 * m - s]) return 0;  // e_s != e_{2m+1-s}
  }
  return 1;
}

}  // namespace infwick
