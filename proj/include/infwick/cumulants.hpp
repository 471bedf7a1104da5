#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "infwick/partitions.hpp"
#include "infwick/rational.hpp"
#include "infwick/wick.hpp"

namespace infwick {

struct LetterLabel {
  std::string symbol;
  std::optional<int> algebra_tag;
};

// A word is a sequence of indices into a declared alphabet.
using Word = std::vector<int>;

std::string word_to_string(const Word& w, const std::vector<LetterLabel>& alphabet);

// Pair of linear functionals (phi, phi') tabulated on words, with
// phi(1) = 1 and phi'(1) = 0. Values are exact rationals; Monte Carlo
// estimates enter as dyadic rationals with their variances kept alongside.
class InfinitesimalLaw {
 public:
  explicit InfinitesimalLaw(std::vector<LetterLabel> alphabet);

  const std::vector<LetterLabel>& alphabet() const { return alphabet_; }

  void set_moment(const Word& w, Rational phi, Rational phi_prime);
  void set_phi_prime_variance(const Word& w, double variance);

  Rational phi(const Word& w) const;        // empty word -> 1
  Rational phi_prime(const Word& w) const;  // empty word -> 0
  double phi_prime_variance(const Word& w) const;
  bool has(const Word& w) const;

  const std::map<Word, std::pair<Rational, Rational>>& moments() const { return moments_; }

 private:
  void check_word(const Word& w) const;

  std::vector<LetterLabel> alphabet_;
  std::map<Word, std::pair<Rational, Rational>> moments_;
  std::map<Word, double> phi_prime_variance_;
};

class CumulantTable {
 public:
  CumulantTable(std::vector<LetterLabel> alphabet, int degree);

  int degree() const { return degree_; }
  const std::vector<LetterLabel>& alphabet() const { return alphabet_; }

  void set(const Word& w, Rational kappa, Rational kappa_prime);
  void set_kappa_prime_variance(const Word& w, double variance);

  Rational kappa(const Word& w) const;        // missing entry -> IncompleteTableError
  Rational kappa_prime(const Word& w) const;
  double kappa_prime_variance(const Word& w) const;

  const std::map<Word, std::pair<Rational, Rational>>& entries() const { return entries_; }

  nlohmann::json to_json() const;
  static CumulantTable from_json(const nlohmann::json& j);

 private:
  std::vector<LetterLabel> alphabet_;
  int degree_;
  std::map<Word, std::pair<Rational, Rational>> entries_;
  std::map<Word, double> kappa_prime_variance_;
};

// Product over blocks of f on the subword each block selects.
Rational eval_f_pi(const std::function<Rational(const Word&)>& f, const NcPartition& p,
                   const Word& w);

// One-block-primed derivative: sum over blocks V of f'(w|V) times the
// product of f over the remaining blocks.
Rational eval_partial_f_pi(const std::function<Rational(const Word&)>& f,
                           const std::function<Rational(const Word&)>& f_prime,
                           const NcPartition& p, const Word& w);

// phi(w)  = sum over NC(n) of kappa_pi(w)
// phi'(w) = sum over NC(n) of the one-block-primed kappa products
InfinitesimalLaw cumulants_to_moments(const CumulantTable& table, int max_degree);

// Inverse by induction on the degree; exact. When the law carries phi'
// variances they are propagated linearly (kappa' is linear in phi' at
// fixed phi) into kappa' variances.
CumulantTable moments_to_cumulants(const InfinitesimalLaw& law, int max_degree);

struct FreenessViolation {
  Word word;
  std::string word_str;
  Rational kappa;
  Rational kappa_prime;
  double kappa_prime_tolerance = 0.0;
  bool kappa_flagged = false;
  bool kappa_prime_flagged = false;
};

struct AlternatingCheck {
  Word word;
  std::string word_str;
  double phi_defect = 0.0;
  double phi_prime_defect = 0.0;
  double tolerance = 0.0;
  bool ok = true;
};

struct FreenessReport {
  std::vector<FreenessViolation> violations;
  std::vector<AlternatingCheck> alternating;
  int max_degree = 0;
  bool infinitesimally_free() const { return violations.empty(); }
};

// Flags every mixed word (algebra tags not all equal) of length >= 2 whose
// kappa is nonzero or whose kappa' exceeds 3 propagated standard errors.
// Also evaluates the centered alternating moment conditions as a
// consequence check. Untagged letters are an argument error.
FreenessReport check_infinitesimal_freeness(const InfinitesimalLaw& law, int max_degree);

// Closed-form prediction for the joint infinitesimal cumulants of a
// Gaussian matrix and its transpose: 1 iff the word has even length 2m with
// e_1 != e_{m+1}, e_m != e_{2m}, and e_s != e_{2m+1-s} for s = 2..m-1
// (positions 1 and m pair forward, interior positions pair reflectively).
int predicted_transpose_cumulant(const EpsWord& e);

}  // namespace infwick
