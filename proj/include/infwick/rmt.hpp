#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infwick/cumulants.hpp"
#include "infwick/perms.hpp"
#include "infwick/prng.hpp"

namespace infwick {

struct GueSample {
  int n = 0;
  Eigen::MatrixXcd entries;
};

// Hermitian with independent upper-triangle entries: diagonal real with
// variance 1/N, off-diagonal complex with component variance 1/(2N); the
// lower triangle mirrors by exact conjugation. Draw order is row-major over
// the upper triangle, diagonal first in each row.
GueSample sample_gue(int n, Prng& g);

// output(i,j) = entries(p(i,j)); generally not Hermitian.
Eigen::MatrixXcd permute_entries(const GueSample& g, const EntryPermutation& p);

struct MatrixLetter {
  EntryPermutation perm;
  bool star = false;  // take the adjoint of the permuted copy
  std::string name;
};

struct McEstimate {
  std::string word;
  int n = 0;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  std::complex<double> mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::string csv_row() const;  // word,N,seed,n_samples,mean_re,mean_im,stderr
};

// Monte Carlo estimates of the normalized trace of each word, sharing one
// fresh GUE draw per sample across all words. Per-sample PRNG streams are
// derived from (seed, sample index) and the reduction runs in sample order,
// so results do not depend on the number of jobs.
std::vector<McEstimate> mc_trace_batch(const std::vector<MatrixLetter>& alphabet,
                                       const std::vector<Word>& words, long long n_samples,
                                       std::uint64_t seed, int jobs = 1);

McEstimate mc_expected_trace(const std::vector<MatrixLetter>& word_letters, long long n_samples,
                             std::uint64_t seed, int jobs = 1);

struct FitPoint {
  int n = 0;
  double value = 0.0;
  double stderr_ = 0.0;
};

// Weighted least squares of value = phi_ref + a/N + b/N^2; `a` estimates the
// order-1/N coefficient. Weights are 1/stderr^2, or uniform when no point
// carries a positive error (exact data).
struct InfinitesimalFit {
  std::string word;
  double phi_ref = 0.0;
  double a = 0.0;
  double b = 0.0;
  double cov_aa = 0.0;
  double cov_ab = 0.0;
  double cov_bb = 0.0;
  std::vector<FitPoint> points;
  std::vector<double> residuals;
  double sigma_a() const;
};

InfinitesimalFit fit_infinitesimal(const std::vector<FitPoint>& points, double phi_ref);

struct EmpiricalLawResult {
  InfinitesimalLaw law;
  std::vector<InfinitesimalFit> fits;          // one per word
  std::vector<McEstimate> estimates;           // all (word, N) estimates
};

// phi = supplied exact reference per word, phi' = fitted slope of the MC
// curve across n_list, with the fit variance carried on the law.
EmpiricalLawResult build_empirical_law(
    const std::vector<LetterLabel>& alphabet,
    const std::function<std::vector<MatrixLetter>(int)>& letters_at,
    const std::vector<Word>& words, const std::map<Word, Rational>& reference_phi,
    const std::vector<int>& n_list, long long n_samples, std::uint64_t seed, int jobs = 1);

}  // namespace infwick
