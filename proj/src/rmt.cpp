#include "infwick/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace infwick {

GueSample sample_gue(int n, Prng& g) {
  if (n < 1) throw std::invalid_argument("sample_gue: side must be positive");
  GueSample s;
  s.n = n;
  s.entries.resize(n, n);
  const double diag_sd = std::sqrt(1.0 / n);
  const double off_sd = std::sqrt(1.0 / (2.0 * n));
  for (int i = 0; i < n; ++i) {
    s.entries(i, i) = std::complex<double>(diag_sd * g.gaussian(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const double re = off_sd * g.gaussian();
      const double im = off_sd * g.gaussian();
      s.entries(i, j) = std::complex<double>(re, im);
      s.entries(j, i) = std::complex<double>(re, -im);
    }
  }
  return s;
}

Eigen::MatrixXcd permute_entries(const GueSample& g, const EntryPermutation& p) {
  if (p.side() != g.n) throw std::invalid_argument("permute_entries: side mismatch");
  Eigen::MatrixXcd out(g.n, g.n);
  for (int i = 1; i <= g.n; ++i) {
    for (int j = 1; j <= g.n; ++j) {
      const Cell c = p.apply(i, j);
      out(i - 1, j - 1) = g.entries(c.i - 1, c.j - 1);
    }
  }
  return out;
}

std::string McEstimate::csv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%d,%llu,%lld,%.17g,%.17g,%.17g", word.c_str(), n,
                static_cast<unsigned long long>(seed), n_samples, mean.real(), mean.imag(),
                stderr_re);
  return buf;
}

namespace {

// Normalized trace of each listed word for one sampled alphabet, sharing
// half-products: tr(AB) costs O(N^2) once A and B are materialized.
class WordTraceEvaluator {
 public:
  explicit WordTraceEvaluator(std::vector<Eigen::MatrixXcd> letters)
      : letters_(std::move(letters)) {}

  std::complex<double> trace(const Word& w) {
    const int n = static_cast<int>(letters_.front().rows());
    if (w.size() == 1) return letters_[w[0]].trace() / static_cast<double>(n);
    const std::size_t half = (w.size() + 1) / 2;
    const Eigen::MatrixXcd& left = product(Word(w.begin(), w.begin() + half));
    const Eigen::MatrixXcd& right = product(Word(w.begin() + half, w.end()));
    const std::complex<double> tr = (left.transpose().cwiseProduct(right)).sum();
    return tr / static_cast<double>(n);
  }

 private:
  const Eigen::MatrixXcd& product(const Word& w) {
    if (w.size() == 1) return letters_[w[0]];
    auto it = products_.find(w);
    if (it != products_.end()) return it->second;
    const Word prefix(w.begin(), w.end() - 1);
    Eigen::MatrixXcd m = product(prefix) * letters_[w.back()];
    return products_.emplace(w, std::move(m)).first->second;
  }

  std::vector<Eigen::MatrixXcd> letters_;
  std::map<Word, Eigen::MatrixXcd> products_;
};

}  // namespace

std::vector<McEstimate> mc_trace_batch(const std::vector<MatrixLetter>& alphabet,
                                       const std::vector<Word>& words, long long n_samples,
                                       std::uint64_t seed, int jobs) {
  if (alphabet.empty()) throw std::invalid_argument("mc_trace_batch: empty alphabet");
  if (words.empty()) throw std::invalid_argument("mc_trace_batch: empty word list");
  if (n_samples < 2) throw std::invalid_argument("mc_trace_batch: need at least 2 samples");
  const int n = alphabet.front().perm.side();
  for (const auto& letter : alphabet) {
    if (letter.perm.side() != n) throw std::invalid_argument("mc_trace_batch: mixed N");
  }
  for (const auto& w : words) {
    if (w.empty()) throw std::invalid_argument("mc_trace_batch: empty word");
    for (int letter : w) {
      if (letter < 0 || letter >= static_cast<int>(alphabet.size())) {
        throw std::invalid_argument("mc_trace_batch: letter outside alphabet");
      }
    }
  }

  std::vector<std::complex<double>> traces(static_cast<std::size_t>(n_samples) * words.size());
  const auto run_range = [&](long long lo, long long hi) {
    for (long long s = lo; s < hi; ++s) {
      Prng g = Prng::stream(seed, {kStreamGue, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(s)});
      const GueSample gue = sample_gue(n, g);
      std::vector<Eigen::MatrixXcd> letters;
      letters.reserve(alphabet.size());
      for (const auto& letter : alphabet) {
        Eigen::MatrixXcd m = permute_entries(gue, letter.perm);
        if (letter.star) m = m.adjoint().eval();
        letters.push_back(std::move(m));
      }
      WordTraceEvaluator eval(std::move(letters));
      for (std::size_t wi = 0; wi < words.size(); ++wi) {
        traces[static_cast<std::size_t>(s) * words.size() + wi] = eval.trace(words[wi]);
      }
    }
  };

  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::thread::hardware_concurrency())));
  if (jobs <= 1 || n_samples < 4 * jobs) {
    run_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const long long chunk = (n_samples + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
      const long long lo = t * chunk;
      const long long hi = std::min<long long>(n_samples, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Welford accumulation in sample order, independent of the thread split.
  std::vector<McEstimate> out(words.size());
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    double mean_re = 0, mean_im = 0, m2_re = 0, m2_im = 0;
    for (long long s = 0; s < n_samples; ++s) {
      const std::complex<double> x = traces[static_cast<std::size_t>(s) * words.size() + wi];
      const double dr = x.real() - mean_re;
      mean_re += dr / static_cast<double>(s + 1);
      m2_re += dr * (x.real() - mean_re);
      const double di = x.imag() - mean_im;
      mean_im += di / static_cast<double>(s + 1);
      m2_im += di * (x.imag() - mean_im);
    }
    McEstimate& e = out[wi];
    std::string name;
    for (std::size_t k = 0; k < words[wi].size(); ++k) {
      if (k) name += ".";
      const auto& letter = alphabet[words[wi][k]];
      name += letter.name.empty() ? letter.perm.describe() + (letter.star ? "*" : "")
                                  : letter.name;
    }
    e.word = name;
    e.n = n;
    e.n_samples = n_samples;
    e.seed = seed;
    e.mean = {mean_re, mean_im};
    const double denom = static_cast<double>(n_samples - 1) * static_cast<double>(n_samples);
    e.stderr_re = std::sqrt(m2_re / denom);
    e.stderr_im = std::sqrt(m2_im / denom);
  }
  return out;
}

McEstimate mc_expected_trace(const std::vector<MatrixLetter>& word_letters, long long n_samples,
                             std::uint64_t seed, int jobs) {
  Word w(word_letters.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<int>(k);
  return mc_trace_batch(word_letters, {w}, n_samples, seed, jobs).front();
}

double InfinitesimalFit::sigma_a() const { return std::sqrt(std::max(0.0, cov_aa)); }

InfinitesimalFit fit_infinitesimal(const std::vector<FitPoint>& points, double phi_ref) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_infinitesimal: need at least 3 points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].n <= points[i - 1].n) {
      throw std::invalid_argument("fit_infinitesimal: N values must be strictly increasing");
    }
  }
  double min_positive = 0;
  for (const auto& p : points) {
    if (p.stderr_ > 0 && (min_positive == 0 || p.stderr_ < min_positive)) {
      min_positive = p.stderr_;
    }
  }
  InfinitesimalFit fit;
  fit.phi_ref = phi_ref;
  fit.points = points;
  double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
  for (const auto& p : points) {
    const double x = 1.0 / p.n;
    const double se = p.stderr_ > 0 ? p.stderr_ : min_positive;
    const double w = se > 0 ? 1.0 / (se * se) : 1.0;
    const double y = p.value - phi_ref;
    s11 += w * x * x;
    s12 += w * x * x * x;
    s22 += w * x * x * x * x;
    t1 += w * x * y;
    t2 += w * x * x * y;
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(std::abs(det) > 1e-300)) {
    throw std::invalid_argument("fit_infinitesimal: degenerate design matrix");
  }
  fit.a = (t1 * s22 - t2 * s12) / det;
  fit.b = (s11 * t2 - s12 * t1) / det;
  fit.cov_aa = s22 / det;
  fit.cov_ab = -s12 / det;
  fit.cov_bb = s11 / det;
  for (const auto& p : points) {
    const double x = 1.0 / p.n;
    fit.residuals.push_back(p.value - phi_ref - fit.a * x - fit.b * x * x);
  }
  return fit;
}

EmpiricalLawResult build_empirical_law(
    const std::vector<LetterLabel>& alphabet,
    const std::function<std::vector<MatrixLetter>(int)>& letters_at,
    const std::vector<Word>& words, const std::map<Word, Rational>& reference_phi,
    const std::vector<int>& n_list, long long n_samples, std::uint64_t seed, int jobs) {
  EmpiricalLawResult result{InfinitesimalLaw(alphabet), {}, {}};
  std::vector<std::vector<McEstimate>> per_n;
  for (int n : n_list) {
    per_n.push_back(mc_trace_batch(letters_at(n), words, n_samples, seed, jobs));
    for (const auto& e : per_n.back()) result.estimates.push_back(e);
  }
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const Word& w = words[wi];
    const double phi_ref = static_cast<double>(reference_phi.at(w));
    std::vector<FitPoint> points;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
      const McEstimate& e = per_n[ni][wi];
      points.push_back({n_list[ni], e.mean.real(), e.stderr_re});
    }
    InfinitesimalFit fit = fit_infinitesimal(points, phi_ref);
    fit.word = word_to_string(w, alphabet);
    result.law.set_moment(w, reference_phi.at(w), Rational(fit.a));
    result.law.set_phi_prime_variance(w, fit.cov_aa);
    result.fits.push_back(std::move(fit));
  }
  return result;
}

}  // namespace infwick
