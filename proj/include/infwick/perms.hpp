#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace infwick {

struct Cell {
  int i = 0;
  int j = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class PermKind { Identity, Transpose, Explicit, TransposeConjugate };

// Bijection of [N]^2, 1-based in the API. Explicit tables are validated on
// construction and shared between copies; TransposeConjugate(s) acts as
// cell -> T(s(T(cell))) where T is the cell transpose (i,j) -> (j,i).
class EntryPermutation {
 public:
  static EntryPermutation identity(int n);
  static EntryPermutation transpose(int n);
  // cells: row-major, 0-based flat target index per source cell.
  static EntryPermutation explicit_table(int n, std::vector<std::uint32_t> cells);
  static EntryPermutation transpose_conjugate(EntryPermutation inner);

  int side() const { return n_; }
  PermKind kind() const { return kind_; }

  Cell apply(int i, int j) const;
  Cell apply_inverse(int i, int j) const;

  // Flat 0-based row-major cell maps, materialized for scan loops.
  std::vector<std::uint32_t> dense_table() const;
  std::vector<std::uint32_t> dense_inverse() const;

  nlohmann::json to_json() const;
  static EntryPermutation from_json(const nlohmann::json& j);

  std::string describe() const;  // "id", "t", "explicit", "tct(...)"

 private:
  EntryPermutation(int n, PermKind kind) : n_(n), kind_(kind) {}

  int n_;
  PermKind kind_;
  std::shared_ptr<const std::vector<std::uint32_t>> table_;
  std::shared_ptr<const std::vector<std::uint32_t>> inverse_;
  std::shared_ptr<const EntryPermutation> inner_;
};

// Fisher-Yates shuffle of the N^2 cells in row-major order, driven by the
// named counter PRNG; identical (n, seed) gives an identical permutation on
// every platform.
EntryPermutation sample_uniform(int n, std::uint64_t seed);

struct StatReport {
  std::string kind;
  int n = 0;
  std::uint64_t seed = 0;
  long long raw = 0;
  double exponent = 1.0;
  double normalized() const;
  std::string csv_row() const;  // kind,N,seed,raw,exponent,normalized
};

// |{(i,j) : s(i,j) = T(s(j,i))}|, normalization N.
StatReport stat_transpose_fixed(const EntryPermutation& s);

// sup over i of |{(j,k) : s(i,j) = T(s(j,k)), or s(i,j) = s(k,j) with
// k != i}|, normalization N^(1/2). The second coincidence excludes k = i
// because s(i,j) = s(k,j) forces k = i for any bijection; keeping that
// family would add a deterministic count of N per row.
StatReport stat_row_sup(const EntryPermutation& s);

// |{(i,j,k,l) : s1(i,j) = T(s3(k,l)) and s2(j,k) = T(s4(l,i))}|,
// normalization N^2.
StatReport stat_quad_cycle(const EntryPermutation& s1, const EntryPermutation& s2,
                           const EntryPermutation& s3, const EntryPermutation& s4);

// |{(i,j,k,l,a,b) : s1(i,j) = T(s3(k,l)) and s2(a,k) = T(s4(b,i))}|,
// normalization N^3.
StatReport stat_hex(const EntryPermutation& s1, const EntryPermutation& s2,
                    const EntryPermutation& s3, const EntryPermutation& s4);

enum class LemmaStat { L33ii, L42i, L42ii, L43i, L43ii, L44i, L44ii, L45 };

std::string lemma_stat_name(LemmaStat kind);

// Auxiliary maps the lemma statistics quantify over. All arguments and
// results are 1-based. Defaults are canonical coordinate projections.
struct AuxMaps {
  // [N]^2 -> [N], used by L33ii (on the image cell) and L44ii.
  std::function<int(int, int)> cell_to_index;
  // [N]^2 -> [N]^2 maps f, g used by L43i and L44i.
  std::function<Cell(int, int)> f;
  std::function<Cell(int, int)> g;
  // [N]^3 -> [N]^2 maps used by L43ii.
  std::function<Cell(int, int, int)> phi3;
  std::function<Cell(int, int, int)> psi3;

  static AuxMaps defaults();
};

struct LemmaStatResult {
  StatReport report;
  // L43ii only: whether the joint injectivity hypothesis was verified;
  // empty when the check was skipped (N above the check cap).
  std::optional<bool> hypothesis_holds;
};

// Counting statistics per lemma kind; `perms` supplies each kind's players:
//   L33ii: {sigma, sigma1}   count (i,j,a,b): sigma(a, c2i(sigma(i,j))) = T(sigma1(b,i))
//   L42i:  {omega, sigma}    count (i,j):     omega(i,j) = sigma(j,i)
//   L42ii: {omega, sigma}    sup_i (j,k):     omega(i,j) = sigma(j,k)
//   L43i:  {sigma}           count (i,j):     sigma(f(i,j)) = g(i,j)
//   L43ii: {sigma}           count (i,j,a,b): sigma(phi3(i,j,a)) = psi3(i,j,b)
//   L44i:  {sigma, eta}      count (i,j):     f(i,j) != g(i,j) and sigma(f(i,j)) = eta(sigma(g(i,j)))
//   L44ii: {sigma, omega, eta} count (i,j,a,b): omega(b,i) != (a,h(i,j)) and
//                                sigma(a,h(i,j)) = eta(sigma(omega(b,i)))  [h = cell_to_index]
//   L45:   {sigma, eta1, eta2, omega} count (i,j,k,l,a,b): (a,k) != omega(k,l) and
//                                sigma(a,k) = eta1(b,i) and sigma(omega(k,l)) = eta2(i,j)
LemmaStatResult stat_lemma_family(LemmaStat kind, const std::vector<EntryPermutation>& perms,
                                  const AuxMaps& aux = AuxMaps::defaults());

}  // namespace infwick
