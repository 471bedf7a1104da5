#include "infwick/perms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "infwick/prng.hpp"

namespace infwick {

namespace {

void check_range(int n, int i, int j) {
  if (i < 1 || i > n || j < 1 || j > n) {
    throw std::invalid_argument("EntryPermutation: cell index out of range");
  }
}

inline std::uint32_t transpose_flat(std::uint32_t c, int n) {
  return (c % n) * n + c / n;
}

}  // namespace

EntryPermutation EntryPermutation::identity(int n) {
  if (n < 1) throw std::invalid_argument("EntryPermutation: side must be positive");
  return EntryPermutation(n, PermKind::Identity);
}

EntryPermutation EntryPermutation::transpose(int n) {
  if (n < 1) throw std::invalid_argument("EntryPermutation: side must be positive");
  return EntryPermutation(n, PermKind::Transpose);
}

EntryPermutation EntryPermutation::explicit_table(int n, std::vector<std::uint32_t> cells) {
  if (n < 1) throw std::invalid_argument("EntryPermutation: side must be positive");
  const std::size_t size = static_cast<std::size_t>(n) * n;
  if (cells.size() != size) {
    throw std::invalid_argument("EntryPermutation: table size mismatch");
  }
  std::vector<std::uint32_t> inverse(size, size);
  for (std::size_t c = 0; c < size; ++c) {
    const std::uint32_t t = cells[c];
    if (t >= size || inverse[t] != size) {
      throw std::invalid_argument("EntryPermutation: table is not a bijection");
    }
    inverse[t] = static_cast<std::uint32_t>(c);
  }
  EntryPermutation p(n, PermKind::Explicit);
  p.table_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(cells));
  p.inverse_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(inverse));
  return p;
}

EntryPermutation EntryPermutation::transpose_conjugate(EntryPermutation inner) {
  EntryPermutation p(inner.side(), PermKind::TransposeConjugate);
  p.inner_ = std::make_shared<const EntryPermutation>(std::move(inner));
  return p;
}

Cell EntryPermutation::apply(int i, int j) const {
  check_range(n_, i, j);
  switch (kind_) {
    case PermKind::Identity:
      return {i, j};
    case PermKind::Transpose:
      return {j, i};
    case PermKind::Explicit: {
      const std::uint32_t t = (*table_)[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
      return {static_cast<int>(t) / n_ + 1, static_cast<int>(t) % n_ + 1};
    }
    case PermKind::TransposeConjugate: {
      const Cell c = inner_->apply(j, i);
      return {c.j, c.i};
    }
  }
  throw std::logic_error("EntryPermutation: bad kind");
}

Cell EntryPermutation::apply_inverse(int i, int j) const {
  check_range(n_, i, j);
  switch (kind_) {
    case PermKind::Identity:
      return {i, j};
    case PermKind::Transpose:
      return {j, i};
    case PermKind::Explicit: {
      const std::uint32_t t = (*inverse_)[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
      return {static_cast<int>(t) / n_ + 1, static_cast<int>(t) % n_ + 1};
    }
    case PermKind::TransposeConjugate: {
      // (T s T)^-1 = T s^-1 T
      const Cell c = inner_->apply_inverse(j, i);
      return {c.j, c.i};
    }
  }
  throw std::logic_error("EntryPermutation: bad kind");
}

std::vector<std::uint32_t> EntryPermutation::dense_table() const {
  const std::size_t size = static_cast<std::size_t>(n_) * n_;
  if (kind_ == PermKind::Explicit) return *table_;
  std::vector<std::uint32_t> out(size);
  for (int i = 1; i <= n_; ++i) {
    for (int j = 1; j <= n_; ++j) {
      const Cell c = apply(i, j);
      out[static_cast<std::size_t>(i - 1) * n_ + (j - 1)] =
          static_cast<std::uint32_t>((c.i - 1) * n_ + (c.j - 1));
    }
  }
  return out;
}

std::vector<std::uint32_t> EntryPermutation::dense_inverse() const {
  const std::size_t size = static_cast<std::size_t>(n_) * n_;
  if (kind_ == PermKind::Explicit) return *inverse_;
  std::vector<std::uint32_t> out(size);
  for (int i = 1; i <= n_; ++i) {
    for (int j = 1; j <= n_; ++j) {
      const Cell c = apply_inverse(i, j);
      out[static_cast<std::size_t>(i - 1) * n_ + (j - 1)] =
          static_cast<std::uint32_t>((c.i - 1) * n_ + (c.j - 1));
    }
  }
  return out;
}

nlohmann::json EntryPermutation::to_json() const {
  nlohmann::json j;
  j["schema"] = "v1";
  j["n"] = n_;
  j["cells"] = dense_table();  // row-major, 0-based flat target per source cell
  return j;
}

EntryPermutation EntryPermutation::from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  auto cells = j.at("cells").get<std::vector<std::uint32_t>>();
  return explicit_table(n, std::move(cells));
}

std::string EntryPermutation::describe() const {
  switch (kind_) {
    case PermKind::Identity:
      return "id";
    case PermKind::Transpose:
      return "t";
    case PermKind::Explicit:
      return "explicit";
    case PermKind::TransposeConjugate:
      return "tct(" + inner_->describe() + ")";
  }
  return "?";
}

EntryPermutation sample_uniform(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_uniform: side must be positive");
  const std::size_t size = static_cast<std::size_t>(n) * n;
  std::vector<std::uint32_t> cells(size);
  std::iota(cells.begin(), cells.end(), 0u);
  Prng g = Prng::stream(seed, {kStreamPermutation, static_cast<std::uint64_t>(n)});
  for (std::size_t i = size - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(g.below(i + 1));
    std::swap(cells[i], cells[j]);
  }
  return EntryPermutation::explicit_table(n, std::move(cells));
}

double StatReport::normalized() const { return static_cast<double>(raw) / std::pow(n, exponent); }

std::string StatReport::csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%d,%llu,%lld,%g,%.17g", kind.c_str(), n,
                static_cast<unsigned long long>(seed), raw, exponent, normalized());
  return buf;
}

namespace {

void check_same_side(std::initializer_list<const EntryPermutation*> ps) {
  int n = -1;
  for (const auto* p : ps) {
    if (n < 0) n = p->side();
    if (p->side() != n) throw std::invalid_argument("statistic: permutations have mixed N");
  }
}

}  // namespace

StatReport stat_transpose_fixed(const EntryPermutation& s) {
  const int n = s.side();
  const auto tab = s.dense_table();
  long long count = 0;
  for (std::uint32_t c = 0; c < tab.size(); ++c) {
    if (tab[c] == transpose_flat(tab[transpose_flat(c, n)], n)) ++count;
  }
  return {"transpose-fixed", n, 0, count, 1.0};
}

StatReport stat_row_sup(const EntryPermutation& s) {
  const int n = s.side();
  const auto tab = s.dense_table();
  const auto inv = s.dense_inverse();
  long long sup = 0;
  for (int i = 0; i < n; ++i) {
    long long count = 0;
    for (int j = 0; j < n; ++j) {
      // s(i,j) = T(s(j,k)) determines (j,k) through the inverse.
      const std::uint32_t pre = inv[transpose_flat(tab[i * n + j], n)];
      if (static_cast<int>(pre) / n == j) ++count;
      // The companion coincidence s(i,j) = s(k,j) forces k = i for any
      // bijection, so its nontrivial (k != i) solution set is empty.
    }
    sup = std::max(sup, count);
  }
  return {"row-sup", n, 0, sup, 0.5};
}

StatReport stat_quad_cycle(const EntryPermutation& s1, const EntryPermutation& s2,
                           const EntryPermutation& s3, const EntryPermutation& s4) {
  check_same_side({&s1, &s2, &s3, &s4});
  const int n = s1.side();
  const auto t1 = s1.dense_table();
  const auto t2 = s2.dense_table();
  const auto t4 = s4.dense_table();
  const auto i3 = s3.dense_inverse();
  long long count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::uint32_t kl = i3[transpose_flat(t1[i * n + j], n)];
      const int k = static_cast<int>(kl) / n;
      const int l = static_cast<int>(kl) % n;
      if (t2[j * n + k] == transpose_flat(t4[l * n + i], n)) ++count;
    }
  }
  return {"quad-cycle", n, 0, count, 2.0};
}

StatReport stat_hex(const EntryPermutation& s1, const EntryPermutation& s2,
                    const EntryPermutation& s3, const EntryPermutation& s4) {
  check_same_side({&s1, &s2, &s3, &s4});
  const int n = s1.side();
  const auto t1 = s1.dense_table();
  const auto t2 = s2.dense_table();
  const auto i3 = s3.dense_inverse();
  const auto i4 = s4.dense_inverse();
  long long count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::uint32_t kl = i3[transpose_flat(t1[i * n + j], n)];
      const int k = static_cast<int>(kl) / n;
      for (int a = 0; a < n; ++a) {
        const std::uint32_t bi = i4[transpose_flat(t2[a * n + k], n)];
        if (static_cast<int>(bi) % n == i) ++count;
      }
    }
  }
  return {"hex", n, 0, count, 3.0};
}

std::string lemma_stat_name(LemmaStat kind) {
  switch (kind) {
    case LemmaStat::L33ii: return "L33ii";
    case LemmaStat::L42i: return "L42i";
    case LemmaStat::L42ii: return "L42ii";
    case LemmaStat::L43i: return "L43i";
    case LemmaStat::L43ii: return "L43ii";
    case LemmaStat::L44i: return "L44i";
    case LemmaStat::L44ii: return "L44ii";
    case LemmaStat::L45: return "L45";
  }
  throw std::invalid_argument("lemma_stat_name: unknown kind");
}

AuxMaps AuxMaps::defaults() {
  AuxMaps m;
  m.cell_to_index = [](int i, int) { return i; };
  m.f = [](int i, int j) { return Cell{i, j}; };
  m.g = [](int i, int j) { return Cell{j, i}; };
  m.phi3 = [](int i, int, int a) { return Cell{a, i}; };
  m.psi3 = [](int i, int, int b) { return Cell{b, i}; };
  return m;
}

namespace {

void need_perms(const std::vector<EntryPermutation>& perms, std::size_t count,
                const char* kind) {
  if (perms.size() != count) {
    throw std::invalid_argument(std::string(kind) + ": wrong number of permutations");
  }
  int n = perms.front().side();
  for (const auto& p : perms) {
    if (p.side() != n) throw std::invalid_argument(std::string(kind) + ": mixed N");
  }
}

// L43ii hypothesis: phi3(i,j,a) = phi3(i',j',a') and psi3(i,j,b) = psi3(i',j',b')
// forces (i,a,b) = (i',a',b'). Verified exhaustively for small N only.
std::optional<bool> check_l43ii_hypothesis(int n, const AuxMaps& aux) {
  if (n > 24) return std::nullopt;
  struct Triple {
    int i, j, a;
  };
  std::unordered_map<std::uint64_t, std::vector<Triple>> by_phi;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int a = 1; a <= n; ++a) {
        const Cell c = aux.phi3(i, j, a);
        by_phi[static_cast<std::uint64_t>(c.i) << 32 | static_cast<std::uint32_t>(c.j)]
            .push_back({i, j, a});
      }
    }
  }
  for (const auto& [key, triples] : by_phi) {
    (void)key;
    for (std::size_t x = 0; x < triples.size(); ++x) {
      for (std::size_t y = x; y < triples.size(); ++y) {
        const Triple& t = triples[x];
        const Triple& u = triples[y];
        // Compare psi rows of (t.i,t.j) and (u.i,u.j).
        std::unordered_map<std::uint64_t, std::vector<int>> psi_t;
        for (int b = 1; b <= n; ++b) {
          const Cell c = aux.psi3(t.i, t.j, b);
          psi_t[static_cast<std::uint64_t>(c.i) << 32 | static_cast<std::uint32_t>(c.j)]
              .push_back(b);
        }
        for (int b2 = 1; b2 <= n; ++b2) {
          const Cell c = aux.psi3(u.i, u.j, b2);
          const auto it =
              psi_t.find(static_cast<std::uint64_t>(c.i) << 32 | static_cast<std::uint32_t>(c.j));
          if (it == psi_t.end()) continue;
          for (int b1 : it->second) {
            if (t.i != u.i || t.a != u.a || b1 != b2) return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace

LemmaStatResult stat_lemma_family(LemmaStat kind, const std::vector<EntryPermutation>& perms,
                                  const AuxMaps& aux) {
  LemmaStatResult result;
  switch (kind) {
    case LemmaStat::L33ii: {
      need_perms(perms, 2, "L33ii");
      const int n = perms[0].side();
      const auto ts = perms[0].dense_table();
      const auto i1 = perms[1].dense_inverse();
      long long count = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const std::uint32_t img = ts[i * n + j];
          const int u = aux.cell_to_index(static_cast<int>(img) / n + 1,
                                          static_cast<int>(img) % n + 1) - 1;
          for (int a = 0; a < n; ++a) {
            const std::uint32_t bi = i1[transpose_flat(ts[a * n + u], n)];
            if (static_cast<int>(bi) % n == i) ++count;
          }
        }
      }
      result.report = {"L33ii", n, 0, count, 3.0};
      return result;
    }
    case LemmaStat::L42i: {
      need_perms(perms, 2, "L42i");
      const int n = perms[0].side();
      const auto tw = perms[0].dense_table();
      const auto ts = perms[1].dense_table();
      long long count = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (tw[i * n + j] == ts[j * n + i]) ++count;
        }
      }
      result.report = {"L42i", n, 0, count, 1.0};
      return result;
    }
    case LemmaStat::L42ii: {
      need_perms(perms, 2, "L42ii");
      const int n = perms[0].side();
      const auto tw = perms[0].dense_table();
      const auto is = perms[1].dense_inverse();
      long long sup = 0;
      for (int i = 0; i < n; ++i) {
        long long count = 0;
        for (int j = 0; j < n; ++j) {
          const std::uint32_t pre = is[tw[i * n + j]];
          if (static_cast<int>(pre) / n == j) ++count;
        }
        sup = std::max(sup, count);
      }
      result.report = {"L42ii", n, 0, sup, 0.5};
      return result;
    }
    case LemmaStat::L43i: {
      need_perms(perms, 1, "L43i");
      const int n = perms[0].side();
      long long count = 0;
      for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          const Cell fc = aux.f(i, j);
          const Cell gc = aux.g(i, j);
          if (perms[0].apply(fc.i, fc.j) == gc) ++count;
        }
      }
      result.report = {"L43i", n, 0, count, 2.0};
      return result;
    }
    case LemmaStat::L43ii: {
      need_perms(perms, 1, "L43ii");
      const int n = perms[0].side();
      long long count = 0;
      std::vector<int> bucket(static_cast<std::size_t>(n) * n, 0);
      std::vector<std::uint32_t> touched;
      for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          touched.clear();
          for (int b = 1; b <= n; ++b) {
            const Cell c = aux.psi3(i, j, b);
            const std::uint32_t flat = static_cast<std::uint32_t>((c.i - 1) * n + (c.j - 1));
            if (bucket[flat]++ == 0) touched.push_back(flat);
          }
          for (int a = 1; a <= n; ++a) {
            const Cell c = aux.phi3(i, j, a);
            const Cell img = perms[0].apply(c.i, c.j);
            count += bucket[static_cast<std::uint32_t>((img.i - 1) * n + (img.j - 1))];
          }
          for (std::uint32_t flat : touched) bucket[flat] = 0;
        }
      }
      result.report = {"L43ii", n, 0, count, 3.0};
      result.hypothesis_holds = check_l43ii_hypothesis(n, aux);
      return result;
    }
    case LemmaStat::L44i: {
      need_perms(perms, 2, "L44i");
      const int n = perms[0].side();
      long long count = 0;
      for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          const Cell fc = aux.f(i, j);
          const Cell gc = aux.g(i, j);
          if (fc == gc) continue;
          const Cell lhs = perms[0].apply(fc.i, fc.j);
          const Cell rhs = perms[0].apply(gc.i, gc.j);
          if (lhs == perms[1].apply(rhs.i, rhs.j)) ++count;
        }
      }
      result.report = {"L44i", n, 0, count, 2.0};
      return result;
    }
    case LemmaStat::L44ii: {
      need_perms(perms, 3, "L44ii");
      const int n = perms[0].side();
      const auto ts = perms[0].dense_table();
      const auto is = perms[0].dense_inverse();
      const auto iw = perms[1].dense_inverse();
      const auto ie = perms[2].dense_inverse();
      long long count = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const int u = aux.cell_to_index(i + 1, j + 1) - 1;
          for (int a = 0; a < n; ++a) {
            // omega(b,i) = s^-1(eta^-1(s(a,u))) determines (b,i').
            const std::uint32_t e = is[ie[ts[a * n + u]]];
            const std::uint32_t bi = iw[e];
            if (static_cast<int>(bi) % n != i) continue;
            if (e != static_cast<std::uint32_t>(a * n + u)) ++count;
          }
        }
      }
      result.report = {"L44ii", n, 0, count, 3.0};
      return result;
    }
    case LemmaStat::L45: {
      need_perms(perms, 4, "L45");
      const int n = perms[0].side();
      const auto ts = perms[0].dense_table();
      const auto i1 = perms[1].dense_inverse();
      const auto i2 = perms[2].dense_inverse();
      const auto tw = perms[3].dense_table();
      long long count = 0;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const std::uint32_t e = tw[k * n + l];
          const std::uint32_t ij = i2[ts[e]];
          const int i = static_cast<int>(ij) / n;
          for (int a = 0; a < n; ++a) {
            if (static_cast<std::uint32_t>(a * n + k) == e) continue;
            const std::uint32_t bi = i1[ts[a * n + k]];
            if (static_cast<int>(bi) % n == i) ++count;
          }
        }
      }
      result.report = {"L45", n, 0, count, 3.0};
      return result;
    }
  }
  throw std::invalid_argument("stat_lemma_family: unknown kind");
}

}  // namespace infwick
