#pragma once

// Shared fixtures and independent oracles.  The oracles recompute signs,
// ranks and transforms from first principles with different algorithms than
// the library, so agreement between the two is evidence, not tautology.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tgd/algebra.hpp"
#include "tgd/error.hpp"
#include "tgd/linalg.hpp"
#include "tgd/scenario.hpp"
#include "tgd/tduality.hpp"
#include "tgd/transgressive.hpp"

namespace tgdtest {

using tgd::BaseElement;
using tgd::CDGAPtr;
using tgd::Mask;
using tgd::ModelPtr;
using tgd::Scalar;
using tgd::TCElement;

inline std::string scenario_path(const std::string& name) {
  return std::string(TGD_SCENARIO_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline tgd::ParsedScenario load_fixture(const std::string& name) {
  return tgd::parse_scenario(read_file(scenario_path(name)));
}

// ---------------------------------------------------------------------------
// Sign oracle: literal bubble sort of odd factor sequences.

inline std::vector<int> mask_positions(Mask m) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (m >> i & 1) out.push_back(i);
  return out;
}

// Number of adjacent swaps needed to sort; no closed form on purpose.
inline int sort_swaps(std::vector<int> word) {
  int swaps = 0;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
      if (word[i] > word[i + 1]) {
        std::swap(word[i], word[i + 1]);
        ++swaps;
        moved = true;
      }
  }
  return swaps;
}

// Sign of the wedge (psi_S (x) a)(psi_T (x) b): concatenate the factor
// sequence S ++ [a] ++ T ++ [b], move a past the odd block T one factor at
// a time, then sort S ++ T by adjacent swaps.  Zero overlap is required.
inline int wedge_sign_oracle(Mask s, Mask t, int deg_a) {
  std::vector<int> left = mask_positions(s), right = mask_positions(t);
  int swaps = (deg_a % 2) * int(right.size());
  std::vector<int> joined = left;
  joined.insert(joined.end(), right.begin(), right.end());
  swaps += sort_swaps(std::move(joined));
  return swaps % 2 == 0 ? 1 : -1;
}

// Sign of rewriting psi_S as psi_{S minus T} times psi_T with the block T
// pulled out on the right, then moving the block past a coefficient of
// degree deg_a: parity of literally sorting the rearranged word back, plus
// one crossing per extracted factor when the coefficient is odd.
inline int extract_right_sign_oracle(Mask s, Mask t, int deg_a) {
  std::vector<int> word = mask_positions(s & ~t);
  std::vector<int> tail = mask_positions(t);
  word.insert(word.end(), tail.begin(), tail.end());
  int swaps = sort_swaps(std::move(word));
  swaps += int(tail.size()) * (deg_a % 2);
  return swaps % 2 == 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Rank and determinant oracle: fraction-free Bareiss elimination on long
// long entries.  Only safe for small integer matrices; that is all the
// tests feed it.

struct IntMatrix {
  int rows = 0, cols = 0;
  std::vector<long long> a;
  IntMatrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0) {}
  long long& at(int r, int c) { return a[std::size_t(r) * cols + c]; }
  long long at(int r, int c) const { return a[std::size_t(r) * cols + c]; }
};

struct BareissResult {
  int rank = 0;
  long long det = 0;  // meaningful for square input only
};

inline BareissResult bareiss(IntMatrix m) {
  BareissResult out;
  long long prev = 1;
  int sign = 1;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int pivot = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != r) {
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(pivot, j), m.at(r, j));
      sign = -sign;
    }
    for (int i = r + 1; i < m.rows; ++i) {
      for (int j = c + 1; j < m.cols; ++j)
        m.at(i, j) = (m.at(r, c) * m.at(i, j) - m.at(i, c) * m.at(r, j)) / prev;
      m.at(i, c) = 0;
    }
    prev = m.at(r, c);
    ++r;
  }
  out.rank = r;
  if (m.rows == m.cols)
    out.det = (r == m.rows) ? sign * prev : 0;
  return out;
}

// ---------------------------------------------------------------------------
// Standard in-test models.

// Exterior algebra on three degree-1 forms with the three interior
// products; the workhorse base for vector-field tests.
inline CDGAPtr torus3_base() {
  tgd::CDGABuilder b;
  b.element("one", 0);
  b.element("th1", 1).element("th2", 1).element("th3", 1);
  b.element("th12", 2).element("th13", 2).element("th23", 2);
  b.element("th123", 3);
  b.unit("one");
  b.product("th1", "th2", {{"th12", 1}});
  b.product("th1", "th3", {{"th13", 1}});
  b.product("th2", "th3", {{"th23", 1}});
  b.product("th1", "th23", {{"th123", 1}});
  b.product("th2", "th13", {{"th123", -1}});
  b.product("th3", "th12", {{"th123", 1}});
  b.contraction("i1", {{"th1", {{"one", 1}}},
                       {"th12", {{"th2", 1}}},
                       {"th13", {{"th3", 1}}},
                       {"th123", {{"th23", 1}}}});
  b.contraction("i2", {{"th2", {{"one", 1}}},
                       {"th12", {{"th1", -1}}},
                       {"th23", {{"th3", 1}}},
                       {"th123", {{"th13", -1}}}});
  b.contraction("i3", {{"th3", {{"one", 1}}},
                       {"th13", {{"th1", -1}}},
                       {"th23", {{"th2", -1}}},
                       {"th123", {{"th12", 1}}}});
  return b.build();
}

inline CDGAPtr point_base() {
  tgd::CDGABuilder b;
  b.element("one", 0);
  b.unit("one");
  return b.build();
}

// Same exterior algebra with d th3 = th12: the invariant forms of the
// Heisenberg group, so the frame vector fields no longer commute.
inline CDGAPtr heisenberg_base() {
  tgd::CDGABuilder b;
  b.element("one", 0);
  b.element("th1", 1).element("th2", 1).element("th3", 1);
  b.element("th12", 2).element("th13", 2).element("th23", 2);
  b.element("th123", 3);
  b.unit("one");
  b.product("th1", "th2", {{"th12", 1}});
  b.product("th1", "th3", {{"th13", 1}});
  b.product("th2", "th3", {{"th23", 1}});
  b.product("th1", "th23", {{"th123", 1}});
  b.product("th2", "th13", {{"th123", -1}});
  b.product("th3", "th12", {{"th123", 1}});
  b.differential("th3", {{"th12", 1}});
  b.contraction("i1", {{"th1", {{"one", 1}}},
                       {"th12", {{"th2", 1}}},
                       {"th13", {{"th3", 1}}},
                       {"th123", {{"th23", 1}}}});
  b.contraction("i2", {{"th2", {{"one", 1}}},
                       {"th12", {{"th1", -1}}},
                       {"th23", {{"th3", 1}}},
                       {"th123", {{"th13", -1}}}});
  b.contraction("i3", {{"th3", {{"one", 1}}},
                       {"th13", {{"th1", -1}}},
                       {"th23", {{"th2", -1}}},
                       {"th123", {{"th12", 1}}}});
  return b.build();
}

// n degree-1 generators, zero transgression, over the given base.
inline ModelPtr free_odd_model(const CDGAPtr& base, int n, const std::string& prefix) {
  std::vector<tgd::OddGenerator> gens;
  for (int i = 0; i < n; ++i) {
    tgd::OddGenerator g;
    g.label = prefix + std::to_string(i + 1);
    g.degree = 1;
    g.transgression = BaseElement(base);
    gens.push_back(std::move(g));
  }
  return tgd::make_model(base, gens);
}

// Volume form on the 3-torus base, lifted to the model.
inline TCElement volume_flux(const ModelPtr& m) {
  return TCElement::from_base(m, BaseElement::basis(m->base, m->base->index_of("th123")));
}

// Nilmanifold circle pair: dpsi = th12 upstairs, trivial circle with the
// matching twist downstairs.  T-dual by the checks.
inline tgd::DualityScenario nilmanifold_pair() {
  CDGAPtr base = [] {
    tgd::CDGABuilder b;
    b.element("one", 0);
    b.element("th1", 1).element("th2", 1);
    b.element("th12", 2);
    b.unit("one");
    b.product("th1", "th2", {{"th12", 1}});
    b.contraction("i1", {{"th1", {{"one", 1}}}, {"th12", {{"th2", 1}}}});
    b.contraction("i2", {{"th2", {{"one", 1}}}, {"th12", {{"th1", -1}}}});
    return b.build();
  }();
  std::vector<tgd::OddGenerator> up(1), down(1);
  up[0].label = "psi";
  up[0].degree = 1;
  up[0].transgression = BaseElement::basis(base, base->index_of("th12"));
  down[0].label = "psih";
  down[0].degree = 1;
  down[0].transgression = BaseElement(base);
  ModelPtr e = tgd::make_model(base, up);
  ModelPtr ehat = tgd::make_model(base, down);
  tgd::Correspondence corr = tgd::make_correspondence(e, ehat);
  TCElement h(e);
  TCElement hhat = TCElement::monomial(
      ehat, 1, BaseElement::basis(base, base->index_of("th12")));
  TCElement f = -TCElement::monomial(corr.total, 0b11, BaseElement::unit(base));
  return tgd::make_scenario("nilmanifold", e, ehat, h, hhat, f);
}

// ---------------------------------------------------------------------------
// Brute-force duality transform: expand exp(F) wedge pullback(x) term by
// term with the sign oracles above, then extract the left block on the
// right.  Coefficients are kept parity-homogeneous throughout so every
// crossing sign is exact.

namespace detail {

// (mask, coefficient parity) -> parity-homogeneous coefficient.
using PTerms = std::map<std::pair<Mask, int>, BaseElement>;

inline void add_into(PTerms& m, std::pair<Mask, int> key, const BaseElement& v) {
  auto [it, fresh] = m.try_emplace(key, v);
  if (!fresh) it->second += v;
  if (it->second.is_zero()) m.erase(it);
}

inline PTerms parity_split(const std::map<Mask, BaseElement>& comps, const CDGAPtr& base) {
  PTerms out;
  for (const auto& [mask, coeff] : comps)
    for (int p : {0, 1}) {
      BaseElement part(base);
      for (const auto& [i, c] : coeff.terms())
        if (base->degree(i) % 2 == p) part.add_term(i, c);
      if (!part.is_zero()) out.emplace(std::pair{mask, p}, std::move(part));
    }
  return out;
}

inline PTerms oracle_wedge(const PTerms& a, const PTerms& b) {
  PTerms out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      if (ka.first & kb.first) continue;
      BaseElement prod = ca * cb;
      if (prod.is_zero()) continue;
      int sign = wedge_sign_oracle(ka.first, kb.first, ka.second);
      add_into(out, {ka.first | kb.first, (ka.second + kb.second) % 2},
               Scalar(sign) * prod);
    }
  return out;
}

}  // namespace detail

inline TCElement tau_oracle(const tgd::DualityScenario& s, const TCElement& x) {
  const tgd::Correspondence& corr = s.corr;
  const CDGAPtr& base = corr.total->base;
  const int nl = corr.n_left;
  const Mask left_block = (Mask{1} << nl) - 1;

  detail::PTerms f = detail::parity_split(s.f.components(), base);
  detail::PTerms ef{{{Mask{0}, 0}, BaseElement::unit(base)}};
  detail::PTerms power = ef;
  Scalar factorial(1);
  for (int k = 1; k <= 2 * corr.total->n() && !power.empty(); ++k) {
    power = detail::oracle_wedge(power, f);
    factorial = factorial * Scalar(k);
    for (const auto& [key, coeff] : power)
      detail::add_into(ef, key, (Scalar(1) / factorial) * coeff);
  }

  // The pullback of x keeps its masks: left generators occupy the low bits
  // of the joint model.
  detail::PTerms product = detail::oracle_wedge(ef, detail::parity_split(x.components(), base));

  TCElement out(corr.right);
  for (const auto& [key, coeff] : product) {
    Mask mask = key.first;
    if ((mask & left_block) != left_block) continue;
    int sign = extract_right_sign_oracle(mask, left_block, key.second);
    out.add_term(mask >> nl, Scalar(sign) * coeff);
  }
  return out;
}

}  // namespace tgdtest
