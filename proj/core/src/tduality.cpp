#include "tgd/tduality.hpp"

#include <algorithm>
#include <bit>

#include "tgd/error.hpp"

namespace tgd {

namespace {

std::vector<Scalar> base_coords(const CDGAPtr& base, const BaseElement& x) {
  std::vector<Scalar> v(std::size_t(base->dim()), Scalar(0));
  for (const auto& [i, c] : x.terms()) v[std::size_t(i)] = c;
  return v;
}

BaseElement base_from_coords(const CDGAPtr& base, const std::vector<Scalar>& v) {
  BaseElement x(base);
  for (int i = 0; i < base->dim(); ++i) x.add_term(i, v[std::size_t(i)]);
  return x;
}

QMatrix differential_matrix(const CDGAPtr& base) {
  int n = base->dim();
  QMatrix d(n, n);
  for (int col = 0; col < n; ++col)
    for (const auto& [row, c] : base->differential[std::size_t(col)]) d.at(row, col) = c;
  return d;
}

QMatrix multiplication_matrix(const CDGAPtr& base, const BaseElement& x) {
  int n = base->dim();
  QMatrix m(n, n);
  for (int col = 0; col < n; ++col) {
    BaseElement y = x * BaseElement::basis(base, col);
    for (const auto& [row, c] : y.terms()) m.at(row, col) = c;
  }
  return m;
}

BaseElement scaled_unit(const CDGAPtr& base, const Scalar& s) {
  return s * BaseElement::unit(base);
}

void require_odd_closed(const TCElement& x, const ModelPtr& m, const char* what) {
  if (x.is_zero()) return;
  if (!same_model(x.model(), m)) fail_input(std::string(what) + " lives over the wrong model");
  if (!x.even_part().is_zero()) fail_input(std::string(what) + " must be odd");
  if (!x.d().is_zero()) fail_input(std::string(what) + " must be closed");
}

}  // namespace

DualityScenario make_scenario(std::string name, ModelPtr e, ModelPtr ehat, TCElement h,
                              TCElement hhat, TCElement f) {
  DualityScenario s;
  s.name = std::move(name);
  s.e = std::move(e);
  s.ehat = std::move(ehat);
  s.corr = make_correspondence(s.e, s.ehat);
  require_odd_closed(h, s.e, "twist");
  require_odd_closed(hhat, s.ehat, "dual twist");
  if (!f.is_zero()) {
    if (!same_model(f.model(), s.corr.total)) fail_input("kernel must live over the correspondence");
    if (!f.odd_part().is_zero()) fail_input("kernel must be even");
  }
  s.h = h.is_zero() ? TCElement(s.e) : std::move(h);
  s.hhat = hhat.is_zero() ? TCElement(s.ehat) : std::move(hhat);
  s.f = f.is_zero() ? TCElement(s.corr.total) : std::move(f);
  return s;
}

DualityScenario swapped(const DualityScenario& s) {
  int nl = s.corr.n_left;
  int nr = s.ehat->n();
  Mask lmask = nl == 0 ? 0u : (Mask(1) << nl) - 1u;
  DualityScenario r;
  r.name = s.name + "-swapped";
  r.e = s.ehat;
  r.ehat = s.e;
  r.corr = make_correspondence(r.e, r.ehat);
  r.h = s.hhat;
  r.hhat = s.h;
  TCElement f(r.corr.total);
  for (const auto& [m, a] : s.f.components()) {
    Mask sl = m & lmask, sr = m >> nl;
    bool reorder = (std::popcount(sl) * std::popcount(sr)) & 1;
    // overall minus, times the cost of moving the two word blocks past
    // each other
    f.add_term(sr | (sl << nr), reorder ? a : -a);
  }
  r.f = std::move(f);
  return r;
}

GerbeResult check_gerbe_trivialization(const DualityScenario& s) {
  GerbeResult r;
  r.residual = s.f.d() - s.corr.pullback_left(s.h) + s.corr.pullback_right(s.hhat);
  r.ok = r.residual.is_zero();
  return r;
}

KernelParts extract_kernel_parts(const DualityScenario& s) {
  KernelParts parts;
  parts.f_e = TCElement(s.e);
  parts.f_ehat = TCElement(s.ehat);
  int nl = s.corr.n_left;
  Mask lmask = nl == 0 ? 0u : (Mask(1) << nl) - 1u;
  const CDGAPtr& base = s.corr.total->base;
  for (const auto& [m, a] : s.f.components()) {
    BaseElement a0 = a.homogeneous_component(0);
    if (a0.is_zero()) continue;
    for (const auto& [i, c] : a0.terms())
      if (i != base->unit) fail_input("degree 0 part is not spanned by the unit");
    Scalar c = a0.coefficient(base->unit);
    Mask left = m & lmask, right = m >> nl;
    if (right == 0) {
      parts.f_e.add_term(left, scaled_unit(s.e->base, c));
    } else if (left == 0) {
      parts.f_ehat.add_term(right, scaled_unit(s.ehat->base, c));
    } else {
      parts.mixed[{left, right}] = c;
    }
  }
  return parts;
}

NondegeneracyResult check_nondegeneracy(const DualityScenario& s) {
  NondegeneracyResult r;
  int n = s.e->n(), nh = s.ehat->n();
  KernelParts parts = extract_kernel_parts(s);
  TCElement fm(s.corr.total);
  BaseElement one = BaseElement::unit(s.corr.total->base);
  for (const auto& [ij, c] : parts.mixed)
    fm.add_term(ij.first | (ij.second << s.corr.n_left), c * one);
  TCElement ef = exp_wedge(fm);
  r.matrix = QMatrix(1 << nh, 1 << n);
  for (Mask i = 0; i < Mask(1) << n; ++i) {
    TCElement y = s.corr.integrate_left(ef * TCElement::monomial(s.corr.total, i, one));
    for (const auto& [j, b] : y.components())
      r.matrix.at(int(j), int(i)) = b.coefficient(s.ehat->base->unit);
  }
  if (n != nh) {
    r.structural_failure = true;
    r.note = "generator counts differ (" + std::to_string(n) + " vs " + std::to_string(nh) +
             "), so the fiber map cannot be bijective";
    r.ok = false;
    return r;
  }
  r.ok = inverse(r.matrix).has_value();
  return r;
}

ShortcutResult quadratic_shortcut(const DualityScenario& s) {
  ShortcutResult r;
  KernelParts parts = extract_kernel_parts(s);
  for (const auto& [ij, c] : parts.mixed)
    if (std::popcount(ij.first) != 1 || std::popcount(ij.second) != 1) return r;
  int n = s.e->n(), nh = s.ehat->n();
  r.pairing = QMatrix(n, nh);
  for (const auto& [ij, c] : parts.mixed)
    r.pairing.at(std::countr_zero(ij.first), std::countr_zero(ij.second)) = c;
  if (n != nh) {
    r.verdict = ShortcutVerdict::Singular;
    return r;
  }
  r.verdict = is_zero(determinant(r.pairing)) ? ShortcutVerdict::Singular
                                              : ShortcutVerdict::Invertible;
  return r;
}

TCElement tau_transform(const DualityScenario& s, const TCElement& x) {
  if (!x.is_zero() && !same_model(x.model(), s.e))
    fail_input("transform expects an element over the first model");
  if (x.is_zero()) return TCElement(s.ehat);
  TCElement ef = exp_wedge(s.f);
  return s.corr.integrate_left(ef * s.corr.pullback_left(x));
}

QMatrix tau_matrix(const DualityScenario& s) {
  ComplexIndexing ce(s.e), ch(s.ehat);
  TCElement ef = exp_wedge(s.f);
  QMatrix m(ch.size, ce.size);
  for (int col = 0; col < ce.size; ++col) {
    TCElement y = s.corr.integrate_left(ef * s.corr.pullback_left(ce.element(col)));
    std::vector<Scalar> v = ch.coords(y);
    for (int row = 0; row < ch.size; ++row) m.at(row, col) = v[std::size_t(row)];
  }
  return m;
}

bool tau_invertible(const DualityScenario& s) {
  QMatrix m = tau_matrix(s);
  if (m.rows() != m.cols()) return false;
  return inverse(m).has_value();
}

ChainMapResult verify_chain_map(const DualityScenario& s) {
  ChainMapResult r;
  ComplexIndexing ce(s.e);
  TCElement ef = exp_wedge(s.f);
  auto tau = [&](const TCElement& x) {
    return s.corr.integrate_left(ef * s.corr.pullback_left(x));
  };
  for (int idx = 0; idx < ce.size; ++idx) {
    TCElement b = ce.element(idx);
    if (!(tau(twisted_d(s.h, b)) == twisted_d(s.hhat, tau(b)))) {
      r.ok = false;
      r.witness = b;
      return r;
    }
  }
  r.ok = true;
  return r;
}

// ---------------------------------------------------------------------------
// Change of generating sets

ChangedModel change_generating_set(const ModelPtr& m, const GeneratorChange& g) {
  if (!m) fail_input("change of generators on a null model");
  int n = m->n();
  if (!g.corrections.empty() && int(g.corrections.size()) != n)
    fail_input("expected one correction per generator (or none at all)");

  std::map<int, std::vector<int>> by_degree;
  for (int i = 0; i < n; ++i) by_degree[m->gens[std::size_t(i)].degree].push_back(i);
  for (const auto& [deg, block] : g.blocks)
    if (!by_degree.count(deg)) fail_input("block for absent degree " + std::to_string(deg));

  std::map<int, QMatrix> inverses;
  for (const auto& [deg, idxs] : by_degree) {
    auto it = g.blocks.find(deg);
    if (it == g.blocks.end()) fail_input("missing block for degree " + std::to_string(deg));
    const QMatrix& a = it->second;
    if (a.rows() != int(idxs.size()) || a.cols() != int(idxs.size()))
      fail_input("block for degree " + std::to_string(deg) + " has the wrong size");
    auto inv = inverse(a);
    if (!inv) fail_input("block for degree " + std::to_string(deg) + " is singular");
    inverses.emplace(deg, std::move(*inv));
  }

  auto correction = [&](int i) -> TCElement {
    if (g.corrections.empty() || g.corrections[std::size_t(i)].is_zero()) return TCElement(m);
    return g.corrections[std::size_t(i)];
  };
  for (int i = 0; i < n; ++i) {
    TCElement p = correction(i);
    if (p.is_zero()) continue;
    int deg = m->gens[std::size_t(i)].degree;
    if (!same_model(p.model(), m)) fail_input("correction lives over the wrong model");
    if (!p.is_homogeneous() || p.degree() != deg)
      fail_input("correction for '" + m->gens[std::size_t(i)].label +
                 "' must be homogeneous of degree " + std::to_string(deg));
    for (const auto& [mask, a] : p.components())
      for (int j = 0; j < n; ++j)
        if ((mask >> j & 1) && m->gens[std::size_t(j)].degree >= deg)
          fail_input("correction for '" + m->gens[std::size_t(i)].label +
                     "' uses a generator of degree >= " + std::to_string(deg));
    TCElement dp = p.d();
    for (const auto& [mask, a] : dp.components())
      if (mask != 0)
        fail_input("correction for '" + m->gens[std::size_t(i)].label +
                   "' does not have a purely basic differential");
  }

  ChangedModel out;
  out.new_in_old.assign(std::size_t(n), TCElement(m));
  for (const auto& [deg, idxs] : by_degree) {
    const QMatrix& a = g.blocks.at(deg);
    for (std::size_t p = 0; p < idxs.size(); ++p) {
      TCElement v(m);
      for (std::size_t q = 0; q < idxs.size(); ++q)
        v += a.at(int(p), int(q)) * TCElement::generator(m, idxs[q]);
      v += correction(idxs[p]);
      out.new_in_old[std::size_t(idxs[p])] = std::move(v);
    }
  }

  std::vector<OddGenerator> ngens = m->gens;
  for (int i = 0; i < n; ++i) {
    TCElement dt = out.new_in_old[std::size_t(i)].d();
    for (const auto& [mask, a] : dt.components())
      if (mask != 0) fail_internal("new transgression is not purely basic");
    ngens[std::size_t(i)].transgression = dt.basic_component(0);
  }
  out.model = make_model(m->base, std::move(ngens));

  out.old_in_new.assign(std::size_t(n), TCElement(out.model));
  for (const auto& [deg, idxs] : by_degree) {
    const QMatrix& ainv = inverses.at(deg);
    // Corrections only involve lower degrees, already re-expressed when
    // this degree is reached.
    std::vector<TCElement> rewritten(idxs.size());
    for (std::size_t q = 0; q < idxs.size(); ++q) {
      TCElement p = correction(idxs[q]);
      rewritten[q] = p.is_zero() ? TCElement(out.model)
                                 : apply_substitution(p, out.model, out.old_in_new);
    }
    for (std::size_t p = 0; p < idxs.size(); ++p) {
      TCElement v(out.model);
      for (std::size_t q = 0; q < idxs.size(); ++q) {
        const Scalar& c = ainv.at(int(p), int(q));
        if (is_zero(c)) continue;
        v += c * (TCElement::generator(out.model, idxs[q]) - rewritten[q]);
      }
      out.old_in_new[std::size_t(idxs[p])] = std::move(v);
    }
  }
  return out;
}

Scalar change_determinant(const ModelPtr& m, const GeneratorChange& g) {
  std::map<int, std::vector<int>> by_degree;
  for (int i = 0; i < m->n(); ++i) by_degree[m->gens[std::size_t(i)].degree].push_back(i);
  Scalar det = 1;
  for (const auto& [deg, idxs] : by_degree) {
    auto it = g.blocks.find(deg);
    if (it == g.blocks.end()) fail_input("missing block for degree " + std::to_string(deg));
    det *= determinant(it->second);
  }
  return det;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

// Generators in degrees 1, 3, ..., 2n-1 exactly.
void require_frame_shape(const ModelPtr& e) {
  for (int i = 0; i < e->n(); ++i)
    if (e->gens[std::size_t(i)].degree != 2 * i + 1)
      fail_precondition("expected generators of degrees 1, 3, ..., " +
                        std::to_string(2 * e->n() - 1));
}

void require_nonzero(const std::vector<Scalar>& lambda, std::size_t expected) {
  if (lambda.size() != expected)
    fail_precondition("expected " + std::to_string(expected) + " multipliers");
  for (const Scalar& l : lambda)
    if (is_zero(l)) fail_precondition("multipliers must be nonzero");
}

struct OneLeg {
  BaseElement basic;
  std::vector<BaseElement> coeff;  // per generator
};

// Twist split as basic part plus one term per generator; words with two or
// more generators are rejected.
OneLeg one_leg_split(const ModelPtr& e, const TCElement& h, int expected_degree) {
  OneLeg split;
  split.basic = BaseElement(e->base);
  split.coeff.assign(std::size_t(e->n()), BaseElement(e->base));
  if (h.is_zero()) return split;
  if (!same_model(h.model(), e)) fail_input("twist lives over the wrong model");
  if (!h.is_homogeneous() || h.degree() != expected_degree)
    fail_precondition("twist must be homogeneous of degree " + std::to_string(expected_degree));
  for (const auto& [mask, a] : h.components()) {
    if (mask == 0) {
      split.basic = a;
    } else if (std::popcount(mask) == 1) {
      split.coeff[std::size_t(std::countr_zero(mask))] = a;
    } else {
      fail_precondition("twist is not in one-leg form: residual word with " +
                        std::to_string(std::popcount(mask)) + " generators");
    }
  }
  for (const BaseElement& c : split.coeff)
    if (!c.d().is_zero()) fail_precondition("one-leg coefficient is not closed");
  return split;
}

}  // namespace

DualityScenario construct_frame_dual_I(const ModelPtr& e, const TCElement& h,
                                       const std::vector<Scalar>& lambda) {
  if (!e) fail_input("builder needs a model");
  require_frame_shape(e);
  int n = e->n();
  require_nonzero(lambda, std::size_t(n));
  OneLeg split = one_leg_split(e, h, 2 * n + 1);

  // The coefficient of the degree 2j-1 generator transgresses, scaled, to
  // the dual generator of complementary degree.
  std::vector<OddGenerator> dual_gens;
  for (int i = 1; i <= n; ++i) {
    OddGenerator g;
    g.label = "psih" + std::to_string(2 * i - 1);
    g.degree = 2 * i - 1;
    g.transgression = lambda[std::size_t(i - 1)] * split.coeff[std::size_t(n - i)];
    dual_gens.push_back(std::move(g));
  }
  ModelPtr ehat = make_model(e->base, std::move(dual_gens));

  TCElement hhat(ehat);
  for (int i = 1; i <= n; ++i)
    hhat.add_term(Mask(1) << (i - 1),
                  (Scalar(1) / lambda[std::size_t(i - 1)]) *
                      e->gens[std::size_t(n - i)].transgression);
  hhat.add_term(0, split.basic);

  Correspondence corr = make_correspondence(e, ehat);
  TCElement f(corr.total);
  BaseElement one = BaseElement::unit(e->base);
  for (int i = 1; i <= n; ++i)
    f.add_term((Mask(1) << (n - i)) | (Mask(1) << (n + i - 1)),
               (Scalar(-1) / lambda[std::size_t(i - 1)]) * one);

  return make_scenario("frame-dual-I", e, ehat, h, hhat, f);
}

DualityScenario construct_frame_dual_II(const ModelPtr& e, const TCElement& h, int k,
                                        const std::vector<Scalar>& lambda,
                                        const std::vector<BaseElement>& extra_chern) {
  if (!e) fail_input("builder needs a model");
  require_frame_shape(e);
  int n = e->n();
  if (k < 1) fail_precondition("the skipped block must have positive size");
  require_nonzero(lambda, std::size_t(n));  // lambda[m-k-1] for m = k+1..n+k
  if (int(extra_chern.size()) != k)
    fail_precondition("expected " + std::to_string(k) + " low-degree dual representatives");
  for (int i = 1; i <= k; ++i) {
    const BaseElement& c = extra_chern[std::size_t(i - 1)];
    if (c.is_zero()) continue;
    if (!same_algebra(c.algebra(), e->base)) fail_input("dual representative over the wrong base");
    if (!c.is_homogeneous() || c.degree() != 2 * i)
      fail_precondition("dual representative " + std::to_string(i) + " must have degree " +
                        std::to_string(2 * i));
    if (!c.d().is_zero()) fail_precondition("dual representative is not closed");
  }
  OneLeg split = one_leg_split(e, h, 2 * (n + k) + 1);

  // Generator of degree 2j-1 pairs with the dual generator of degree
  // 2(n+k-j+1)-1; the pairing is degree-complementary at 2(n+k).
  std::vector<OddGenerator> dual_gens;
  for (int m = k + 1; m <= n + k; ++m) {
    int j = n + k - m + 1;
    OddGenerator g;
    g.label = "psih" + std::to_string(2 * m - 1);
    g.degree = 2 * m - 1;
    g.transgression = lambda[std::size_t(m - k - 1)] * split.coeff[std::size_t(j - 1)];
    dual_gens.push_back(std::move(g));
  }
  ModelPtr ehat = make_model(e->base, std::move(dual_gens));

  TCElement hhat(ehat);
  for (int m = k + 1; m <= n + k; ++m) {
    int j = n + k - m + 1;
    hhat.add_term(Mask(1) << (m - k - 1),
                  (Scalar(1) / lambda[std::size_t(m - k - 1)]) *
                      e->gens[std::size_t(j - 1)].transgression);
  }
  hhat.add_term(0, split.basic);

  Correspondence corr = make_correspondence(e, ehat);
  TCElement f(corr.total);
  BaseElement one = BaseElement::unit(e->base);
  for (int j = 1; j <= n; ++j) {
    int m = n + k - j + 1;
    f.add_term((Mask(1) << (j - 1)) | (Mask(1) << (n + m - k - 1)),
               (Scalar(-1) / lambda[std::size_t(m - k - 1)]) * one);
  }

  return make_scenario("frame-dual-II", e, ehat, h, hhat, f);
}

DualityScenario construct_from_relation(CDGAPtr base, const std::vector<BaseElement>& chern,
                                        const std::vector<BaseElement>& chern_hat,
                                        const std::vector<Scalar>& lambda, int k,
                                        const BaseElement& h) {
  if (!base) fail_input("builder needs a base algebra");
  int n = int(chern.size());
  int nhat = int(chern_hat.size());
  if (k < 1 || k > nhat) fail_precondition("index offset out of range");
  if (k <= nhat - n) fail_precondition("index offset too small for the first side");
  require_nonzero(lambda, std::size_t(nhat - k + 1));

  auto check_chern = [&](const std::vector<BaseElement>& cs, const char* what) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].is_zero()) continue;
      if (!same_algebra(cs[i].algebra(), base))
        fail_input(std::string(what) + " representative over the wrong base");
      if (!cs[i].is_homogeneous() || cs[i].degree() != 2 * int(i + 1))
        fail_precondition(std::string(what) + " representative " + std::to_string(i + 1) +
                          " must have degree " + std::to_string(2 * (i + 1)));
      if (!cs[i].d().is_zero()) fail_precondition(std::string(what) + " representative not closed");
    }
  };
  check_chern(chern, "first-side");
  check_chern(chern_hat, "second-side");
  if (!h.is_zero()) {
    if (!same_algebra(h.algebra(), base)) fail_input("correction form over the wrong base");
    if (!h.is_homogeneous() || h.degree() != 2 * (n + k) - 1)
      fail_precondition("correction form must have degree " + std::to_string(2 * (n + k) - 1));
  }

  BaseElement residual = h.is_zero() ? BaseElement(base) : h.d();
  for (int i = 0; i <= nhat - k; ++i)
    residual += lambda[std::size_t(i)] * (chern[std::size_t(n - i - 1)] * chern_hat[std::size_t(k + i - 1)]);
  if (!residual.is_zero()) fail_precondition("characteristic relation fails: nonzero residual");

  std::vector<OddGenerator> egens, hgens;
  for (int j = n - nhat + k; j <= n; ++j) {
    OddGenerator g;
    g.label = "psi" + std::to_string(2 * j - 1);
    g.degree = 2 * j - 1;
    g.transgression = chern[std::size_t(j - 1)];
    egens.push_back(std::move(g));
  }
  for (int j = k; j <= nhat; ++j) {
    OddGenerator g;
    g.label = "psih" + std::to_string(2 * j - 1);
    g.degree = 2 * j - 1;
    g.transgression = chern_hat[std::size_t(j - 1)];
    hgens.push_back(std::move(g));
  }
  ModelPtr e = make_model(base, std::move(egens));
  ModelPtr ehat = make_model(base, std::move(hgens));
  int ne = e->n();
  int offset = n - nhat + k;  // first generator degree index on the first side

  TCElement twist(e), twist_hat(ehat);
  for (int i = 0; i <= nhat - k; ++i) {
    const Scalar& l = lambda[std::size_t(i)];
    twist.add_term(Mask(1) << (n - i - offset), l * chern_hat[std::size_t(k + i - 1)]);
    twist_hat.add_term(Mask(1) << i, l * chern[std::size_t(n - i - 1)]);
  }
  if (!h.is_zero()) {
    twist.add_term(0, h);
    twist_hat.add_term(0, h);
  }

  Correspondence corr = make_correspondence(e, ehat);
  TCElement f(corr.total);
  BaseElement one = BaseElement::unit(base);
  for (int i = 0; i <= nhat - k; ++i)
    f.add_term((Mask(1) << (n - i - offset)) | (Mask(1) << (ne + i)),
               -lambda[std::size_t(i)] * one);

  return make_scenario("from-relation", e, ehat, twist, twist_hat, f);
}

DualityScenario construct_multidegree_frame_dual(CDGAPtr base,
                                                 const std::vector<BaseElement>& chern,
                                                 const std::vector<BaseElement>& chern_hat,
                                                 int k, const std::vector<BaseElement>& h_list) {
  if (!base) fail_input("builder needs a base algebra");
  if (chern.size() != chern_hat.size())
    fail_precondition("the two characteristic lists must have equal length");
  int n = int(chern.size());
  if (k < 1 || k > n) fail_precondition("degree count out of range");
  if (int(h_list.size()) != k) fail_precondition("expected one correction per relation");

  for (int i = n - k + 1; i <= n; ++i) {
    int t = i - (n - k + 1);
    const BaseElement& c = chern[std::size_t(i - 1)];
    const BaseElement& ch = chern_hat[std::size_t(i - 1)];
    const BaseElement& hc = h_list[std::size_t(t)];
    for (const BaseElement* x : {&c, &ch}) {
      if (x->is_zero()) continue;
      if (!same_algebra(x->algebra(), base)) fail_input("representative over the wrong base");
      if (!x->is_homogeneous() || x->degree() != 2 * i)
        fail_precondition("representative for degree index " + std::to_string(i) +
                          " must have degree " + std::to_string(2 * i));
      if (!x->d().is_zero()) fail_precondition("representative not closed");
    }
    if (!hc.is_zero() && (!hc.is_homogeneous() || hc.degree() != 4 * i - 1))
      fail_precondition("correction for degree index " + std::to_string(i) +
                        " must have degree " + std::to_string(4 * i - 1));
    BaseElement residual = c * ch + (hc.is_zero() ? BaseElement(base) : hc.d());
    if (!residual.is_zero())
      fail_precondition("relation fails at degree index " + std::to_string(i));
  }

  std::vector<OddGenerator> egens, hgens;
  for (int i = n - k + 1; i <= n; ++i) {
    OddGenerator g;
    g.label = "psi" + std::to_string(2 * i - 1);
    g.degree = 2 * i - 1;
    g.transgression = chern[std::size_t(i - 1)];
    egens.push_back(g);
    g.label = "psih" + std::to_string(2 * i - 1);
    g.transgression = chern_hat[std::size_t(i - 1)];
    hgens.push_back(std::move(g));
  }
  ModelPtr e = make_model(base, std::move(egens));
  ModelPtr ehat = make_model(base, std::move(hgens));

  TCElement twist(e), twist_hat(ehat);
  for (int i = n - k + 1; i <= n; ++i) {
    int t = i - (n - k + 1);
    twist.add_term(Mask(1) << t, chern_hat[std::size_t(i - 1)]);
    twist_hat.add_term(Mask(1) << t, chern[std::size_t(i - 1)]);
    if (!h_list[std::size_t(t)].is_zero()) {
      twist.add_term(0, h_list[std::size_t(t)]);
      twist_hat.add_term(0, h_list[std::size_t(t)]);
    }
  }

  Correspondence corr = make_correspondence(e, ehat);
  TCElement f(corr.total);
  BaseElement one = BaseElement::unit(base);
  for (int t = 0; t < k; ++t) f.add_term((Mask(1) << t) | (Mask(1) << (k + t)), -one);

  return make_scenario("multidegree-frame", e, ehat, twist, twist_hat, f);
}

DualityScenario construct_sphere_dual(const ModelPtr& e, const TCElement& h,
                                      const BaseElement& euler_hat) {
  if (!e || e->n() != 1) fail_input("builder expects a single-generator model");
  const CDGAPtr& base = e->base;
  if (euler_hat.is_zero()) fail_precondition("dual transgression must be nonzero");
  if (!same_algebra(euler_hat.algebra(), base)) fail_input("dual transgression over the wrong base");
  if (!euler_hat.is_homogeneous() || (euler_hat.degree() & 1) || euler_hat.degree() < 2)
    fail_precondition("dual transgression must be homogeneous of positive even degree");
  if (!euler_hat.d().is_zero()) fail_precondition("dual transgression must be closed");
  require_odd_closed(h, e, "twist");

  BaseElement h0 = h.is_zero() ? BaseElement(base) : h.basic_component(0);
  BaseElement h1 = h.is_zero() ? BaseElement(base) : h.basic_component(1);

  // Divide the fiber component by the dual transgression up to an exact
  // correction: solve ehat*B + d(C) = H1 with d(B) = 0.
  int nb = base->dim();
  QMatrix mult = multiplication_matrix(base, euler_hat);
  QMatrix diff = differential_matrix(base);
  QMatrix joint(2 * nb, 2 * nb);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) {
      joint.at(r, c) = mult.at(r, c);
      joint.at(r, nb + c) = diff.at(r, c);
      joint.at(nb + r, c) = diff.at(r, c);
    }
  std::vector<Scalar> rhs = base_coords(base, h1);
  rhs.resize(std::size_t(2 * nb), Scalar(0));
  auto sol = solve(joint, rhs);
  if (!sol) fail_precondition("no T-dual with this Euler class");

  std::vector<Scalar> x = sol->particular;
  int unit_pos = base->unit;
  if (is_zero(x[std::size_t(unit_pos)])) {
    bool fixed = false;
    for (const auto& kv : sol->kernel)
      if (!is_zero(kv[std::size_t(unit_pos)])) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += kv[i];
        fixed = true;
        break;
      }
    if (!fixed) fail_precondition("no T-dual with this Euler class");
  }
  BaseElement quotient = base_from_coords(base, {x.begin(), x.begin() + nb});
  BaseElement correction = base_from_coords(base, {x.begin() + nb, x.end()});

  const BaseElement& euler = e->gens[0].transgression;
  BaseElement basic_part = h0 + euler * correction;

  OddGenerator dual_gen;
  dual_gen.label = e->gens[0].label + "h";
  dual_gen.degree = euler_hat.degree() - 1;
  dual_gen.transgression = euler_hat;
  ModelPtr ehat = make_model(base, {dual_gen});

  TCElement twist(e);
  twist.add_term(0, basic_part);
  twist.add_term(1, euler_hat * quotient);
  TCElement twist_hat(ehat);
  twist_hat.add_term(0, basic_part);
  twist_hat.add_term(1, euler * quotient);

  Correspondence corr = make_correspondence(e, ehat);
  TCElement f(corr.total);
  f.add_term(3, -quotient);

  DualityScenario s = make_scenario("sphere-dual", e, ehat, twist, twist_hat, f);
  BaseElement back = integrate_full(s.corr.integrate_right(s.f));
  if (is_zero(back.coefficient(unit_pos))) fail_internal("kernel lost its constant part");
  return s;
}

SphereDegreeResult check_dual_sphere_degree(const DualityScenario& s) {
  if (s.e->n() != 1 || s.ehat->n() != 1)
    fail_input("degree check expects single-generator models on both sides");
  SphereDegreeResult r;
  r.expected_degree = s.ehat->gens[0].degree + 1;
  const CDGAPtr& base = s.e->base;
  BaseElement fiber_integral = integrate_full(s.h);
  QMatrix diff = differential_matrix(base);
  for (int k = 0; k <= fiber_integral.max_degree(); ++k) {
    BaseElement comp = fiber_integral.homogeneous_component(k);
    if (comp.is_zero()) continue;
    if (!solve(diff, base_coords(base, comp))) {
      r.first_degree = k;
      r.ok = (k == r.expected_degree);
      return r;
    }
  }
  r.vacuous = true;
  r.ok = true;
  return r;
}

}  // namespace tgd
