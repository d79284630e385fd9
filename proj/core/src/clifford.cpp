#include "tgd/clifford.hpp"

#include <algorithm>
#include <bit>

#include "tgd/error.hpp"

namespace tgd {

namespace {

inline int popc(Mask m) { return std::popcount(m); }

BaseElement parity_twist(const BaseElement& b, bool flip) {
  if (!flip) return b;
  return b.even_part() - b.odd_part();
}

QMatrix contraction_matrix(const CDGAPtr& base, int k) {
  int nb = base->dim();
  QMatrix m(nb, nb);
  const auto& images = base->contractions[std::size_t(k)].images;
  for (int col = 0; col < nb; ++col)
    for (const auto& [row, c] : images[std::size_t(col)]) m.at(row, col) = c;
  return m;
}

}  // namespace

CliffordElement::CliffordElement(ModelPtr m) : model_(std::move(m)) {
  if (!model_) fail_input("clifford element needs a model");
}

CliffordElement CliffordElement::identity(const ModelPtr& m) {
  CliffordElement x(m);
  BaseElement one = BaseElement::unit(m->base);
  for (Mask s = 0; s <= m->full_mask(); ++s) x.entries_[{s, s}] = one;
  return x;
}

CliffordElement CliffordElement::creation(const ModelPtr& m, int gen) {
  if (gen < 0 || gen >= m->n()) fail_input("generator index out of range");
  CliffordElement x(m);
  BaseElement one = BaseElement::unit(m->base);
  Mask bit = Mask(1) << gen;
  for (Mask s = 0; s <= m->full_mask(); ++s) {
    if (s & bit) continue;
    bool neg = popc(s & (bit - 1)) & 1;
    x.entries_[{s | bit, s}] = neg ? -one : one;
  }
  return x;
}

CliffordElement CliffordElement::annihilation(const ModelPtr& m, int gen) {
  if (gen < 0 || gen >= m->n()) fail_input("generator index out of range");
  CliffordElement x(m);
  BaseElement one = BaseElement::unit(m->base);
  Mask bit = Mask(1) << gen;
  for (Mask s = 0; s <= m->full_mask(); ++s) {
    if (!(s & bit)) continue;
    bool neg = popc(s & (bit - 1)) & 1;
    x.entries_[{s & ~bit, s}] = neg ? -one : one;
  }
  return x;
}

CliffordElement CliffordElement::word(const ModelPtr& m, Mask created, Mask annihilated) {
  if (created > m->full_mask() || annihilated > m->full_mask())
    fail_input("word mask out of range");
  CliffordElement x = identity(m);
  // Lowest annihilation acts first, then the created block is wedged on
  // in ascending order.
  for (int j = 0; j < m->n(); ++j)
    if (annihilated >> j & 1) x = annihilation(m, j) * x;
  for (int j = m->n() - 1; j >= 0; --j)
    if (created >> j & 1) x = creation(m, j) * x;
  return x;
}

BaseElement CliffordElement::entry(Mask row, Mask col) const {
  auto it = entries_.find({row, col});
  if (it != entries_.end()) return it->second;
  return BaseElement(model_->base);
}

void CliffordElement::set_entry(Mask row, Mask col, const BaseElement& v) {
  if (v.is_zero())
    entries_.erase({row, col});
  else
    entries_[{row, col}] = v;
}

bool CliffordElement::is_odd() const {
  for (const auto& [rc, b] : entries_) {
    bool word_flip = (popc(rc.first) + popc(rc.second)) & 1;
    if (word_flip ? !b.odd_part().is_zero() : !b.even_part().is_zero()) return false;
  }
  return true;
}

bool CliffordElement::is_even() const {
  for (const auto& [rc, b] : entries_) {
    bool word_flip = (popc(rc.first) + popc(rc.second)) & 1;
    if (word_flip ? !b.even_part().is_zero() : !b.odd_part().is_zero()) return false;
  }
  return true;
}

CliffordElement CliffordElement::operator+(const CliffordElement& o) const {
  CliffordElement out = *this;
  out += o;
  return out;
}

CliffordElement& CliffordElement::operator+=(const CliffordElement& o) {
  if (!model_) {
    *this = o;
    return *this;
  }
  if (o.model_ && !same_model(model_, o.model_)) fail_input("clifford elements over different models");
  for (const auto& [rc, b] : o.entries_) {
    auto it = entries_.find(rc);
    if (it == entries_.end()) {
      entries_.emplace(rc, b);
    } else {
      it->second = it->second + b;
      if (it->second.is_zero()) entries_.erase(it);
    }
  }
  return *this;
}

CliffordElement CliffordElement::operator-() const {
  CliffordElement out = *this;
  for (auto& [rc, b] : out.entries_) b = -b;
  return out;
}

CliffordElement CliffordElement::operator-(const CliffordElement& o) const { return *this + (-o); }

CliffordElement CliffordElement::operator*(const CliffordElement& o) const {
  if (!model_ || !o.model_) fail_input("clifford product needs models on both factors");
  if (!same_model(model_, o.model_)) fail_input("clifford elements over different models");
  CliffordElement out(model_);
  for (const auto& [rm, a] : entries_)
    for (const auto& [mc, b] : o.entries_) {
      if (rm.second != mc.first) continue;
      // Moving the left coefficient past the right factor's word change
      // flips its odd part.
      bool flip = (popc(mc.first) + popc(mc.second)) & 1;
      BaseElement v = parity_twist(a, flip) * b;
      if (v.is_zero()) continue;
      auto key = std::make_pair(rm.first, mc.second);
      auto it = out.entries_.find(key);
      if (it == out.entries_.end()) {
        out.entries_.emplace(key, v);
      } else {
        it->second = it->second + v;
        if (it->second.is_zero()) out.entries_.erase(it);
      }
    }
  return out;
}

bool CliffordElement::operator==(const CliffordElement& o) const {
  return (*this - o).is_zero();
}

CliffordElement CliffordElement::tensor(const BaseElement& b) const {
  CliffordElement out(model_);
  for (const auto& [rc, a] : entries_) {
    BaseElement v = a * b;
    if (!v.is_zero()) out.entries_.emplace(rc, v);
  }
  return out;
}

CliffordElement operator*(const Scalar& s, const CliffordElement& x) {
  CliffordElement out(x.model_);
  if (is_zero(s)) return out;
  for (const auto& [rc, b] : x.entries_) out.entries_.emplace(rc, s * b);
  return out;
}

TCElement CliffordElement::act(const TCElement& x) const {
  if (!model_) fail_input("clifford element needs a model");
  if (!x.is_zero() && !same_model(x.model(), model_))
    fail_input("clifford action on an element over a different model");
  TCElement out(model_);
  for (const auto& [s, a] : x.components()) {
    bool flip = popc(s) & 1;
    for (const auto& [rc, b] : entries_) {
      if (rc.second != s) continue;
      out.add_term(rc.first, parity_twist(b, flip) * a);
    }
  }
  return out;
}

std::map<std::pair<Mask, Mask>, BaseElement> word_decomposition(const CliffordElement& x) {
  std::map<std::pair<Mask, Mask>, BaseElement> out;
  if (x.is_zero()) return out;
  const ModelPtr& m = x.model();
  int nw = 1 << m->n();
  int dim = nw * nw;

  // Word matrices only depend on the generator count; the inverse change
  // of basis is cached per count.
  static std::map<int, QMatrix> cache;
  auto it = cache.find(m->n());
  if (it == cache.end()) {
    QMatrix change(dim, dim);
    for (Mask a = 0; a < Mask(nw); ++a)
      for (Mask b = 0; b < Mask(nw); ++b) {
        CliffordElement w = CliffordElement::word(m, a, b);
        int col = int(a) * nw + int(b);
        for (const auto& [rc, v] : w.entries())
          change.at(int(rc.first) * nw + int(rc.second), col) =
              v.coefficient(m->base->unit);
      }
    auto inv = inverse(change);
    if (!inv) fail_internal("word basis change is singular");
    it = cache.emplace(m->n(), std::move(*inv)).first;
  }
  const QMatrix& inv = it->second;

  for (int w = 0; w < dim; ++w) {
    BaseElement coeff(m->base);
    for (const auto& [rc, v] : x.entries()) {
      int row = int(rc.first) * nw + int(rc.second);
      const Scalar& c = inv.at(w, row);
      if (!is_zero(c)) coeff += c * v;
    }
    if (!coeff.is_zero()) out.emplace(std::make_pair(Mask(w / nw), Mask(w % nw)), coeff);
  }
  return out;
}

CliffordSection make_section(ModelPtr m, std::vector<Scalar> vector_part,
                             CliffordElement clifford_part) {
  if (!m) fail_input("section needs a model");
  std::size_t nc = m->base->contractions.size();
  if (vector_part.empty()) vector_part.assign(nc, Scalar(0));
  if (vector_part.size() != nc)
    fail_input("expected one vector coefficient per declared contraction");
  if (!clifford_part.is_zero()) {
    if (!same_model(clifford_part.model(), m)) fail_input("section parts over different models");
    if (!clifford_part.is_odd()) fail_input("clifford part of a section must be odd");
  } else if (!clifford_part.model()) {
    clifford_part = CliffordElement(m);
  }
  CliffordSection s;
  s.model = std::move(m);
  s.vector_part = std::move(vector_part);
  s.clifford_part = std::move(clifford_part);
  return s;
}

TCElement apply_contraction(const TCElement& x, int k) {
  if (x.is_zero()) return x;
  const ModelPtr& m = x.model();
  TCElement out(m);
  for (const auto& [s, a] : x.components()) {
    BaseElement v = a.contract(k);
    out.add_term(s, (popc(s) & 1) ? -v : v);
  }
  return out;
}

TCElement clifford_act(const CliffordSection& v, const TCElement& phi) {
  if (phi.is_zero()) return TCElement(v.model);
  if (!same_model(phi.model(), v.model)) fail_input("section acting over a different model");
  TCElement out = v.clifford_part.is_zero() ? TCElement(v.model) : v.clifford_part.act(phi);
  for (std::size_t k = 0; k < v.vector_part.size(); ++k) {
    if (is_zero(v.vector_part[k])) continue;
    out += v.vector_part[k] * apply_contraction(phi, int(k));
  }
  return out;
}

QMatrix complex_matrix(const ModelPtr& m,
                       const std::function<TCElement(const TCElement&)>& op) {
  ComplexIndexing cx(m);
  QMatrix out(cx.size, cx.size);
  for (int col = 0; col < cx.size; ++col) {
    std::vector<Scalar> v = cx.coords(op(cx.element(col)));
    for (int row = 0; row < cx.size; ++row) out.at(row, col) = v[std::size_t(row)];
  }
  return out;
}

QMatrix section_matrix(const CliffordSection& v) {
  return complex_matrix(v.model, [&](const TCElement& x) { return clifford_act(v, x); });
}

QMatrix build_twisted_d_operator(const ModelPtr& m, const TCElement& flux) {
  if (!flux.is_zero()) {
    if (!same_model(flux.model(), m)) fail_input("flux lives over the wrong model");
    if (!flux.even_part().is_zero()) fail_input("flux must be odd");
    if (!flux.d().is_zero()) fail_input("flux must be closed");
  }
  CliffordElement down(m);
  for (int j = 0; j < m->n(); ++j)
    down += CliffordElement::word(m, 0, Mask(1) << j)
                .tensor(m->gens[std::size_t(j)].transgression);
  QMatrix out = complex_matrix(m, [&](const TCElement& x) { return down.act(x); });
  out = out + complex_matrix(m, [&](const TCElement& x) {
          TCElement y(m);
          for (const auto& [s, a] : x.components()) {
            BaseElement da = a.d();
            y.add_term(s, (popc(s) & 1) ? -da : da);
          }
          return y;
        });
  if (!flux.is_zero())
    out = out + complex_matrix(m, [&](const TCElement& x) { return flux * x; });
  return out;
}

QMatrix graded_commutator(const QMatrix& a, int parity_a, const QMatrix& b, int parity_b) {
  QMatrix ab = a * b;
  QMatrix ba = b * a;
  return ((parity_a & 1) && (parity_b & 1)) ? ab + ba : ab - ba;
}

CliffordSection decompose_operator(const ModelPtr& m, const QMatrix& op) {
  if (!m) fail_input("decomposition needs a model");
  ComplexIndexing cx(m);
  if (op.rows() != cx.size || op.cols() != cx.size)
    fail_input("operator has the wrong size for the model's complex");
  for (int r = 0; r < cx.size; ++r)
    for (int c = 0; c < cx.size; ++c)
      if (!is_zero(op.at(r, c)) && ((cx.degree(r) + cx.degree(c)) & 1) == 0)
        fail_input("operator must be odd");

  int nb = m->base->dim();
  int nw = 1 << m->n();
  int unit = m->base->unit;

  // The contraction part kills the unit, so unit columns read off the
  // endomorphism coefficients exactly.
  CliffordElement cl(m);
  for (Mask c = 0; c < Mask(nw); ++c) {
    int col = int(c) * nb + unit;
    for (Mask r = 0; r < Mask(nw); ++r) {
      BaseElement y(m->base);
      for (int bi = 0; bi < nb; ++bi) y.add_term(bi, op.at(int(r) * nb + bi, col));
      if (y.is_zero()) continue;
      cl.set_entry(r, c, parity_twist(y, popc(c) & 1));
    }
  }

  QMatrix remainder = op - complex_matrix(m, [&](const TCElement& x) { return cl.act(x); });

  std::size_t nc = m->base->contractions.size();
  std::vector<Scalar> coeffs(nc, Scalar(0));
  if (nc > 0) {
    QMatrix system(nb * nb, int(nc));
    for (std::size_t k = 0; k < nc; ++k) {
      QMatrix ck = contraction_matrix(m->base, int(k));
      for (int r = 0; r < nb; ++r)
        for (int c = 0; c < nb; ++c) system.at(r * nb + c, int(k)) = ck.at(r, c);
    }
    std::vector<Scalar> rhs(std::size_t(nb) * std::size_t(nb), Scalar(0));
    for (int r = 0; r < nb; ++r)
      for (int c = 0; c < nb; ++c) rhs[std::size_t(r * nb + c)] = remainder.at(r, c);
    auto sol = solve(system, rhs);
    if (!sol)
      fail_precondition(
          "operator is not a section: remainder outside the declared vector-field span");
    coeffs = sol->particular;
  }

  QMatrix cmat = complex_matrix(m, [&](const TCElement& x) {
    TCElement y(m);
    for (std::size_t k = 0; k < nc; ++k) {
      if (is_zero(coeffs[k])) continue;
      y += coeffs[k] * apply_contraction(x, int(k));
    }
    return y;
  });
  QMatrix residual = remainder - cmat;
  for (int r = 0; r < cx.size; ++r)
    for (int c = 0; c < cx.size; ++c)
      if (!is_zero(residual.at(r, c)))
        fail_precondition("operator is not a section: residual at row " + std::to_string(r) +
                          ", column " + std::to_string(c));

  return make_section(m, std::move(coeffs), std::move(cl));
}

CliffordSection derived_bracket(const ModelPtr& m, const TCElement& flux,
                                const CliffordSection& v, const CliffordSection& w) {
  if (!same_model(v.model, m) || !same_model(w.model, m))
    fail_input("bracket arguments over different models");
  QMatrix dh = build_twisted_d_operator(m, flux);
  QMatrix inner = graded_commutator(section_matrix(v), 1, dh, 1);
  QMatrix outer = graded_commutator(inner, 0, section_matrix(w), 1);
  return decompose_operator(m, outer);
}

SectionTransport::SectionTransport(const DualityScenario& s) : e_(s.e), ehat_(s.ehat) {
  t_ = tau_matrix(s);
  if (t_.rows() != t_.cols()) fail_precondition("transform is not invertible");
  auto inv = inverse(t_);
  if (!inv) fail_precondition("transform is not invertible");
  tinv_ = std::move(*inv);
}

CliffordSection SectionTransport::map(const CliffordSection& v) const {
  if (!same_model(v.model, e_)) fail_input("section over the wrong side of the duality");
  QMatrix conj = t_ * section_matrix(v) * tinv_;
  return decompose_operator(ehat_, conj);
}

CliffordSection tduality_section_map(const DualityScenario& s, const CliffordSection& v) {
  return SectionTransport(s).map(v);
}

SphereAlgebroidTable sphere_algebroid_decomposition(const ModelPtr& m) {
  if (!m || m->n() != 1) fail_input("rank table expects a single-generator model");
  const CDGAPtr& base = m->base;
  int nb = base->dim();
  int even = 0, odd = 0;
  for (int deg : base->degrees) ((deg & 1) ? odd : even) += 1;

  SphereAlgebroidTable t;
  std::size_t nc = base->contractions.size();
  if (nc > 0) {
    QMatrix span(nb * nb, int(nc));
    for (std::size_t k = 0; k < nc; ++k) {
      QMatrix ck = contraction_matrix(base, int(k));
      for (int r = 0; r < nb; ++r)
        for (int c = 0; c < nb; ++c) span.at(r * nb + c, int(k)) = ck.at(r, c);
    }
    t.tm_rank = rank(span);
  }
  t.dpsi_even = even;
  t.psi_even = even;
  t.dpsipsi_odd = odd;
  t.complement_odd = odd;
  t.odd_total = 2 * even + 2 * odd;
  t.exceeds_extended = t.dpsipsi_odd > 0;
  return t;
}

}  // namespace tgd
