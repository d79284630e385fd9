#include "tgd/transgressive.hpp"

#include <algorithm>
#include <bit>

#include "tgd/error.hpp"

namespace tgd {

int block_inversions(Mask upper, Mask lower) {
  int count = 0;
  while (lower) {
    int t = std::countr_zero(lower);
    lower &= lower - 1;
    count += std::popcount(std::uint64_t(upper) >> (t + 1));
  }
  return count;
}

int TransgressiveModel::gen_index(const std::string& label) const {
  for (int i = 0; i < n(); ++i)
    if (gens[i].label == label) return i;
  return -1;
}

int TransgressiveModel::block_degree(Mask s) const {
  int d = 0;
  for (int i = 0; i < n(); ++i)
    if (s >> i & 1) d += gens[i].degree;
  return d;
}

ModelPtr make_model(CDGAPtr base, std::vector<OddGenerator> gens) {
  if (!base) fail_input("model without a base algebra");
  if (gens.size() > 16) fail_input("at most 16 odd generators are supported");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    OddGenerator& g = gens[i];
    if (g.degree < 1 || (g.degree & 1) == 0)
      fail_input("generator '" + g.label + "' must have positive odd degree");
    if (base->index_of(g.label) >= 0)
      fail_input("generator label '" + g.label + "' collides with a base label");
    for (std::size_t j = 0; j < i; ++j)
      if (gens[j].label == g.label) fail_input("duplicate generator label '" + g.label + "'");
    if (g.transgression.is_zero()) {
      g.transgression = BaseElement(base);
    } else {
      if (!same_algebra(g.transgression.algebra(), base))
        fail_input("transgression of '" + g.label + "' lives over a different base");
      if (!g.transgression.is_homogeneous() || g.transgression.degree() != g.degree + 1)
        fail_input("transgression of '" + g.label + "' must be homogeneous of degree " +
                   std::to_string(g.degree + 1));
    }
    if (!g.transgression.d().is_zero())
      fail_input("transgression of '" + g.label + "' is not closed");
  }
  auto m = std::make_shared<TransgressiveModel>();
  m->base = std::move(base);
  m->gens = std::move(gens);
  return m;
}

bool same_model(const ModelPtr& a, const ModelPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (!same_algebra(a->base, b->base) || a->n() != b->n()) return false;
  for (int i = 0; i < a->n(); ++i) {
    if (a->gens[i].label != b->gens[i].label || a->gens[i].degree != b->gens[i].degree ||
        !(a->gens[i].transgression == b->gens[i].transgression))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// TCElement

TCElement TCElement::unit(ModelPtr m) { return from_base(m, BaseElement::unit(m->base)); }

TCElement TCElement::from_base(ModelPtr m, const BaseElement& a) {
  TCElement x(std::move(m));
  x.add_term(0, a);
  return x;
}

TCElement TCElement::generator(ModelPtr m, int index) {
  if (index < 0 || index >= m->n()) fail_internal("generator index out of range");
  BaseElement one = BaseElement::unit(m->base);
  TCElement x(std::move(m));
  x.add_term(Mask(1) << index, one);
  return x;
}

TCElement TCElement::monomial(ModelPtr m, Mask s, const BaseElement& a) {
  if (s & ~m->full_mask()) fail_internal("monomial mask outside the generator range");
  TCElement x(std::move(m));
  x.add_term(s, a);
  return x;
}

BaseElement TCElement::basic_component(Mask s) const {
  auto it = c_.find(s);
  if (it != c_.end()) return it->second;
  return model_ ? BaseElement(model_->base) : BaseElement();
}

void TCElement::add_term(Mask s, const BaseElement& a) {
  if (a.is_zero()) return;
  auto it = c_.find(s);
  if (it == c_.end()) {
    c_.emplace(s, a);
    return;
  }
  it->second += a;
  if (it->second.is_zero()) c_.erase(it);
}

void TCElement::check_compatible(const TCElement& o) const {
  if (!model_ || !o.model_) fail_internal("operation on an element without a model");
  if (!same_model(model_, o.model_)) fail_input("elements belong to different models");
}

TCElement TCElement::operator+(const TCElement& o) const {
  if (c_.empty() && !model_) return o;
  if (o.c_.empty() && !o.model_) return *this;
  check_compatible(o);
  TCElement r = *this;
  for (const auto& [s, a] : o.c_) r.add_term(s, a);
  return r;
}

TCElement& TCElement::operator+=(const TCElement& o) {
  *this = *this + o;
  return *this;
}

TCElement TCElement::operator-(const TCElement& o) const { return *this + (-o); }

TCElement TCElement::operator-() const {
  TCElement r = *this;
  for (auto& [s, a] : r.c_) a = -a;
  return r;
}

TCElement operator*(const Scalar& s, const TCElement& x) {
  TCElement r(x.model_);
  if (is_zero(s)) return r;
  for (const auto& [m, a] : x.c_) r.c_.emplace(m, s * a);
  return r;
}

TCElement TCElement::operator*(const TCElement& o) const {
  check_compatible(o);
  TCElement r(model_);
  for (const auto& [s, a] : c_) {
    BaseElement a_even = a.even_part();
    BaseElement a_odd = a.odd_part();
    for (const auto& [t, b] : o.c_) {
      if (s & t) continue;
      // Reordering the concatenated word costs one transposition per
      // inversion, and the left coefficient crosses the whole right word.
      BaseElement part = a_even * b;
      BaseElement odd_part_ = a_odd * b;
      part = (std::popcount(t) & 1) ? part - odd_part_ : part + odd_part_;
      if (block_inversions(s, t) & 1) part = -part;
      r.add_term(s | t, part);
    }
  }
  return r;
}

bool TCElement::operator==(const TCElement& o) const {
  if (!model_ || !o.model_) return c_.empty() && o.c_.empty();
  return same_model(model_, o.model_) && c_ == o.c_;
}

TCElement TCElement::d() const {
  if (!model_) fail_internal("d on an element without a model");
  TCElement r(model_);
  for (const auto& [s, a] : c_) {
    for (int j = 0; j < model_->n(); ++j) {
      if (!(s >> j & 1)) continue;
      Mask below = s & ((Mask(1) << j) - 1);
      Scalar sign = (std::popcount(below) & 1) ? -1 : 1;
      r.add_term(s & ~(Mask(1) << j), sign * (model_->gens[j].transgression * a));
    }
    Scalar sign = (std::popcount(s) & 1) ? -1 : 1;
    r.add_term(s, sign * a.d());
  }
  return r;
}

bool TCElement::is_homogeneous() const {
  int deg = -1;
  for (const auto& [s, a] : c_) {
    int bd = model_->block_degree(s);
    for (const auto& [i, coeff] : a.terms()) {
      int t = bd + a.algebra()->degree(i);
      if (deg < 0) deg = t;
      else if (t != deg) return false;
    }
  }
  return true;
}

int TCElement::degree() const {
  if (c_.empty()) fail_input("degree of the zero element is undefined");
  if (!is_homogeneous()) fail_input("degree of a mixed-degree element is undefined");
  const auto& [s, a] = *c_.begin();
  return model_->block_degree(s) + a.algebra()->degree(a.terms().begin()->first);
}

int TCElement::max_degree() const {
  int m = 0;
  for (const auto& [s, a] : c_) m = std::max(m, model_->block_degree(s) + a.max_degree());
  return m;
}

TCElement TCElement::homogeneous_component(int degree) const {
  TCElement r(model_);
  for (const auto& [s, a] : c_) {
    int bd = model_->block_degree(s);
    if (degree >= bd) r.add_term(s, a.homogeneous_component(degree - bd));
  }
  return r;
}

TCElement TCElement::even_part() const {
  TCElement r(model_);
  for (const auto& [s, a] : c_)
    r.add_term(s, (model_->block_degree(s) & 1) ? a.odd_part() : a.even_part());
  return r;
}

TCElement TCElement::odd_part() const {
  TCElement r(model_);
  for (const auto& [s, a] : c_)
    r.add_term(s, (model_->block_degree(s) & 1) ? a.even_part() : a.odd_part());
  return r;
}

// ---------------------------------------------------------------------------

TCElement twisted_d(const TCElement& flux, const TCElement& x) {
  if (!flux.even_part().is_zero()) fail_input("twisting flux must be odd");
  return x.d() + flux * x;
}

TCElement exp_wedge(const TCElement& f) {
  if (!f.model()) fail_input("exponential of an element without a model");
  if (!f.odd_part().is_zero()) fail_input("exponential requires an even argument");
  if (!f.homogeneous_component(0).is_zero())
    fail_input("exponential requires a vanishing constant term");
  const auto& m = *f.model();
  int cap = m.block_degree(m.full_mask());
  for (int deg : m.base->degrees) cap = std::max(cap, m.block_degree(m.full_mask()) + deg);
  TCElement acc = TCElement::unit(f.model());
  TCElement term = acc;
  for (int k = 1; ; ++k) {
    term = (Scalar(1) / Scalar(k)) * (term * f);
    if (term.is_zero()) break;
    if (2 * k > cap) fail_internal("wedge exponential failed to terminate");
    acc += term;
  }
  return acc;
}

TCElement apply_substitution(const TCElement& x, ModelPtr target,
                             const std::vector<TCElement>& gen_images) {
  if (!x.model() || !target) fail_input("substitution needs a source and a target model");
  const auto& m = *x.model();
  if (int(gen_images.size()) != m.n()) fail_input("expected one image per generator");
  for (int i = 0; i < m.n(); ++i) {
    const TCElement& im = gen_images[i];
    if (im.is_zero()) continue;
    if (!same_model(im.model(), target)) fail_input("generator image lives in the wrong model");
    if (!im.is_homogeneous() || im.degree() != m.gens[i].degree)
      fail_input("image of '" + m.gens[i].label + "' must be homogeneous of degree " +
                 std::to_string(m.gens[i].degree));
  }
  TCElement r(target);
  for (const auto& [s, a] : x.components()) {
    TCElement term = TCElement::unit(target);
    for (int j = 0; j < m.n(); ++j)
      if (s >> j & 1) term = term * gen_images[j];
    term = term * TCElement::from_base(target, a);
    r += term;
  }
  return r;
}

namespace {

// Extracts the word for `block` on the right of each surviving term.  The
// survivors keep their remaining mask, shifted down by `shift` bits, and
// land in `out`.
void integrate_block(const TCElement& x, Mask block, int shift, TCElement& out) {
  int tp = std::popcount(block);
  for (const auto& [s, a] : x.components()) {
    if ((s & block) != block) continue;
    Mask rest = s & ~block;
    BaseElement val = a.even_part();
    BaseElement odd = a.odd_part();
    val = (tp & 1) ? val - odd : val + odd;
    if (block_inversions(rest, block) & 1) val = -val;
    out.add_term(rest >> shift, val);
  }
}

}  // namespace

BaseElement integrate_full(const TCElement& x) {
  if (!x.model()) fail_input("integration of an element without a model");
  TCElement r(x.model());
  integrate_block(x, x.model()->full_mask(), 0, r);
  return r.basic_component(0);
}

TCElement Correspondence::pullback_left(const TCElement& x) const {
  if (!same_model(x.model(), left)) fail_input("pullback expects an element over the left model");
  TCElement r(total);
  for (const auto& [s, a] : x.components()) r.add_term(s, a);
  return r;
}

TCElement Correspondence::pullback_right(const TCElement& x) const {
  if (!same_model(x.model(), right)) fail_input("pullback expects an element over the right model");
  TCElement r(total);
  for (const auto& [s, a] : x.components()) r.add_term(s << n_left, a);
  return r;
}

TCElement Correspondence::integrate_left(const TCElement& x) const {
  if (!same_model(x.model(), total)) fail_input("integration expects an element over the total model");
  Mask block = n_left == 0 ? 0u : (Mask(1) << n_left) - 1u;
  TCElement r(right);
  integrate_block(x, block, n_left, r);
  return r;
}

TCElement Correspondence::integrate_right(const TCElement& x) const {
  if (!same_model(x.model(), total)) fail_input("integration expects an element over the total model");
  Mask block = total->full_mask() & ~(n_left == 0 ? 0u : (Mask(1) << n_left) - 1u);
  TCElement r(left);
  integrate_block(x, block, 0, r);
  return r;
}

Correspondence make_correspondence(ModelPtr left, ModelPtr right) {
  if (!left || !right) fail_input("correspondence needs two models");
  if (!same_algebra(left->base, right->base)) fail_input("correspondence requires a common base");
  std::vector<OddGenerator> gens = left->gens;
  gens.insert(gens.end(), right->gens.begin(), right->gens.end());
  Correspondence c;
  c.total = make_model(left->base, std::move(gens));
  c.left = std::move(left);
  c.right = std::move(right);
  c.n_left = c.left->n();
  return c;
}

ComplexIndexing::ComplexIndexing(ModelPtr model)
    : m(std::move(model)), dim_base(m->base->dim()), size((1 << m->n()) * dim_base) {}

int ComplexIndexing::degree(int idx) const {
  return m->block_degree(Mask(idx / dim_base)) + m->base->degree(idx % dim_base);
}

TCElement ComplexIndexing::element(int idx) const {
  return TCElement::monomial(m, Mask(idx / dim_base), BaseElement::basis(m->base, idx % dim_base));
}

std::vector<Scalar> ComplexIndexing::coords(const TCElement& x) const {
  std::vector<Scalar> v(std::size_t(size), Scalar(0));
  for (const auto& [s, a] : x.components())
    for (const auto& [i, c] : a.terms()) v[std::size_t(int(s) * dim_base + i)] = c;
  return v;
}

TCElement ComplexIndexing::from_coords(const std::vector<Scalar>& v) const {
  TCElement x(m);
  for (int idx = 0; idx < size; ++idx)
    if (!is_zero(v[std::size_t(idx)])) {
      BaseElement b(m->base);
      b.add_term(idx % dim_base, v[std::size_t(idx)]);
      x.add_term(Mask(idx / dim_base), b);
    }
  return x;
}

ModelPtr make_partial_frame_model(CDGAPtr base, const std::vector<BaseElement>& chern,
                                  int k, const std::string& prefix) {
  int n = int(chern.size());
  if (k < 0 || k > n) fail_input("frame block size out of range");
  std::vector<OddGenerator> gens;
  for (int j = n - k + 1; j <= n; ++j) {
    OddGenerator g;
    g.label = prefix + std::to_string(2 * j - 1);
    g.degree = 2 * j - 1;
    g.transgression = chern[std::size_t(j - 1)];
    gens.push_back(std::move(g));
  }
  return make_model(std::move(base), std::move(gens));
}

}  // namespace tgd
