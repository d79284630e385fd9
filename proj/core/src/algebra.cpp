#include "tgd/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "tgd/error.hpp"

namespace tgd {

int FiniteCDGA::index_of(const std::string& label) const {
  for (int i = 0; i < dim(); ++i)
    if (labels[i] == label) return i;
  return -1;
}

int FiniteCDGA::contraction_index(const std::string& name) const {
  for (int i = 0; i < int(contractions.size()); ++i)
    if (contractions[i].name == name) return i;
  return -1;
}

bool FiniteCDGA::same_structure(const FiniteCDGA& o) const {
  if (labels != o.labels || degrees != o.degrees || unit != o.unit) return false;
  if (products != o.products || differential != o.differential) return false;
  if (contractions.size() != o.contractions.size()) return false;
  for (std::size_t i = 0; i < contractions.size(); ++i)
    if (contractions[i].name != o.contractions[i].name ||
        contractions[i].images != o.contractions[i].images)
      return false;
  return true;
}

bool same_algebra(const CDGAPtr& a, const CDGAPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same_structure(*b);
}

// ---------------------------------------------------------------------------
// Builder

CDGABuilder& CDGABuilder::element(const std::string& label, int degree) {
  if (a_.index_of(label) >= 0) fail_input("duplicate basis label '" + label + "'");
  a_.labels.push_back(label);
  a_.degrees.push_back(degree);
  return *this;
}

CDGABuilder& CDGABuilder::unit(const std::string& label) {
  int i = require(label);
  if (a_.degrees[std::size_t(i)] != 0)
    fail_input("unit '" + label + "' must have degree 0");
  a_.unit = i;
  return *this;
}

int CDGABuilder::require(const std::string& label) const {
  int i = a_.index_of(label);
  if (i < 0) fail_input("unknown basis label '" + label + "'");
  return i;
}

SparseVec CDGABuilder::to_sparse(const std::vector<std::pair<std::string, Scalar>>& value) const {
  SparseVec v;
  for (const auto& [label, coeff] : value) {
    if (is_zero(coeff)) continue;
    int i = require(label);
    v[i] += coeff;
    if (is_zero(v[i])) v.erase(i);
  }
  return v;
}

CDGABuilder& CDGABuilder::product(const std::string& a, const std::string& b,
                                  const std::vector<std::pair<std::string, Scalar>>& value) {
  int i = require(a), j = require(b);
  auto key = std::make_pair(i, j);
  if (declared_products_.count(key)) fail_input("product '" + a + "*" + b + "' declared twice");
  declared_products_[key] = to_sparse(value);
  return *this;
}

CDGABuilder& CDGABuilder::differential(const std::string& a,
                                       const std::vector<std::pair<std::string, Scalar>>& value) {
  a_.differential.resize(a_.labels.size());
  a_.differential[require(a)] = to_sparse(value);
  return *this;
}

CDGABuilder& CDGABuilder::contraction(
    const std::string& name,
    const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Scalar>>>>& images) {
  FiniteCDGA::Contraction c;
  c.name = name;
  c.images.resize(a_.labels.size());
  for (const auto& [label, value] : images) c.images[require(label)] = to_sparse(value);
  a_.contractions.push_back(std::move(c));
  return *this;
}

CDGAPtr CDGABuilder::build() {
  int n = int(a_.labels.size());
  if (n == 0) fail_input("empty basis");
  if (a_.unit < 0) fail_input("no unit declared");
  a_.differential.resize(n);
  for (auto& c : a_.contractions) c.images.resize(n);

  a_.products.assign(n, std::vector<SparseVec>(n));
  // Unit row and column first, then declared entries, then their graded-
  // commutative mirrors.  A declared entry that contradicts an earlier one
  // (directly or via the mirror) is an error.
  for (int i = 0; i < n; ++i) {
    a_.products[a_.unit][i] = SparseVec{{i, Scalar(1)}};
    a_.products[i][a_.unit] = SparseVec{{i, Scalar(1)}};
  }
  auto assign = [&](int i, int j, const SparseVec& v) {
    if (i == a_.unit || j == a_.unit) {
      if (a_.products[i][j] != v)
        fail_input("declared product contradicts the unit law for '" + a_.labels[i] + "*" +
                   a_.labels[j] + "'");
      return;
    }
    a_.products[i][j] = v;
  };
  std::vector<std::vector<bool>> set(n, std::vector<bool>(n, false));
  for (const auto& [key, v] : declared_products_) {
    auto [i, j] = key;
    if (set[i][j] && a_.products[i][j] != v)
      fail_input("conflicting declarations for '" + a_.labels[i] + "*" + a_.labels[j] + "'");
    assign(i, j, v);
    set[i][j] = true;
    // mirror with the Koszul sign
    SparseVec m = v;
    if ((a_.degrees[i] & 1) && (a_.degrees[j] & 1))
      for (auto& [k, c] : m) c = -c;
    if (set[j][i] && a_.products[j][i] != m)
      fail_input("declared products for '" + a_.labels[i] + "*" + a_.labels[j] +
                 "' break graded commutativity");
    assign(j, i, m);
    set[j][i] = true;
  }
  return std::make_shared<FiniteCDGA>(std::move(a_));
}

// ---------------------------------------------------------------------------
// BaseElement

BaseElement BaseElement::basis(CDGAPtr alg, int index) {
  BaseElement x(std::move(alg));
  if (index < 0 || index >= x.alg_->dim()) fail_internal("basis index out of range");
  x.c_[index] = 1;
  return x;
}

BaseElement BaseElement::unit(CDGAPtr alg) {
  int u = alg->unit;
  return basis(std::move(alg), u);
}

Scalar BaseElement::coefficient(int index) const {
  auto it = c_.find(index);
  return it == c_.end() ? Scalar(0) : it->second;
}

void BaseElement::add_term(int index, const Scalar& coeff) {
  if (!alg_) fail_internal("add_term on an element without an algebra");
  auto it = c_.find(index);
  if (it == c_.end()) {
    if (!tgd::is_zero(coeff)) c_[index] = coeff;
    return;
  }
  it->second += coeff;
  if (tgd::is_zero(it->second)) c_.erase(it);
}

void BaseElement::check_compatible(const BaseElement& o) const {
  if (!alg_ || !o.alg_) fail_internal("operation on an element without an algebra");
  if (!same_algebra(alg_, o.alg_)) fail_input("elements belong to different algebras");
}

BaseElement BaseElement::operator+(const BaseElement& o) const {
  if (c_.empty() && !alg_) return o;
  if (o.c_.empty() && !o.alg_) return *this;
  check_compatible(o);
  BaseElement r = *this;
  for (const auto& [i, c] : o.c_) r.add_term(i, c);
  return r;
}

BaseElement& BaseElement::operator+=(const BaseElement& o) {
  *this = *this + o;
  return *this;
}

BaseElement BaseElement::operator-(const BaseElement& o) const { return *this + (-o); }

BaseElement BaseElement::operator-() const {
  BaseElement r = *this;
  for (auto& [i, c] : r.c_) c = -c;
  return r;
}

BaseElement operator*(const Scalar& s, const BaseElement& x) {
  BaseElement r(x.alg_);
  if (is_zero(s)) return r;
  r.c_ = x.c_;
  for (auto& [i, c] : r.c_) c *= s;
  return r;
}

BaseElement BaseElement::operator*(const BaseElement& o) const {
  check_compatible(o);
  BaseElement r(alg_);
  for (const auto& [i, ci] : c_)
    for (const auto& [j, cj] : o.c_) {
      const SparseVec& basis_product = alg_->products[i][j];
      Scalar f = ci * cj;
      for (const auto& [k, ck] : basis_product) r.add_term(k, f * ck);
    }
  return r;
}

bool BaseElement::operator==(const BaseElement& o) const {
  if (!alg_ || !o.alg_) return c_.empty() && o.c_.empty();
  return same_algebra(alg_, o.alg_) && c_ == o.c_;
}

BaseElement BaseElement::d() const {
  if (!alg_) fail_internal("d on an element without an algebra");
  BaseElement r(alg_);
  for (const auto& [i, ci] : c_)
    for (const auto& [k, ck] : alg_->differential[i]) r.add_term(k, ci * ck);
  return r;
}

BaseElement BaseElement::contract(int contraction_index) const {
  if (!alg_) fail_internal("contract on an element without an algebra");
  if (contraction_index < 0 || contraction_index >= int(alg_->contractions.size()))
    fail_input("unknown contraction operator");
  const auto& images = alg_->contractions[contraction_index].images;
  BaseElement r(alg_);
  for (const auto& [i, ci] : c_)
    for (const auto& [k, ck] : images[i]) r.add_term(k, ci * ck);
  return r;
}

bool BaseElement::is_homogeneous() const {
  int deg = -1;
  for (const auto& [i, c] : c_) {
    if (deg < 0) deg = alg_->degree(i);
    else if (alg_->degree(i) != deg) return false;
  }
  return true;
}

int BaseElement::degree() const {
  if (c_.empty()) fail_input("degree of the zero element is undefined");
  if (!is_homogeneous()) fail_input("degree of a mixed-degree element is undefined");
  return alg_->degree(c_.begin()->first);
}

int BaseElement::max_degree() const {
  int m = 0;
  for (const auto& [i, c] : c_) m = std::max(m, alg_->degree(i));
  return m;
}

BaseElement BaseElement::homogeneous_component(int degree) const {
  BaseElement r(alg_);
  for (const auto& [i, c] : c_)
    if (alg_->degree(i) == degree) r.c_[i] = c;
  return r;
}

BaseElement BaseElement::even_part() const {
  BaseElement r(alg_);
  for (const auto& [i, c] : c_)
    if ((alg_->degree(i) & 1) == 0) r.c_[i] = c;
  return r;
}

BaseElement BaseElement::odd_part() const {
  BaseElement r(alg_);
  for (const auto& [i, c] : c_)
    if (alg_->degree(i) & 1) r.c_[i] = c;
  return r;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string describe(const FiniteCDGA& a, const SparseVec& v) {
  if (v.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, c] : v) {
    if (!first) os << " + ";
    os << scalar_to_string(c) << "*" << a.labels[i];
    first = false;
  }
  return os.str();
}

SparseVec mul_sparse(const FiniteCDGA& a, const SparseVec& x, const SparseVec& y) {
  SparseVec r;
  for (const auto& [i, ci] : x)
    for (const auto& [j, cj] : y)
      for (const auto& [k, ck] : a.products[i][j]) {
        r[k] += ci * cj * ck;
        if (is_zero(r[k])) r.erase(k);
      }
  return r;
}

SparseVec apply_linear(const std::vector<SparseVec>& op, const SparseVec& x) {
  SparseVec r;
  for (const auto& [i, ci] : x)
    for (const auto& [k, ck] : op[i]) {
      r[k] += ci * ck;
      if (is_zero(r[k])) r.erase(k);
    }
  return r;
}

SparseVec scale(Scalar s, SparseVec v) {
  for (auto& [k, c] : v) c *= s;
  return v;
}

SparseVec add(SparseVec x, const SparseVec& y) {
  for (const auto& [k, c] : y) {
    x[k] += c;
    if (is_zero(x[k])) x.erase(k);
  }
  return x;
}

}  // namespace

std::string ValidationReport::render() const {
  if (ok()) return "all axioms hold\n";
  std::ostringstream os;
  for (const auto& v : violations) os << v.axiom << ": " << v.detail << "\n";
  return os.str();
}

ValidationReport validate(const FiniteCDGA& a) {
  ValidationReport rep;
  auto flag = [&](const std::string& axiom, const std::string& detail) {
    rep.violations.push_back({axiom, detail});
  };
  int n = a.dim();
  if (n == 0) {
    flag("basis", "empty basis");
    return rep;
  }
  if (a.unit < 0 || a.unit >= n) {
    flag("unit", "no unit element declared");
    return rep;
  }
  if (int(a.products.size()) != n || int(a.differential.size()) != n) {
    flag("tables", "structure constant tables do not match the basis size");
    return rep;
  }

  for (int i = 0; i < n; ++i)
    if (a.degrees[i] < 0) flag("grading", "negative degree on '" + a.labels[i] + "'");
  if (a.degrees[a.unit] != 0) flag("unit", "unit '" + a.labels[a.unit] + "' has nonzero degree");
  for (int i = 0; i < n; ++i)
    if (i != a.unit && a.degrees[i] == 0)
      flag("connectivity", "degree 0 is not spanned by the unit alone ('" + a.labels[i] + "')");

  auto degree_of = [&](const SparseVec& v) -> int {
    // common degree of a homogeneous sparse vector, -2 if mixed, -1 if zero
    int deg = -1;
    for (const auto& [k, c] : v) {
      if (deg == -1) deg = a.degrees[k];
      else if (a.degrees[k] != deg) return -2;
    }
    return deg;
  };

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int deg = degree_of(a.products[i][j]);
      if (deg == -2 || (deg >= 0 && deg != a.degrees[i] + a.degrees[j]))
        flag("degree additivity", "'" + a.labels[i] + "*" + a.labels[j] + "' = " +
                                      describe(a, a.products[i][j]) + " is not homogeneous of degree " +
                                      std::to_string(a.degrees[i] + a.degrees[j]));
    }

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Scalar sign = ((a.degrees[i] & 1) && (a.degrees[j] & 1)) ? -1 : 1;
      if (a.products[j][i] != scale(sign, a.products[i][j]))
        flag("graded commutativity",
             "'" + a.labels[i] + "*" + a.labels[j] + "' vs '" + a.labels[j] + "*" + a.labels[i] + "'");
    }

  for (int i = 0; i < n; ++i) {
    if (a.products[a.unit][i] != SparseVec{{i, Scalar(1)}})
      flag("unit law", "'" + a.labels[a.unit] + "*" + a.labels[i] + "' = " +
                           describe(a, a.products[a.unit][i]));
    if (a.products[i][a.unit] != SparseVec{{i, Scalar(1)}})
      flag("unit law", "'" + a.labels[i] + "*" + a.labels[a.unit] + "' = " +
                           describe(a, a.products[i][a.unit]));
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        SparseVec left = mul_sparse(a, a.products[i][j], SparseVec{{k, Scalar(1)}});
        SparseVec right = mul_sparse(a, SparseVec{{i, Scalar(1)}}, a.products[j][k]);
        if (left != right) {
          flag("associativity", "(" + a.labels[i] + "*" + a.labels[j] + ")*" + a.labels[k] +
                                    " = " + describe(a, left) + " but " + a.labels[i] + "*(" +
                                    a.labels[j] + "*" + a.labels[k] + ") = " + describe(a, right));
          goto assoc_done;  // one witness is enough
        }
      }
assoc_done:

  for (int i = 0; i < n; ++i) {
    int deg = degree_of(a.differential[i]);
    if (deg == -2 || (deg >= 0 && deg != a.degrees[i] + 1))
      flag("differential degree", "d('" + a.labels[i] + "') = " + describe(a, a.differential[i]) +
                                      " is not homogeneous of degree " + std::to_string(a.degrees[i] + 1));
  }
  for (int i = 0; i < n; ++i) {
    SparseVec dd = apply_linear(a.differential, a.differential[i]);
    if (!dd.empty())
      flag("d*d = 0", "d(d('" + a.labels[i] + "')) = " + describe(a, dd));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      SparseVec lhs = apply_linear(a.differential, a.products[i][j]);
      Scalar sign = (a.degrees[i] & 1) ? -1 : 1;
      SparseVec rhs = add(mul_sparse(a, a.differential[i], SparseVec{{j, Scalar(1)}}),
                          scale(sign, mul_sparse(a, SparseVec{{i, Scalar(1)}}, a.differential[j])));
      if (lhs != rhs) {
        flag("Leibniz", "d('" + a.labels[i] + "*" + a.labels[j] + "')");
        goto leibniz_done;
      }
    }
leibniz_done:

  for (const auto& iota : a.contractions) {
    if (int(iota.images.size()) != n) {
      flag("contraction " + iota.name, "image table does not match the basis size");
      continue;
    }
    for (int i = 0; i < n; ++i) {
      int deg = degree_of(iota.images[i]);
      if (deg == -2 || (deg >= 0 && deg != a.degrees[i] - 1))
        flag("contraction degree", iota.name + "('" + a.labels[i] + "') = " +
                                       describe(a, iota.images[i]) + " is not of degree " +
                                       std::to_string(a.degrees[i] - 1));
    }
    bool derivation_ok = true;
    for (int i = 0; i < n && derivation_ok; ++i)
      for (int j = 0; j < n && derivation_ok; ++j) {
        SparseVec lhs = apply_linear(iota.images, a.products[i][j]);
        Scalar sign = (a.degrees[i] & 1) ? -1 : 1;
        SparseVec rhs = add(mul_sparse(a, iota.images[i], SparseVec{{j, Scalar(1)}}),
                            scale(sign, mul_sparse(a, SparseVec{{i, Scalar(1)}}, iota.images[j])));
        if (lhs != rhs) {
          flag("contraction derivation", iota.name + " on '" + a.labels[i] + "*" + a.labels[j] + "'");
          derivation_ok = false;
        }
      }
    for (int i = 0; i < n; ++i) {
      SparseVec ii = apply_linear(iota.images, iota.images[i]);
      if (!ii.empty()) {
        flag("contraction square", iota.name + "^2('" + a.labels[i] + "') = " + describe(a, ii));
        break;
      }
    }
    // Lie operator L = d iota + iota d must be a plain degree-0 derivation.
    std::vector<SparseVec> lie(n);
    for (int i = 0; i < n; ++i)
      lie[i] = add(apply_linear(a.differential, iota.images[i]),
                   apply_linear(iota.images, a.differential[i]));
    bool lie_ok = true;
    for (int i = 0; i < n && lie_ok; ++i)
      for (int j = 0; j < n && lie_ok; ++j) {
        SparseVec lhs = apply_linear(lie, a.products[i][j]);
        SparseVec rhs = add(mul_sparse(a, lie[i], SparseVec{{j, Scalar(1)}}),
                            mul_sparse(a, SparseVec{{i, Scalar(1)}}, lie[j]));
        if (lhs != rhs) {
          flag("Lie derivation", "d*" + iota.name + " + " + iota.name + "*d on '" + a.labels[i] +
                                     "*" + a.labels[j] + "'");
          lie_ok = false;
        }
      }
  }
  for (std::size_t p = 0; p < a.contractions.size(); ++p)
    for (std::size_t q = p + 1; q < a.contractions.size(); ++q) {
      const auto& ip = a.contractions[p].images;
      const auto& iq = a.contractions[q].images;
      for (int i = 0; i < n; ++i) {
        SparseVec anti = add(apply_linear(ip, iq[i]), apply_linear(iq, ip[i]));
        if (!anti.empty()) {
          flag("contraction anticommutativity",
               a.contractions[p].name + " and " + a.contractions[q].name + " on '" + a.labels[i] + "'");
          break;
        }
      }
    }

  return rep;
}

}  // namespace tgd
