#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tgd/algebra.hpp"

namespace tgd {

// Bit mask over the odd generators of a model; bit i set means generator i
// occurs in the exterior word, and words are always kept in ascending
// generator order.
using Mask = std::uint32_t;

// Pairs (u, t) with u a set bit of `upper`, t a set bit of `lower`, u > t.
// This counts the transpositions needed to move the `lower` block past the
// `upper` block inside an ascending word.
int block_inversions(Mask upper, Mask lower);

// One odd exterior generator adjoined to the base algebra, together with
// the basic element its differential hits.
struct OddGenerator {
  std::string label;
  int degree = 1;                // odd
  BaseElement transgression;     // closed, homogeneous of degree + 1
};

// Base algebra with finitely many odd generators adjoined, the differential
// extended by the transgressions.  Immutable; share via shared_ptr.
struct TransgressiveModel {
  CDGAPtr base;
  std::vector<OddGenerator> gens;

  int n() const { return int(gens.size()); }
  Mask full_mask() const { return n() == 0 ? 0u : (Mask(1) << n()) - 1u; }
  int gen_index(const std::string& label) const;  // -1 when absent
  int block_degree(Mask s) const;                 // sum of generator degrees over s
};

using ModelPtr = std::shared_ptr<const TransgressiveModel>;

// Validates degrees, label uniqueness against base and one another, and
// that every transgression is closed, basic, and homogeneous of the right
// degree.  At most 16 generators.
ModelPtr make_model(CDGAPtr base, std::vector<OddGenerator> gens);

bool same_model(const ModelPtr& a, const ModelPtr& b);

// Element of a transgressive model: finitely many terms (mask, basic
// coefficient), meaning the exterior word for the mask times the
// coefficient, word factors on the left.  Coefficients may mix degrees.
class TCElement {
public:
  TCElement() = default;
  explicit TCElement(ModelPtr m) : model_(std::move(m)) {}

  static TCElement unit(ModelPtr m);
  static TCElement from_base(ModelPtr m, const BaseElement& a);
  static TCElement generator(ModelPtr m, int index);
  static TCElement monomial(ModelPtr m, Mask s, const BaseElement& a);

  const ModelPtr& model() const { return model_; }
  const std::map<Mask, BaseElement>& components() const { return c_; }
  // Coefficient at exactly this mask; zero element of the base when absent.
  BaseElement basic_component(Mask s) const;
  bool is_zero() const { return c_.empty(); }

  TCElement operator+(const TCElement& o) const;
  TCElement operator-(const TCElement& o) const;
  TCElement operator-() const;
  TCElement operator*(const TCElement& o) const;  // wedge
  friend TCElement operator*(const Scalar& s, const TCElement& x);
  TCElement& operator+=(const TCElement& o);
  bool operator==(const TCElement& o) const;

  TCElement d() const;

  bool is_homogeneous() const;
  int degree() const;      // fails on zero or mixed input
  int max_degree() const;  // 0 for the zero element
  TCElement homogeneous_component(int degree) const;
  TCElement even_part() const;
  TCElement odd_part() const;

  void add_term(Mask s, const BaseElement& a);  // canonicalizes away zeros

private:
  void check_compatible(const TCElement& o) const;

  ModelPtr model_;
  std::map<Mask, BaseElement> c_;
};

// d + (flux wedge).  The flux must be odd; closedness is the caller's
// responsibility and is what makes the square vanish.
TCElement twisted_d(const TCElement& flux, const TCElement& x);

// Wedge exponential.  Requires every homogeneous component of the argument
// to be of positive even degree; the series then terminates.
TCElement exp_wedge(const TCElement& f);

// Ring morphism fixing the base, determined by generator images.  Each
// image must be zero or homogeneous odd of the generator's degree.
TCElement apply_substitution(const TCElement& x, ModelPtr target,
                             const std::vector<TCElement>& gen_images);

// Integration over the whole generator block: the coefficient of the full
// word, with the sign from extracting that word on the right.
BaseElement integrate_full(const TCElement& x);

// Two models over one base joined side by side: the total model lists the
// left generators first, then the right ones.
struct Correspondence {
  ModelPtr total;
  ModelPtr left;
  ModelPtr right;
  int n_left = 0;

  TCElement pullback_left(const TCElement& x) const;
  TCElement pullback_right(const TCElement& x) const;
  // Fiber integration over the left (resp. right) generator block; terms
  // not containing the whole block die, the rest land in the other model.
  TCElement integrate_left(const TCElement& x) const;
  TCElement integrate_right(const TCElement& x) const;
};

// Requires the two models to share the base and to have disjoint generator
// labels.
Correspondence make_correspondence(ModelPtr left, ModelPtr right);

// Generators in degrees 2j-1 for j = n-k+1..n with the matching entry of
// `chern` as transgression; labels are prefix followed by 2j-1.
ModelPtr make_partial_frame_model(CDGAPtr base, const std::vector<BaseElement>& chern,
                                  int k, const std::string& prefix);

// Linear enumeration of the full complex of a model: the pair (mask, base
// index) sits at position mask * dim_base + base_index.
struct ComplexIndexing {
  ModelPtr m;
  int dim_base = 0;
  int size = 0;

  explicit ComplexIndexing(ModelPtr model);

  int degree(int idx) const;
  TCElement element(int idx) const;
  std::vector<Scalar> coords(const TCElement& x) const;
  TCElement from_coords(const std::vector<Scalar>& v) const;
};

}  // namespace tgd
