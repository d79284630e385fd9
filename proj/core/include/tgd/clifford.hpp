#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "tgd/linalg.hpp"
#include "tgd/tduality.hpp"
#include "tgd/transgressive.hpp"

namespace tgd {

// Endomorphism of the word space with base-form coefficients, stored as a
// sparse matrix of base elements indexed by (target word, source word).
// An entry beta at (r, c) acts by x_c (x) e  ->  sign * x_r (x) beta e,
// where the sign moves beta past the source word, so the odd part of beta
// flips sign on odd source words.
class CliffordElement {
 public:
  CliffordElement() = default;
  explicit CliffordElement(ModelPtr m);

  static CliffordElement identity(const ModelPtr& m);
  // Left wedge by the generator: satisfies the anticommutation relations
  // with annihilation below, pairing to the identity on matching indices.
  static CliffordElement creation(const ModelPtr& m, int gen);
  // Interior product against the generator, signs past lower factors.
  static CliffordElement annihilation(const ModelPtr& m, int gen);
  // Normal-ordered word: wedge by the created block after annihilating the
  // other block in ascending index order.
  static CliffordElement word(const ModelPtr& m, Mask created, Mask annihilated);

  const ModelPtr& model() const { return model_; }
  const std::map<std::pair<Mask, Mask>, BaseElement>& entries() const { return entries_; }
  BaseElement entry(Mask row, Mask col) const;
  void set_entry(Mask row, Mask col, const BaseElement& v);

  bool is_zero() const { return entries_.empty(); }
  // Parity counts the word change and the coefficient degree together.
  bool is_odd() const;
  bool is_even() const;

  CliffordElement operator+(const CliffordElement& o) const;
  CliffordElement operator-(const CliffordElement& o) const;
  CliffordElement operator-() const;
  CliffordElement operator*(const CliffordElement& o) const;  // composition
  CliffordElement& operator+=(const CliffordElement& o);
  bool operator==(const CliffordElement& o) const;

  // Tensor with a base form on the right of every coefficient.
  CliffordElement tensor(const BaseElement& b) const;
  friend CliffordElement operator*(const Scalar& s, const CliffordElement& x);

  TCElement act(const TCElement& x) const;

 private:
  ModelPtr model_;
  std::map<std::pair<Mask, Mask>, BaseElement> entries_;
};

// Coefficients on the normal-ordered word basis; inverts the word-to-entry
// change of basis, cached per generator count.
std::map<std::pair<Mask, Mask>, BaseElement> word_decomposition(const CliffordElement& x);

// A vector field in the span of the declared base contractions plus an odd
// endomorphism-valued form.
struct CliffordSection {
  ModelPtr model;
  std::vector<Scalar> vector_part;  // one coefficient per declared contraction
  CliffordElement clifford_part;
};

CliffordSection make_section(ModelPtr m, std::vector<Scalar> vector_part,
                             CliffordElement clifford_part);

// Contraction number k extended to the whole complex, acting on base
// coefficients only, with a sign for moving past the word.
TCElement apply_contraction(const TCElement& x, int k);

TCElement clifford_act(const CliffordSection& v, const TCElement& phi);

// Full matrix of a linear map on the complex enumeration of the model.
QMatrix complex_matrix(const ModelPtr& m,
                       const std::function<TCElement(const TCElement&)>& op);

QMatrix section_matrix(const CliffordSection& v);

// Annihilation against every transgression, plus the base differential with
// its word sign, plus left wedge by the flux.  Must agree entrywise with
// the twisted differential of the complex.
QMatrix build_twisted_d_operator(const ModelPtr& m, const TCElement& flux);

// a b - (-1)^{|a||b|} b a with parity arguments 0 or 1.
QMatrix graded_commutator(const QMatrix& a, int parity_a, const QMatrix& b, int parity_b);

// Unique section acting as the given odd operator: word coefficients are
// read off unit columns, the rest must be a constant combination of the
// declared contractions.  A nonzero residual is an error.
CliffordSection decompose_operator(const ModelPtr& m, const QMatrix& op);

// {{v, d^H}, w} as graded matrix commutators, decomposed back to a section.
CliffordSection derived_bracket(const ModelPtr& m, const TCElement& flux,
                                const CliffordSection& v, const CliffordSection& w);

// Conjugation by the duality transform, with the inverse computed once and
// reused across sections.
class SectionTransport {
 public:
  explicit SectionTransport(const DualityScenario& s);

  const QMatrix& forward() const { return t_; }
  const QMatrix& backward() const { return tinv_; }
  CliffordSection map(const CliffordSection& v) const;

 private:
  ModelPtr e_, ehat_;
  QMatrix t_, tinv_;
};

CliffordSection tduality_section_map(const DualityScenario& s, const CliffordSection& v);

// Rank table of the odd endomorphism-valued forms for a single-generator
// model: the contraction span, annihilation and creation against even
// forms, the annihilation-then-creation word against odd forms, and the
// complementary creation-then-annihilation word against odd forms.
struct SphereAlgebroidTable {
  int tm_rank = 0;
  int dpsi_even = 0;
  int psi_even = 0;
  int dpsipsi_odd = 0;
  int complement_odd = 0;  // creation-then-annihilation word, odd forms
  int odd_total = 0;       // rank of the full odd component
  bool exceeds_extended = false;
};

SphereAlgebroidTable sphere_algebroid_decomposition(const ModelPtr& m);

}  // namespace tgd
