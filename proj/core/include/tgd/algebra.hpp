#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tgd/rational.hpp"

namespace tgd {

// Sparse rational vector over a labelled basis; keys are basis indices and
// stored coefficients are never zero.
using SparseVec = std::map<int, Scalar>;

// A finite-dimensional graded-commutative differential algebra presented by
// a labelled homogeneous basis, structure constants, a degree +1
// differential, and optionally some degree -1 contraction operators.
// Instances are immutable once built; share them via shared_ptr.
struct FiniteCDGA {
  std::vector<std::string> labels;
  std::vector<int> degrees;
  int unit = -1;
  std::vector<std::vector<SparseVec>> products;  // products[i][j] = e_i * e_j
  std::vector<SparseVec> differential;           // differential[i] = d(e_i)

  struct Contraction {
    std::string name;
    std::vector<SparseVec> images;  // images[i] = iota(e_i)
  };
  std::vector<Contraction> contractions;

  int dim() const { return int(labels.size()); }
  int degree(int i) const { return degrees[std::size_t(i)]; }
  int index_of(const std::string& label) const;        // -1 when absent
  int contraction_index(const std::string& name) const;  // -1 when absent

  // Structural identity; used to let independently parsed copies of the
  // same algebra interoperate.
  bool same_structure(const FiniteCDGA& o) const;
};

using CDGAPtr = std::shared_ptr<const FiniteCDGA>;

// Incremental construction by label.  Omitted products and differentials
// default to zero; the unit row and column and the graded-commutative
// mirror of each declared product are filled in automatically.
class CDGABuilder {
public:
  CDGABuilder& element(const std::string& label, int degree);
  CDGABuilder& unit(const std::string& label);
  CDGABuilder& product(const std::string& a, const std::string& b,
                       const std::vector<std::pair<std::string, Scalar>>& value);
  CDGABuilder& differential(const std::string& a,
                            const std::vector<std::pair<std::string, Scalar>>& value);
  CDGABuilder& contraction(const std::string& name,
                           const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Scalar>>>>& images);
  CDGAPtr build();

private:
  int require(const std::string& label) const;
  SparseVec to_sparse(const std::vector<std::pair<std::string, Scalar>>& value) const;

  FiniteCDGA a_;
  std::map<std::pair<int, int>, SparseVec> declared_products_;
};

// Element of a FiniteCDGA: a sparse rational combination of basis elements.
// Mixed degrees are allowed; the degree queries below are explicit about
// homogeneity.  Elements remember their algebra and refuse to combine
// across structurally different ones.
class BaseElement {
public:
  BaseElement() = default;
  explicit BaseElement(CDGAPtr alg) : alg_(std::move(alg)) {}

  static BaseElement basis(CDGAPtr alg, int index);
  static BaseElement unit(CDGAPtr alg);

  const CDGAPtr& algebra() const { return alg_; }
  const SparseVec& terms() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  Scalar coefficient(int index) const;

  BaseElement operator+(const BaseElement& o) const;
  BaseElement operator-(const BaseElement& o) const;
  BaseElement operator-() const;
  BaseElement operator*(const BaseElement& o) const;  // algebra product
  friend BaseElement operator*(const Scalar& s, const BaseElement& x);
  BaseElement& operator+=(const BaseElement& o);
  bool operator==(const BaseElement& o) const;

  BaseElement d() const;
  BaseElement contract(int contraction_index) const;

  bool is_homogeneous() const;
  // Degree of a homogeneous nonzero element; fails on mixed input.
  int degree() const;
  int max_degree() const;  // 0 for the zero element
  BaseElement homogeneous_component(int degree) const;
  BaseElement even_part() const;
  BaseElement odd_part() const;

  void add_term(int index, const Scalar& coeff);  // canonicalizes away zeros

private:
  void check_compatible(const BaseElement& o) const;

  CDGAPtr alg_;
  SparseVec c_;
};

// Axiom check; every violated axiom is reported with a witness.
struct Violation {
  std::string axiom;
  std::string detail;
};
struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string render() const;
};

// Verifies: grading (non-negative, unit in degree 0, connectivity), degree
// additivity of products, graded commutativity, associativity, unit law,
// d degree +1, d*d = 0, Leibniz, and for each contraction: degree -1, odd
// derivation rule, square zero, pairwise anticommutativity, and that the
// induced degree-0 Lie operator d*iota + iota*d is a derivation.
ValidationReport validate(const FiniteCDGA& a);

// True when the two pointers denote the same algebra, by identity or by
// structure.  Used everywhere elements from different sources meet.
bool same_algebra(const CDGAPtr& a, const CDGAPtr& b);

}  // namespace tgd
