#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tgd/linalg.hpp"
#include "tgd/transgressive.hpp"

namespace tgd {

// Two models over a common base, candidate twists on each side, and a
// candidate kernel on the correspondence.  The twists are validated odd
// and closed, the kernel even; whether the pair is actually dual is what
// the checks below decide.
struct DualityScenario {
  std::string name;
  ModelPtr e;
  ModelPtr ehat;
  Correspondence corr;
  TCElement h;     // over e
  TCElement hhat;  // over ehat
  TCElement f;     // over corr.total
};

DualityScenario make_scenario(std::string name, ModelPtr e, ModelPtr ehat, TCElement h,
                              TCElement hhat, TCElement f);

// Sides exchanged; the kernel picks up the word-reorder signs and an
// overall minus.  No verdict is implied: run the checks on the result.
DualityScenario swapped(const DualityScenario& s);

// d(F) - pullback(H) + pullback(Hhat), which must vanish exactly.
struct GerbeResult {
  bool ok = false;
  TCElement residual;
};
GerbeResult check_gerbe_trivialization(const DualityScenario& s);

// Constant-coefficient part of the kernel split by word support: words in
// the first model only (the empty word counts here), words in the second
// only, and the strictly mixed table.
struct KernelParts {
  TCElement f_e;     // over e
  TCElement f_ehat;  // over ehat
  std::map<std::pair<Mask, Mask>, Scalar> mixed;
};
KernelParts extract_kernel_parts(const DualityScenario& s);

// Matrix of x -> integrate(exp(F_mixed) wedge pullback(x)) on the word
// bases of the two fibers.  Only the strictly mixed constant part of the
// kernel enters; pure-side terms cannot change invertibility.
struct NondegeneracyResult {
  bool ok = false;
  bool structural_failure = false;  // generator counts differ
  std::string note;
  QMatrix matrix;  // 2^n_ehat rows, 2^n_e columns
};
NondegeneracyResult check_nondegeneracy(const DualityScenario& s);

// When every strictly mixed constant term pairs one generator with one
// dual generator, invertibility reduces to a determinant of the pairing
// matrix.
enum class ShortcutVerdict { Invertible, Singular, NotApplicable };
struct ShortcutResult {
  ShortcutVerdict verdict = ShortcutVerdict::NotApplicable;
  QMatrix pairing;  // n_e x n_ehat when applicable
};
ShortcutResult quadratic_shortcut(const DualityScenario& s);

// integrate(exp(F) wedge pullback(x)) for x over the first model; linear
// over basic coefficients multiplied on the right.
TCElement tau_transform(const DualityScenario& s, const TCElement& x);

// Full matrix of the transform on the complex enumerations of the two
// models (columns indexed by the first model's complex).
QMatrix tau_matrix(const DualityScenario& s);

bool tau_invertible(const DualityScenario& s);

// tau(twisted_d(H, x)) == twisted_d(Hhat, tau(x)) on every complex basis
// element; the witness is the first failing basis element.
struct ChainMapResult {
  bool ok = false;
  TCElement witness;
};
ChainMapResult verify_chain_map(const DualityScenario& s);

// Change of generating set: one invertible block per generator degree
// (acting on that degree's generators in model order) plus per-generator
// correction terms built from strictly lower-degree generators whose
// differential is purely basic.
struct GeneratorChange {
  std::map<int, QMatrix> blocks;
  std::vector<TCElement> corrections;  // over the source model; may be empty
};

struct ChangedModel {
  ModelPtr model;
  std::vector<TCElement> new_in_old;  // each new generator inside the old model
  std::vector<TCElement> old_in_new;  // each old generator inside the new model
};

ChangedModel change_generating_set(const ModelPtr& m, const GeneratorChange& g);

// Product of the block determinants, the factor the top word coefficient
// picks up under the change.
Scalar change_determinant(const ModelPtr& m, const GeneratorChange& g);

// ---------------------------------------------------------------------------
// Builders.  Each returns a scenario that passes the duality checks, or
// reports the violated precondition.

// One-leg twist: every word appearing in the twist has at most one
// generator.  The dual transgressions are the single-generator
// coefficients scaled by the matching multiplier.
DualityScenario construct_frame_dual_I(const ModelPtr& e, const TCElement& h,
                                       const std::vector<Scalar>& lambda);

// Same pattern against a dual with k extra low degrees skipped; the first
// k dual characteristic representatives are free data, validated for
// degree and closedness only.
DualityScenario construct_frame_dual_II(const ModelPtr& e, const TCElement& h, int k,
                                        const std::vector<Scalar>& lambda,
                                        const std::vector<BaseElement>& extra_chern);

// Both sides generated from characteristic data tied by one exact
// relation: sum over i of lambda[k+i] c[n-i] chat[k+i] plus d(h) must
// vanish identically in the base.
DualityScenario construct_from_relation(CDGAPtr base, const std::vector<BaseElement>& chern,
                                        const std::vector<BaseElement>& chern_hat,
                                        const std::vector<Scalar>& lambda, int k,
                                        const BaseElement& h);

// One relation per degree: c[i] chat[i] + d(h[i]) = 0 for the top k
// degrees, twists summed across degrees.
DualityScenario construct_multidegree_frame_dual(CDGAPtr base,
                                                 const std::vector<BaseElement>& chern,
                                                 const std::vector<BaseElement>& chern_hat,
                                                 int k, const std::vector<BaseElement>& h_list);

// Single-generator duals: splits the twist along the generator, divides
// the fiber component by the requested dual transgression in base
// cohomology, and assembles the mixed-degree kernel.  Fails when no
// quotient with invertible constant part exists.
DualityScenario construct_sphere_dual(const ModelPtr& e, const TCElement& h,
                                      const BaseElement& euler_hat);

// The first degree where the fiber integral of the twist has a nonzero
// class must be one more than the dual generator degree.
struct SphereDegreeResult {
  bool ok = false;
  bool vacuous = false;   // fiber integral exact in every degree
  int first_degree = -1;  // lowest degree with a nonzero class, -1 if none
  int expected_degree = -1;
};
SphereDegreeResult check_dual_sphere_degree(const DualityScenario& s);

}  // namespace tgd
