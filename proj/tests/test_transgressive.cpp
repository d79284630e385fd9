#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "support.hpp"
#include "tgd/transgressive.hpp"

using namespace tgd;
using namespace tgdtest;

namespace {

// Model with generators over the torus base so coefficients can be odd:
// every sign path in the wedge gets exercised.
ModelPtr torus_with_gens(int n) { return free_odd_model(torus3_base(), n, "psi"); }

BaseElement base_by_label(const CDGAPtr& a, const std::string& l) {
  return BaseElement::basis(a, a->index_of(l));
}

}  // namespace

TEST_CASE("wedge of word monomials matches the bubble-sort sign oracle") {
  ModelPtr m = torus_with_gens(4);
  const CDGAPtr& base = m->base;
  // Coefficients of pure parity on both sides, all 16 x 16 word pairs.
  BaseElement even = BaseElement::unit(base);
  BaseElement odd = base_by_label(base, "th1");
  for (Mask s = 0; s < 16; ++s)
    for (Mask t = 0; t < 16; ++t)
      for (const BaseElement* a : {&even, &odd})
        for (const BaseElement* b : {&even, &odd}) {
          TCElement left = TCElement::monomial(m, s, *a);
          TCElement right = TCElement::monomial(m, t, *b);
          TCElement got = left * right;
          if (s & t) {
            CHECK(got.is_zero());
            continue;
          }
          int deg_a = (a == &odd) ? 1 : 0;
          int sign = wedge_sign_oracle(s, t, deg_a);
          TCElement want = TCElement::monomial(m, s | t, Scalar(sign) * (*a * *b));
          CHECK(got == want);
        }
}

TEST_CASE("wedge is associative and graded commutative on random sums") {
  ModelPtr m = torus_with_gens(3);
  const CDGAPtr& base = m->base;
  std::mt19937_64 rng(101);
  auto random_element = [&] {
    TCElement x(m);
    for (int t = 0; t < 4; ++t) {
      Mask s = Mask(rng() % 8);
      int bi = int(rng() % base->dim());
      int c = int(rng() % 7) - 3;
      x += Scalar(c) * TCElement::monomial(m, s, BaseElement::basis(base, bi));
    }
    return x;
  };
  for (int trial = 0; trial < 25; ++trial) {
    TCElement x = random_element(), y = random_element(), z = random_element();
    CHECK((x * y) * z == x * (y * z));
  }
  // Graded commutativity on homogeneous pieces.
  for (int trial = 0; trial < 25; ++trial) {
    TCElement x = random_element(), y = random_element();
    for (int dx = 0; dx <= 6; ++dx)
      for (int dy = 0; dy <= 6; ++dy) {
        TCElement xh = x.homogeneous_component(dx), yh = y.homogeneous_component(dy);
        if (xh.is_zero() || yh.is_zero()) continue;
        Scalar sign = (dx % 2 == 1 && dy % 2 == 1) ? -1 : 1;
        CHECK(xh * yh == sign * (yh * xh));
      }
  }
}

TEST_CASE("the differential squares to zero on every fixture model") {
  for (const char* name : {"hopf_s4.scn", "t4_usual.scn", "frame_rank2.scn",
                           "partial_frame.scn", "relation_dual.scn", "torus_sections.scn"}) {
    auto p = load_fixture(name);
    for (const ModelPtr& m : {p.scenario.e, p.scenario.ehat}) {
      ComplexIndexing ix(m);
      for (int i = 0; i < ix.size; ++i) CHECK(ix.element(i).d().d().is_zero());
    }
  }
}

TEST_CASE("the differential obeys the graded Leibniz rule") {
  auto p = load_fixture("relation_dual.scn");
  ModelPtr m = p.scenario.e;
  ComplexIndexing ix(m);
  for (int i = 0; i < ix.size; ++i) {
    TCElement x = ix.element(i);
    int dx = ix.degree(i);
    for (int j = 0; j < ix.size; ++j) {
      TCElement y = ix.element(j);
      Scalar sign = (dx % 2 == 1) ? -1 : 1;
      CHECK((x * y).d() == x.d() * y + sign * (x * y.d()));
    }
  }
}

TEST_CASE("generator transgressions drive the differential") {
  auto p = load_fixture("hopf_s4.scn");
  ModelPtr e = p.scenario.e;
  TCElement psi = TCElement::generator(e, 0);
  TCElement u = TCElement::from_base(e, base_by_label(e->base, "u"));
  CHECK(psi.d() == u);
  CHECK((psi * u).d() == u * u);
  CHECK(u.d().is_zero());
}

TEST_CASE("pullbacks are ring maps landing on the right generators") {
  auto p = load_fixture("frame_rank2.scn");
  const DualityScenario& s = p.scenario;
  const Correspondence& corr = s.corr;
  ComplexIndexing ix(s.e);
  for (int i = 0; i < ix.size; ++i)
    for (int j = 0; j < ix.size; ++j) {
      TCElement x = ix.element(i), y = ix.element(j);
      CHECK(corr.pullback_left(x * y) == corr.pullback_left(x) * corr.pullback_left(y));
    }
  // Pullback commutes with d; generator i goes to joint generator i.
  for (int i = 0; i < ix.size; ++i) {
    TCElement x = ix.element(i);
    CHECK(corr.pullback_left(x.d()) == corr.pullback_left(x).d());
  }
  CHECK(corr.pullback_left(TCElement::generator(s.e, 1)) ==
        TCElement::generator(corr.total, 1));
  CHECK(corr.pullback_right(TCElement::generator(s.ehat, 0)) ==
        TCElement::generator(corr.total, corr.n_left));
}

TEST_CASE("fiber integration extracts blocks with the oracle sign") {
  auto p = load_fixture("t4_self_dual.scn");
  const Correspondence& corr = p.scenario.corr;
  const int nl = corr.n_left;
  const Mask left_block = (Mask{1} << nl) - 1;
  const CDGAPtr& base = corr.total->base;
  for (Mask s = 0; s < (Mask{1} << corr.total->n()); ++s) {
    TCElement x = TCElement::monomial(corr.total, s, BaseElement::unit(base));
    TCElement got = corr.integrate_left(x);
    if ((s & left_block) != left_block) {
      CHECK(got.is_zero());
      continue;
    }
    int sign = extract_right_sign_oracle(s, left_block, 0);
    CHECK(got == TCElement::monomial(corr.right, s >> nl, Scalar(sign) * BaseElement::unit(base)));
  }
}

TEST_CASE("integration in stages equals integration in one go") {
  // Integrate the right block, then the left block of what remains, and
  // compare with the full-block coefficient.
  auto p = load_fixture("t4_self_dual.scn");
  const Correspondence& corr = p.scenario.corr;
  ComplexIndexing ix(corr.total);
  for (int i = 0; i < ix.size; ++i) {
    TCElement x = ix.element(i);
    BaseElement full = integrate_full(x);
    BaseElement staged = integrate_full(corr.integrate_left(x));
    CHECK(staged == full);
  }
}

TEST_CASE("integration commutes with the differential on every basis element") {
  for (const char* name : {"hopf_s4.scn", "frame_rank2.scn", "relation_dual.scn",
                           "sphere_multidegree.scn"}) {
    auto p = load_fixture(name);
    const Correspondence& corr = p.scenario.corr;
    ComplexIndexing ix(corr.total);
    for (int i = 0; i < ix.size; ++i) {
      TCElement x = ix.element(i);
      CHECK(corr.integrate_left(x.d()) == corr.integrate_left(x).d());
      CHECK(corr.integrate_right(x.d()) == corr.integrate_right(x).d());
    }
  }
}

TEST_CASE("the projection formula holds against arbitrary right factors") {
  auto p = load_fixture("frame_rank2.scn");
  const Correspondence& corr = p.scenario.corr;
  ComplexIndexing total_ix(corr.total);
  ComplexIndexing right_ix(corr.right);
  for (int i = 0; i < total_ix.size; ++i)
    for (int j = 0; j < right_ix.size; ++j) {
      TCElement x = total_ix.element(i);
      TCElement y = right_ix.element(j);
      CHECK(corr.integrate_left(x * corr.pullback_right(y)) ==
            corr.integrate_left(x) * y);
    }
}

TEST_CASE("exp of an even kernel multiplies to the unit against its negative") {
  for (const char* name : {"hopf_s4.scn", "t4_self_dual.scn", "t4_usual.scn",
                           "sphere_multidegree.scn"}) {
    auto p = load_fixture(name);
    const TCElement& f = p.scenario.f;
    CHECK(exp_wedge(f) * exp_wedge(-f) == TCElement::unit(f.model()));
  }
}

TEST_CASE("exp rejects odd and non-terminating arguments") {
  ModelPtr m = torus_with_gens(2);
  TCElement odd = TCElement::generator(m, 0);
  CHECK_THROWS_AS(exp_wedge(odd), Error);
  TCElement with_unit = TCElement::unit(m);
  CHECK_THROWS_AS(exp_wedge(with_unit), Error);
}

TEST_CASE("substitution is a ring map fixing the base") {
  // Send psi1 -> psi1 + psi2, psi2 -> psi2 on a rank-2 model and check
  // multiplicativity plus base fixing.
  ModelPtr m = torus_with_gens(2);
  std::vector<TCElement> images = {
      TCElement::generator(m, 0) + TCElement::generator(m, 1),
      TCElement::generator(m, 1)};
  ComplexIndexing ix(m);
  for (int i = 0; i < ix.size; ++i)
    for (int j = 0; j < ix.size; ++j) {
      TCElement x = ix.element(i), y = ix.element(j);
      CHECK(apply_substitution(x * y, m, images) ==
            apply_substitution(x, m, images) * apply_substitution(y, m, images));
    }
  TCElement basic = TCElement::from_base(m, base_by_label(m->base, "th12"));
  CHECK(apply_substitution(basic, m, images) == basic);
}

TEST_CASE("model construction rejects bad generator data") {
  CDGAPtr base = torus3_base();
  SUBCASE("even degree") {
    OddGenerator g;
    g.label = "psi";
    g.degree = 2;
    g.transgression = BaseElement(base);
    CHECK_THROWS_AS(make_model(base, {g}), Error);
  }
  SUBCASE("transgression of the wrong degree") {
    OddGenerator g;
    g.label = "psi";
    g.degree = 1;
    g.transgression = base_by_label(base, "th123");
    CHECK_THROWS_AS(make_model(base, {g}), Error);
  }
  SUBCASE("mixed-degree transgression") {
    CDGABuilder b;
    b.element("one", 0).element("x", 2).element("y", 4).element("z", 6);
    b.unit("one");
    CDGAPtr a = b.build();
    OddGenerator g;
    g.label = "psi";
    g.degree = 3;
    g.transgression = BaseElement::basis(a, 1) + BaseElement::basis(a, 2);
    CHECK_THROWS_AS(make_model(a, {g}), Error);
  }
  SUBCASE("non-closed transgression") {
    CDGABuilder b;
    b.element("one", 0).element("x", 2).element("y", 3);
    b.unit("one");
    b.differential("x", {{"y", 1}});
    CDGAPtr a = b.build();
    OddGenerator g;
    g.label = "psi";
    g.degree = 1;
    g.transgression = BaseElement::basis(a, 1);
    CHECK_THROWS_AS(make_model(a, {g}), Error);
  }
  SUBCASE("label collision with the base") {
    OddGenerator g;
    g.label = "th1";
    g.degree = 1;
    g.transgression = BaseElement(base);
    CHECK_THROWS_AS(make_model(base, {g}), Error);
  }
  SUBCASE("too many generators") {
    std::vector<OddGenerator> gens(17);
    for (int i = 0; i < 17; ++i) {
      gens[std::size_t(i)].label = "g" + std::to_string(i);
      gens[std::size_t(i)].degree = 1;
      gens[std::size_t(i)].transgression = BaseElement(base);
    }
    CHECK_THROWS_AS(make_model(base, gens), Error);
  }
}

TEST_CASE("correspondence layout puts left generators in the low bits") {
  auto p = load_fixture("hopf_s4.scn");
  const Correspondence& corr = p.scenario.corr;
  CHECK(corr.n_left == 1);
  CHECK(corr.total->n() == 2);
  CHECK(corr.total->gens[0].label == "psi");
  CHECK(corr.total->gens[1].label == "psih");
}
