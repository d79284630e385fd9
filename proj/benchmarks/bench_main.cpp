// Microbenchmarks for the hot paths: wedge products on a full word algebra,
// the duality transform matrix, and the nondegeneracy check.

#include <benchmark/benchmark.h>

#include "tgd/algebra.hpp"
#include "tgd/tduality.hpp"
#include "tgd/transgressive.hpp"

namespace {

using namespace tgd;

CDGAPtr point_base() {
  CDGABuilder b;
  b.element("one", 0);
  b.unit("one");
  return b.build();
}

// n odd degree-1 generators with zero transgression over a point.
ModelPtr torus_model(int n, const std::string& prefix) {
  CDGAPtr base = point_base();
  std::vector<OddGenerator> gens;
  for (int i = 0; i < n; ++i) {
    OddGenerator g;
    g.label = prefix + std::to_string(i + 1);
    g.degree = 1;
    g.transgression = BaseElement(base);
    gens.push_back(g);
  }
  return make_model(base, gens);
}

// Self-dual torus pair: kernel pairing each generator with its partner.
DualityScenario torus_scenario(int n) {
  ModelPtr e = torus_model(n, "psi");
  ModelPtr ehat = torus_model(n, "psih");
  Correspondence corr = make_correspondence(e, ehat);
  TCElement f(corr.total);
  for (int i = 0; i < n; ++i) {
    Mask m = (Mask{1} << i) | (Mask{1} << (n + i));
    f = f + TCElement::monomial(corr.total, m, BaseElement::unit(corr.total->base));
  }
  return make_scenario("bench", e, ehat, TCElement(e), TCElement(ehat), f);
}

void BM_WedgeFullWords(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ModelPtr m = torus_model(n, "psi");
  BaseElement one = BaseElement::unit(m->base);
  std::vector<TCElement> words;
  for (Mask s = 0; s < (Mask{1} << n); ++s)
    words.push_back(TCElement::monomial(m, s, one));
  size_t i = 0, j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(words[i] * words[j]);
    i = (i + 3) % words.size();
    j = (j + 5) % words.size();
  }
}
BENCHMARK(BM_WedgeFullWords)->Arg(4)->Arg(6)->Arg(8);

void BM_TauMatrix(benchmark::State& state) {
  DualityScenario s = torus_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tau_matrix(s));
}
BENCHMARK(BM_TauMatrix)->Arg(2)->Arg(3)->Arg(4);

void BM_Nondegeneracy(benchmark::State& state) {
  DualityScenario s = torus_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_nondegeneracy(s));
}
BENCHMARK(BM_Nondegeneracy)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
