#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "support.hpp"
#include "tgd/report.hpp"
#include "tgd/scenario.hpp"

using namespace tgd;
using namespace tgdtest;

namespace {

const char* kAllFixtures[] = {"hopf_s4.scn",        "t4_self_dual.scn",
                              "t4_usual.scn",       "frame_rank2.scn",
                              "partial_frame.scn",  "relation_dual.scn",
                              "multidegree_frame.scn", "sphere_multidegree.scn",
                              "torus_sections.scn", "broken.scn"};

const char* kRecipes[] = {"hopf_s4.rcp",       "sphere_multidegree.rcp",
                          "frame_rank2.rcp",   "partial_frame.rcp",
                          "relation_dual.rcp", "multidegree_frame.rcp"};

// Error text for a failing parse, empty when it succeeds.
std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool same_scenario(const ParsedScenario& a, const ParsedScenario& b) {
  const DualityScenario& x = a.scenario;
  const DualityScenario& y = b.scenario;
  if (x.name != y.name) return false;
  if (!(x.h == y.h) || !(x.hhat == y.hhat) || !(x.f == y.f)) return false;
  if (a.sections.size() != b.sections.size()) return false;
  for (const auto& [name, v] : a.sections) {
    auto it = b.sections.find(name);
    if (it == b.sections.end()) return false;
    if (v.vector_part != it->second.vector_part) return false;
    if (!(v.clifford_part == it->second.clifford_part)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("rendering is a fixed point of parse-render on every fixture") {
  for (const char* name : kAllFixtures) {
    CAPTURE(name);
    ParsedScenario first = load_fixture(name);
    std::string once = render_scenario(first);
    ParsedScenario reparsed = parse_scenario(once);
    std::string twice = render_scenario(reparsed);
    CHECK(once == twice);
    CHECK(same_scenario(first, reparsed));
  }
}

TEST_CASE("the JSON mirror reproduces the same scenario") {
  for (const char* name : {"hopf_s4.scn", "t4_self_dual.scn", "torus_sections.scn",
                           "frame_rank2.scn"}) {
    CAPTURE(name);
    ParsedScenario text_form = load_fixture(name);
    std::string json = render_scenario_json(text_form);
    ParsedScenario from_json = parse_scenario(json);
    CHECK(same_scenario(text_form, from_json));
    CHECK(render_scenario(from_json) == render_scenario(text_form));
  }
}

TEST_CASE("expression round-trips hit the canonical spelling") {
  auto p = load_fixture("torus_sections.scn");
  const ModelPtr& m = p.scenario.e;
  const CDGAPtr& base = m->base;
  SUBCASE("base expressions") {
    for (const char* text : {"th1 + th2", "2 * th12 - 1/3 * th3", "0", "1", "-th123"}) {
      BaseElement x = parse_base_expression(text, base);
      CHECK(parse_base_expression(render_base_expression(x), base) == x);
    }
    CHECK(render_base_expression(parse_base_expression("th2 + th1", base)) ==
          "th1 + th2");
  }
  SUBCASE("model expressions") {
    for (const char* text : {"psi", "psi (x) th12 - th3", "3/2 * psi (x) th1 + 1"}) {
      TCElement x = parse_model_expression(text, m);
      CHECK(parse_model_expression(render_model_expression(x), m) == x);
    }
  }
  SUBCASE("section expressions") {
    for (const char* text :
         {"X: i1 + 2 * i3 ; C: psi[1] - dpsi[1] (x) th12", "C: th1", "X: i2", "0"}) {
      CliffordSection v = parse_section_expression(text, m);
      CliffordSection again =
          parse_section_expression(render_section_expression(v), m);
      CHECK(v.vector_part == again.vector_part);
      CHECK(v.clifford_part == again.clifford_part);
    }
  }
}

TEST_CASE("a sections file parses over a supplied model") {
  auto p = load_fixture("torus_sections.scn");
  std::string text = "sections {\n  a = X: i1\n  b = C: psi[1] (x) th12 + th2\n}\n";
  auto sections = parse_sections_file(text, p.scenario.e);
  REQUIRE(sections.size() == 2);
  CHECK(sections.count("a") == 1);
  CHECK(sections.count("b") == 1);
  CHECK(sections["a"].vector_part[0] == 1);
}

TEST_CASE("fixture sections carry the declared operators") {
  auto p = load_fixture("torus_sections.scn");
  REQUIRE(p.sections.size() == 4);
  const CliffordSection& mix = p.sections.at("mix");
  CHECK(mix.vector_part == std::vector<Scalar>{1, 0, 2});
  CHECK_FALSE(mix.clifford_part.is_zero());
  const CliffordSection& ix = p.sections.at("ix");
  CHECK(ix.vector_part == std::vector<Scalar>{1, 0, 0});
  CHECK(ix.clifford_part.is_zero());
}

TEST_CASE("lexical and syntactic errors carry line and column") {
  using doctest::Contains;
  // Unterminated name string.
  CHECK_THROWS_WITH_AS(parse_scenario("scenario \"oops\n"), Contains("line 1"), Error);
  // A number cannot touch a label without '*'.
  std::string good = read_file(scenario_path("hopf_s4.scn"));
  std::string bad = good;
  bad.replace(bad.find("- psi (x) u"), 11, "2 psi (x) u");
  std::string msg = parse_error(bad);
  CHECK(msg.find("line") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  // '*' with nothing to bind to at the end of the file.
  std::string dangling = good.substr(0, good.find("kernel")) + "kernel F = 2 * ";
  CHECK(parse_error(dangling).find("expected") != std::string::npos);
  // Unknown base label inside a sum.
  std::string unknown = good;
  unknown.replace(unknown.find("psi: 3 = u"), 10, "psi: 3 = v");
  CHECK(parse_error(unknown).find("'v'") != std::string::npos);
  // Unterminated block.
  CHECK_THROWS_AS(parse_scenario("scenario \"x\"\nbase {\n  basis one: 0\n"), Error);
}

TEST_CASE("semantic errors name the offending entry") {
  // The differential must land one degree up; the strict reader rejects
  // the base before any fibration is read.
  std::string text =
      "scenario \"bad\"\n"
      "base {\n"
      "  basis one: 0  x: 2  y: 2\n"
      "  unit one\n"
      "  d x = y\n"
      "}\n"
      "fibration E {\n  gen psi: 1 = 0\n}\n"
      "fibration Ehat {\n  gen psih: 1 = 0\n}\n"
      "twist H = 0\n"
      "twist Hhat = 0\n"
      "kernel F = - psi ^ psih\n";
  std::string msg = parse_error(text);
  CHECK(msg.find("differential degree") != std::string::npos);

  // An even fiber generator is rejected when the fibration is built.
  std::string even_gen = text;
  even_gen.replace(even_gen.find("  d x = y\n"), 10, "");
  even_gen.replace(even_gen.find("gen psi: 1"), 10, "gen psi: 2");
  CHECK_FALSE(parse_error(even_gen).empty());
}

TEST_CASE("structural file problems are reported by block") {
  std::string good = read_file(scenario_path("hopf_s4.scn"));
  SUBCASE("missing kernel") {
    std::string text = good.substr(0, good.find("kernel"));
    CHECK_FALSE(parse_error(text).empty());
  }
  SUBCASE("duplicate twist") {
    std::string text = good + "twist H = 0\n";
    CHECK_FALSE(parse_error(text).empty());
  }
  SUBCASE("missing scenario header") {
    std::string text = good.substr(good.find("base"));
    CHECK_FALSE(parse_error(text).empty());
  }
}

TEST_CASE("recipes rebuild the bundled scenarios") {
  for (const char* name : kRecipes) {
    CAPTURE(name);
    std::string text = read_file(scenario_path(name));
    DualityScenario s = run_recipe(text);
    std::string scn(name);
    scn.replace(scn.find(".rcp"), 4, ".scn");
    ParsedScenario bundled = load_fixture(scn);
    CHECK(s.h == bundled.scenario.h);
    CHECK(s.hhat == bundled.scenario.hhat);
    CHECK(s.f == bundled.scenario.f);
    CHECK(run_checks(s, false).dual());
  }
}

TEST_CASE("recipes report missing keys by name") {
  std::string text = read_file(scenario_path("hopf_s4.rcp"));
  std::string::size_type at = text.find("euler_hat");
  REQUIRE(at != std::string::npos);
  std::string broken = text.substr(0, at);
  try {
    run_recipe(broken);
    FAIL("expected a missing-key error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("euler_hat") != std::string::npos);
  }
  CHECK_THROWS_AS(run_recipe("recipe comet\n"), Error);
}

TEST_CASE("the renderer orders terms deterministically") {
  auto p = load_fixture("t4_self_dual.scn");
  std::string once = render_scenario(p);
  for (int i = 0; i < 3; ++i) CHECK(render_scenario(parse_scenario(once)) == once);
}
