#pragma once

#include <map>
#include <string>

#include "tgd/clifford.hpp"
#include "tgd/tduality.hpp"

namespace tgd {

// A scenario file plus the optional named sections declared inside it.
// Sections live over the first model.
struct ParsedScenario {
  DualityScenario scenario;
  std::map<std::string, CliffordSection> sections;
};

// Accepts the block text format or its JSON mirror (sniffed on the first
// non-space byte).  Lexical and syntactic problems report line and column;
// semantic problems name the offending entry.
ParsedScenario parse_scenario(const std::string& text);

// Canonical rendering: terms ordered by word mask then basis index, one
// deterministic layout.  render/parse round-trips exactly.
std::string render_scenario(const ParsedScenario& s);
std::string render_scenario_json(const ParsedScenario& s);

// Expression-level entry points, shared by the file parser and the CLI.
BaseElement parse_base_expression(const std::string& text, const CDGAPtr& base);
TCElement parse_model_expression(const std::string& text, const ModelPtr& m);
CliffordSection parse_section_expression(const std::string& text, const ModelPtr& m);

std::string render_base_expression(const BaseElement& x);
std::string render_model_expression(const TCElement& x);
std::string render_section_expression(const CliffordSection& v);

// A standalone `sections { ... }` file, interpreted over the given model.
std::map<std::string, CliffordSection> parse_sections_file(const std::string& text,
                                                           const ModelPtr& m);

// Recipe files reuse the scenario blocks plus recipe-specific keys and run
// the matching builder.  Recipes: sphere, frame1, frame2, relation,
// multidegree.
DualityScenario run_recipe(const std::string& text);

}  // namespace tgd
