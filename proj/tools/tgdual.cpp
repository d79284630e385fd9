// Command-line front end.  Every subcommand reads scenario or recipe files,
// runs the library, and prints deterministic text (or JSON with --machine).
//
// Exit codes: 0 success / duality confirmed, 1 duality refuted, 2 malformed
// input, 3 a construction's preconditions fail, 4 internal error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tgd/cohomology.hpp"
#include "tgd/error.hpp"
#include "tgd/report.hpp"
#include "tgd/scenario.hpp"

namespace {

constexpr int kExitDual = 0;
constexpr int kExitNotDual = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInternal = 4;

int exit_code_for(const tgd::Error& e) {
  switch (e.kind()) {
    case tgd::ErrorKind::InvalidInput: return kExitBadInput;
    case tgd::ErrorKind::Precondition: return kExitPrecondition;
    case tgd::ErrorKind::Internal: return kExitInternal;
  }
  return kExitInternal;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) tgd::fail_input("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

tgd::ParsedScenario load_scenario(const std::string& path) {
  try {
    return tgd::parse_scenario(slurp(path));
  } catch (const tgd::Error& e) {
    if (e.kind() == tgd::ErrorKind::InvalidInput)
      tgd::fail_input(path + ": " + e.what());
    throw;
  }
}

void emit(const std::string& text) {
  std::cout << text;
  if (text.empty() || text.back() != '\n') std::cout << '\n';
}

int cmd_validate(const std::string& path, bool machine) {
  tgd::ParsedScenario p = load_scenario(path);
  tgd::ValidationReport rep = tgd::validate(*p.scenario.e->base);
  if (machine) {
    nlohmann::ordered_json j;
    j["scenario"] = p.scenario.name;
    j["ok"] = rep.ok();
    auto& arr = j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : rep.violations) arr.push_back({{"axiom", v.axiom}, {"detail", v.detail}});
    emit(j.dump(2));
  } else {
    std::cout << "scenario: " << p.scenario.name << "\n";
    emit(rep.render());
  }
  return rep.ok() ? kExitDual : kExitBadInput;
}

int cmd_check(const std::string& path, bool machine, bool with_cohomology) {
  tgd::ParsedScenario p = load_scenario(path);
  tgd::ScenarioReport rep = tgd::run_checks(p.scenario, with_cohomology);
  emit(machine ? tgd::render_report_json(rep) : tgd::render_report_text(rep));
  return rep.dual() ? kExitDual : kExitNotDual;
}

int cmd_transform(const std::string& path, const std::string& expr, bool machine) {
  tgd::ParsedScenario p = load_scenario(path);
  tgd::TCElement x = tgd::parse_model_expression(expr, p.scenario.e);
  tgd::TCElement y = tgd::tau_transform(p.scenario, x);
  if (machine) {
    nlohmann::ordered_json j;
    j["scenario"] = p.scenario.name;
    j["input"] = tgd::render_model_expression(x);
    j["output"] = tgd::render_model_expression(y);
    emit(j.dump(2));
  } else {
    emit(tgd::render_model_expression(y));
  }
  return kExitDual;
}

void print_graded(std::ostream& os, const std::vector<int>& dims) {
  for (size_t i = 0; i < dims.size(); ++i) os << (i ? " " : "") << dims[i];
  os << "\n";
}

int cmd_cohomology(const std::string& path, const std::string& side, bool twisted, bool machine) {
  tgd::ParsedScenario p = load_scenario(path);
  const bool do_e = side.empty() || side == "E";
  const bool do_ehat = side.empty() || side == "Ehat";

  nlohmann::ordered_json j;
  j["scenario"] = p.scenario.name;
  std::ostringstream out;
  out << "scenario: " << p.scenario.name << "\n";

  auto one_side = [&](const char* label, const tgd::ModelPtr& m, const tgd::TCElement& flux) {
    if (twisted) {
      tgd::ParityCohomology pc = tgd::twisted_cohomology_dims(m, flux);
      out << label << " twisted: even " << pc.even_dim << ", odd " << pc.odd_dim << "\n";
      j[label]["twisted"] = {{"even", pc.even_dim}, {"odd", pc.odd_dim}};
    } else {
      tgd::GradedCohomology gc = tgd::cohomology_dims(m);
      out << label << " dims: ";
      print_graded(out, gc.dims);
      j[label]["dims"] = gc.dims;
    }
  };
  if (do_e) one_side("E", p.scenario.e, p.scenario.h);
  if (do_ehat) one_side("Ehat", p.scenario.ehat, p.scenario.hhat);

  emit(machine ? j.dump(2) : out.str());
  return kExitDual;
}

int cmd_bracket(const std::string& path, const std::string& sections_path, bool machine) {
  tgd::ParsedScenario p = load_scenario(path);
  std::map<std::string, tgd::CliffordSection> sections = p.sections;
  if (!sections_path.empty()) {
    auto extra = tgd::parse_sections_file(slurp(sections_path), p.scenario.e);
    for (auto& [name, sec] : extra) sections[name] = sec;
  }
  if (sections.empty())
    tgd::fail_input("no sections: declare a sections block or pass --sections");

  tgd::SectionTransport transport(p.scenario);

  nlohmann::ordered_json j;
  j["scenario"] = p.scenario.name;
  std::ostringstream out;
  out << "scenario: " << p.scenario.name << "\n";

  auto& jsec = j["sections"] = nlohmann::ordered_json::object();
  for (const auto& [name, sec] : sections) {
    std::string r = tgd::render_section_expression(sec);
    out << "section " << name << " = " << r << "\n";
    jsec[name] = r;
  }
  auto& jbr = j["brackets"] = nlohmann::ordered_json::object();
  for (const auto& [na, va] : sections)
    for (const auto& [nb, vb] : sections) {
      tgd::CliffordSection br =
          tgd::derived_bracket(p.scenario.e, p.scenario.h, va, vb);
      std::string r = tgd::render_section_expression(br);
      out << "bracket [" << na << ", " << nb << "] = " << r << "\n";
      jbr[na + "," + nb] = r;
    }
  auto& jtr = j["transported"] = nlohmann::ordered_json::object();
  for (const auto& [name, sec] : sections) {
    std::string r = tgd::render_section_expression(transport.map(sec));
    out << "transport " << name << " = " << r << "\n";
    jtr[name] = r;
  }

  emit(machine ? j.dump(2) : out.str());
  return kExitDual;
}

int cmd_construct(const std::string& path, const std::string& out_path, bool machine) {
  std::string text = slurp(path);
  tgd::DualityScenario s;
  try {
    s = tgd::run_recipe(text);
  } catch (const tgd::Error& e) {
    if (e.kind() == tgd::ErrorKind::InvalidInput)
      tgd::fail_input(path + ": " + e.what());
    throw;
  }
  tgd::ParsedScenario p;
  p.scenario = s;
  std::string rendered = machine ? tgd::render_scenario_json(p) : tgd::render_scenario(p);
  if (out_path.empty()) {
    emit(rendered);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) tgd::fail_input("cannot write '" + out_path + "'");
    out << rendered;
  }
  return kExitDual;
}

int cmd_report(const std::vector<std::string>& paths, bool machine) {
  bool all_dual = true;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  std::ostringstream out;
  bool first = true;
  for (const auto& path : paths) {
    tgd::ParsedScenario p = load_scenario(path);
    tgd::ScenarioReport rep = tgd::run_checks(p.scenario, true);
    all_dual = all_dual && rep.dual();
    if (machine) {
      arr.push_back(nlohmann::ordered_json::parse(tgd::render_report_json(rep)));
    } else {
      if (!first) out << "\n";
      out << tgd::render_report_text(rep);
      first = false;
    }
  }
  emit(machine ? arr.dump(2) : out.str());
  return all_dual ? kExitDual : kExitNotDual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact duality checks for transgressive fibrations"};
  app.require_subcommand(1);

  std::string file, expr, side, sections_path, out_path;
  std::vector<std::string> files;
  bool machine = false, twisted = false, with_cohomology = false;

  auto* validate = app.add_subcommand("validate", "Check the base algebra axioms of a scenario");
  validate->add_option("file", file, "scenario file")->required();
  validate->add_flag("--machine", machine, "JSON output");

  auto* check = app.add_subcommand("check", "Run the duality checks on a scenario");
  check->add_option("file", file, "scenario file")->required();
  check->add_flag("--machine", machine, "JSON output");
  check->add_flag("--cohomology", with_cohomology, "also compare cohomology dimensions");

  auto* transform = app.add_subcommand("transform", "Apply the duality transform to an expression");
  transform->add_option("file", file, "scenario file")->required();
  transform->add_option("--form", expr, "expression over the first model")->required();
  transform->add_flag("--machine", machine, "JSON output");

  auto* cohomology = app.add_subcommand("cohomology", "Cohomology dimensions of the two sides");
  cohomology->add_option("file", file, "scenario file")->required();
  cohomology->add_option("--side", side, "E or Ehat (default both)")
      ->check(CLI::IsMember({"E", "Ehat"}));
  cohomology->add_flag("--twisted", twisted, "twist by the scenario fluxes");
  cohomology->add_flag("--machine", machine, "JSON output");

  auto* bracket = app.add_subcommand("bracket", "Derived brackets and transported sections");
  bracket->add_option("file", file, "scenario file")->required();
  bracket->add_option("--sections", sections_path, "extra sections file");
  bracket->add_flag("--machine", machine, "JSON output");

  auto* construct = app.add_subcommand("construct", "Build a dual pair from a recipe");
  construct->add_option("file", file, "recipe file")->required();
  construct->add_option("-o,--output", out_path, "write the scenario here instead of stdout");
  construct->add_flag("--machine", machine, "JSON output");

  auto* report = app.add_subcommand("report", "Full report for one or more scenarios");
  report->add_option("files", files, "scenario files")->required()->expected(-1);
  report->add_flag("--machine", machine, "JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(file, machine);
    if (check->parsed()) return cmd_check(file, machine, with_cohomology);
    if (transform->parsed()) return cmd_transform(file, expr, machine);
    if (cohomology->parsed()) return cmd_cohomology(file, side, twisted, machine);
    if (bracket->parsed()) return cmd_bracket(file, sections_path, machine);
    if (construct->parsed()) return cmd_construct(file, out_path, machine);
    if (report->parsed()) return cmd_report(files, machine);
  } catch (const tgd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
