#include "tgd/report.hpp"

#include <sstream>

#include "json.hpp"
#include "tgd/scenario.hpp"

namespace tgd {

ScenarioReport run_checks(const DualityScenario& s, bool with_cohomology) {
  ScenarioReport r;
  r.name = s.name;

  GerbeResult gerbe = check_gerbe_trivialization(s);
  r.gerbe_ok = gerbe.ok;
  if (!gerbe.ok) r.gerbe_residual = render_model_expression(gerbe.residual);

  NondegeneracyResult nd = check_nondegeneracy(s);
  r.nondeg_ok = nd.ok;
  r.nondeg_structural = nd.structural_failure;
  r.nondeg_note = nd.note;
  r.nondeg_rows = nd.matrix.rows();
  r.nondeg_cols = nd.matrix.cols();

  ShortcutResult sc = quadratic_shortcut(s);
  r.shortcut = sc.verdict;
  if (sc.verdict != ShortcutVerdict::NotApplicable)
    r.shortcut_agrees = (sc.verdict == ShortcutVerdict::Invertible) == nd.ok;

  ChainMapResult cm = verify_chain_map(s);
  r.chain_ok = cm.ok;
  if (!cm.ok) r.chain_witness = render_model_expression(cm.witness);

  r.tau_ok = tau_invertible(s);

  if (with_cohomology) {
    r.with_cohomology = true;
    r.dims_e = cohomology_dims(s.e).dims;
    r.dims_ehat = cohomology_dims(s.ehat).dims;
    ParityCohomology te = twisted_cohomology_dims(s.e, s.h);
    ParityCohomology th = twisted_cohomology_dims(s.ehat, s.hhat);
    r.twisted_even_e = te.even_dim;
    r.twisted_odd_e = te.odd_dim;
    r.twisted_even_ehat = th.even_dim;
    r.twisted_odd_ehat = th.odd_dim;
    r.twisted_match = te.even_dim == th.even_dim && te.odd_dim == th.odd_dim;
  }
  return r;
}

namespace {

const char* shortcut_name(ShortcutVerdict v) {
  switch (v) {
    case ShortcutVerdict::Invertible: return "invertible";
    case ShortcutVerdict::Singular: return "singular";
    default: return "not applicable";
  }
}

}  // namespace

std::string render_report_text(const ScenarioReport& r) {
  std::ostringstream os;
  os << "scenario: " << r.name << "\n";
  os << "  gerbe trivialization: " << (r.gerbe_ok ? "ok" : "FAILED") << "\n";
  if (!r.gerbe_ok) os << "    residual: " << r.gerbe_residual << "\n";
  os << "  nondegeneracy (" << r.nondeg_rows << "x" << r.nondeg_cols
     << "): " << (r.nondeg_ok ? "invertible" : "NOT invertible") << "\n";
  if (r.nondeg_structural) os << "    " << r.nondeg_note << "\n";
  os << "  quadratic shortcut: " << shortcut_name(r.shortcut);
  if (r.shortcut != ShortcutVerdict::NotApplicable)
    os << (r.shortcut_agrees ? " (agrees with the full check)"
                             : " (DISAGREES with the full check)");
  os << "\n";
  os << "  chain map: " << (r.chain_ok ? "ok" : "FAILED") << "\n";
  if (!r.chain_ok) os << "    witness: " << r.chain_witness << "\n";
  os << "  transform invertible: " << (r.tau_ok ? "yes" : "NO") << "\n";
  os << "  verdict: " << (r.dual() ? "T-dual" : "not T-dual") << "\n";
  if (r.with_cohomology) {
    auto dims = [&](const std::vector<int>& v) {
      std::ostringstream d;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) d << ' ';
        d << v[i];
      }
      return d.str();
    };
    os << "  untwisted dims E:    " << dims(r.dims_e) << "\n";
    os << "  untwisted dims Ehat: " << dims(r.dims_ehat) << "\n";
    os << "  twisted dims E:    even " << r.twisted_even_e << ", odd " << r.twisted_odd_e << "\n";
    os << "  twisted dims Ehat: even " << r.twisted_even_ehat << ", odd " << r.twisted_odd_ehat
       << "\n";
    os << "  twisted dims match: " << (r.twisted_match ? "yes" : "NO") << "\n";
  }
  return os.str();
}

std::string render_report_json(const ScenarioReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["gerbe"]["ok"] = r.gerbe_ok;
  if (!r.gerbe_ok) j["gerbe"]["residual"] = r.gerbe_residual;
  j["nondegeneracy"]["ok"] = r.nondeg_ok;
  j["nondegeneracy"]["rows"] = r.nondeg_rows;
  j["nondegeneracy"]["cols"] = r.nondeg_cols;
  if (r.nondeg_structural) j["nondegeneracy"]["note"] = r.nondeg_note;
  j["shortcut"]["verdict"] = shortcut_name(r.shortcut);
  if (r.shortcut != ShortcutVerdict::NotApplicable) j["shortcut"]["agrees"] = r.shortcut_agrees;
  j["chain_map"]["ok"] = r.chain_ok;
  if (!r.chain_ok) j["chain_map"]["witness"] = r.chain_witness;
  j["transform_invertible"] = r.tau_ok;
  j["dual"] = r.dual();
  if (r.with_cohomology) {
    j["cohomology"]["untwisted"]["E"] = r.dims_e;
    j["cohomology"]["untwisted"]["Ehat"] = r.dims_ehat;
    j["cohomology"]["twisted"]["E"] = {{"even", r.twisted_even_e}, {"odd", r.twisted_odd_e}};
    j["cohomology"]["twisted"]["Ehat"] = {{"even", r.twisted_even_ehat},
                                          {"odd", r.twisted_odd_ehat}};
    j["cohomology"]["twisted"]["match"] = r.twisted_match;
  }
  return j.dump(2) + "\n";
}

}  // namespace tgd
