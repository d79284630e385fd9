#pragma once

#include <string>
#include <vector>

#include "tgd/cohomology.hpp"
#include "tgd/tduality.hpp"

namespace tgd {

// Everything the check and report commands print, computed in one pass.
// Rendering is deterministic: fixed orderings, no timestamps.
struct ScenarioReport {
  std::string name;

  bool gerbe_ok = false;
  std::string gerbe_residual;  // rendered witness, empty when zero

  bool nondeg_ok = false;
  bool nondeg_structural = false;
  std::string nondeg_note;
  int nondeg_rows = 0;
  int nondeg_cols = 0;

  ShortcutVerdict shortcut = ShortcutVerdict::NotApplicable;
  bool shortcut_agrees = true;  // shortcut verdict vs full check, when applicable

  bool chain_ok = false;
  std::string chain_witness;  // rendered basis element, empty when ok

  bool tau_ok = false;

  bool with_cohomology = false;
  std::vector<int> dims_e, dims_ehat;  // untwisted, by degree
  int twisted_even_e = 0, twisted_odd_e = 0;
  int twisted_even_ehat = 0, twisted_odd_ehat = 0;
  bool twisted_match = false;

  bool dual() const { return gerbe_ok && nondeg_ok && chain_ok && tau_ok; }
};

ScenarioReport run_checks(const DualityScenario& s, bool with_cohomology);

std::string render_report_text(const ScenarioReport& r);
std::string render_report_json(const ScenarioReport& r);

}  // namespace tgd
