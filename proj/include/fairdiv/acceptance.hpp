#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fairdiv {

struct AcceptanceRow {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values and the tolerance they met or missed
};

struct AcceptanceOptions {
  std::uint64_t seed = 90210;
  std::size_t mc_samples = 1'000'000;
  bool quick = false;  // trims MC sizes for smoke runs
};

// Runs the release checklist: ten quantitative reproduction rows, each with
// pinned tolerances. Shared by the test suite and the reproduce-examples
// subcommand.
std::vector<AcceptanceRow> run_acceptance(const AcceptanceOptions& opts = {});

std::string acceptance_summary_json(const std::vector<AcceptanceRow>& rows);

}  // namespace fairdiv
