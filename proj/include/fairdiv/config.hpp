#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairdiv/ceei.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One run of any subcommand, loaded from a JSON document. See
// docs/config-schema.md for the field-by-field description.
struct RunConfig {
  int schema_version = 1;

  // model
  Family family = Family::uniform_square;
  int n_goods = 2;
  // corner_mass parameters
  double corner_a = 0.2;
  double corner_hi = 20.0;
  std::optional<double> corner_lo;  // default: balance to total mass 1
  // iid parameters
  std::string marginal = "uniform01";
  double power_alpha = 2.0;
  // custom_piecewise cells
  std::vector<BoxCell> cells;

  std::vector<double> supplies;

  std::uint64_t seed = 90210;
  std::size_t mc_samples = 1'000'000;
  IntegrationMode mode = IntegrationMode::auto_pick;

  // tolerances
  double tol_grad = 1e-8;
  double tol_clear = 1e-3;
  double balance_tol = 1e-6;
  double stat_tol = 3.0;  // sigmas

  // grids
  int z_grid_size = 2001;
  int tail_grid_size = 2001;
  double k_grid_step = 0.005;

  std::string out_dir = ".";

  ValueModel make_model() const;
};

// Parses and validates; throws ConfigError with a human-readable message
// ("supplies must be strictly positive", ...).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
void validate(const RunConfig& cfg);

// Menu files: JSON {"bundles": [[...], ...], "labels": [...]} (labels
// optional).
Menu load_menu(const std::string& path);
Menu parse_menu(const std::string& json_text);

}  // namespace fairdiv
