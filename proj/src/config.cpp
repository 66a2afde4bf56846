#include "fairdiv/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fairdiv {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Family parse_family(const std::string& name) {
  if (name == "uniform_square") return Family::uniform_square;
  if (name == "corner_mass") return Family::corner_mass;
  if (name == "iid") return Family::iid;
  if (name == "custom_piecewise") return Family::custom_piecewise;
  throw ConfigError("unknown model family: " + name);
}

IntegrationMode parse_mode(const std::string& name) {
  if (name == "quadrature") return IntegrationMode::quadrature;
  if (name == "mc") return IntegrationMode::mc;
  if (name == "auto") return IntegrationMode::auto_pick;
  throw ConfigError("unknown integration mode: " + name +
                    " (expected quadrature, mc, or auto)");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

  RunConfig cfg;
  try {
    cfg.schema_version = doc.value("schema_version", 1);
    if (doc.contains("family"))
      cfg.family = parse_family(doc["family"].get<std::string>());
    cfg.n_goods = doc.value("n_goods", 2);
    cfg.corner_a = doc.value("corner_a", 0.2);
    cfg.corner_hi = doc.value("corner_hi", 20.0);
    if (doc.contains("corner_lo"))
      cfg.corner_lo = doc["corner_lo"].get<double>();
    cfg.marginal = doc.value("marginal", std::string("uniform01"));
    cfg.power_alpha = doc.value("power_alpha", 2.0);
    if (doc.contains("cells")) {
      for (const auto& c : doc["cells"]) {
        BoxCell cell;
        cell.lo = c.at("lo").get<std::vector<double>>();
        cell.hi = c.at("hi").get<std::vector<double>>();
        cell.density = c.at("density").get<double>();
        cfg.cells.push_back(std::move(cell));
      }
    }
    if (doc.contains("supplies"))
      cfg.supplies = doc["supplies"].get<std::vector<double>>();
    cfg.seed = doc.value("seed", std::uint64_t{90210});
    cfg.mc_samples = doc.value("mc_samples", std::size_t{1'000'000});
    if (doc.contains("mode"))
      cfg.mode = parse_mode(doc["mode"].get<std::string>());
    cfg.tol_grad = doc.value("tol_grad", 1e-8);
    cfg.tol_clear = doc.value("tol_clear", 1e-3);
    cfg.balance_tol = doc.value("balance_tol", 1e-6);
    cfg.stat_tol = doc.value("stat_tol", 3.0);
    cfg.z_grid_size = doc.value("z_grid_size", 2001);
    cfg.tail_grid_size = doc.value("tail_grid_size", 2001);
    cfg.k_grid_step = doc.value("k_grid_step", 0.005);
    cfg.out_dir = doc.value("out_dir", std::string("."));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config field: ") + e.what());
  }

  if (cfg.supplies.empty()) {
    int n = cfg.family == Family::custom_piecewise && !cfg.cells.empty()
                ? static_cast<int>(cfg.cells.front().lo.size())
                : cfg.n_goods;
    cfg.supplies.assign(static_cast<size_t>(n), 0.1);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

void validate(const RunConfig& cfg) {
  if (cfg.schema_version != 1)
    throw ConfigError("unsupported schema_version: " +
                      std::to_string(cfg.schema_version));
  for (double s : cfg.supplies)
    if (!(s > 0.0)) throw ConfigError("supplies must be strictly positive");
  if (cfg.family == Family::iid || cfg.family == Family::custom_piecewise) {
    if (cfg.family == Family::iid && cfg.n_goods < 2)
      throw ConfigError("n_goods must be at least 2");
  } else if (cfg.n_goods != 2) {
    throw ConfigError(family_name(cfg.family) + " is a two-good family");
  }
  if (!cfg.supplies.empty()) {
    int n = cfg.family == Family::custom_piecewise && !cfg.cells.empty()
                ? static_cast<int>(cfg.cells.front().lo.size())
                : cfg.n_goods;
    if (static_cast<int>(cfg.supplies.size()) != n)
      throw ConfigError("supplies must list one value per good");
  }
  if (cfg.mc_samples < 1000)
    throw ConfigError("mc_samples must be at least 1000");
  if (cfg.z_grid_size < 11 || cfg.tail_grid_size < 11)
    throw ConfigError("grid sizes must be at least 11");
  if (!(cfg.k_grid_step > 0.0) || cfg.k_grid_step > 0.5)
    throw ConfigError("k_grid_step must lie in (0, 0.5]");
  if (!(cfg.tol_grad > 0.0) || !(cfg.tol_clear > 0.0) ||
      !(cfg.balance_tol > 0.0))
    throw ConfigError("tolerances must be strictly positive");
  if (!(cfg.stat_tol > 0.0))
    throw ConfigError("stat_tol must be strictly positive");
  if (cfg.family == Family::corner_mass) {
    if (!(cfg.corner_a > 0.0) || !(cfg.corner_a < 1.0))
      throw ConfigError("corner_a must lie in (0, 1)");
    if (!(cfg.corner_hi > 0.0))
      throw ConfigError("corner_hi must be strictly positive");
  }
  if (cfg.family == Family::iid && cfg.marginal != "uniform01" &&
      cfg.marginal != "power" && cfg.marginal != "exp_unit")
    throw ConfigError("unknown marginal: " + cfg.marginal +
                      " (expected uniform01, power, or exp_unit)");
  if (cfg.family == Family::custom_piecewise && cfg.cells.empty())
    throw ConfigError("custom_piecewise requires at least one cell");
}

ValueModel RunConfig::make_model() const {
  switch (family) {
    case Family::uniform_square:
      return ValueModel::uniform_square();
    case Family::corner_mass: {
      double lo = corner_lo.value_or(
          (1.0 - corner_hi * corner_a * corner_a) /
          (1.0 - corner_a * corner_a));
      return ValueModel::corner_mass(corner_a, corner_hi, lo);
    }
    case Family::iid: {
      Marginal m = Marginal::uniform01();
      if (marginal == "power")
        m = Marginal::power(power_alpha);
      else if (marginal == "exp_unit")
        m = Marginal::exp_unit();
      return ValueModel::iid(m, n_goods);
    }
    case Family::custom_piecewise:
      return ValueModel::custom_piecewise(cells);
  }
  throw ConfigError("unknown model family");
}

Menu parse_menu(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("menu is not valid JSON: ") + e.what());
  }
  Menu menu;
  try {
    for (const auto& b : doc.at("bundles"))
      menu.bundles.push_back(b.get<std::vector<double>>());
    if (doc.contains("labels"))
      for (const auto& l : doc["labels"])
        menu.labels.push_back(l.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed menu: ") + e.what());
  }
  if (menu.bundles.empty())
    throw ConfigError("menu must list at least one bundle");
  const std::size_t n = menu.bundles.front().size();
  for (const auto& b : menu.bundles) {
    if (b.size() != n)
      throw ConfigError("menu bundles must share one dimension");
    for (double x : b)
      if (!(x >= 0.0)) throw ConfigError("menu bundles must be nonnegative");
  }
  if (!menu.labels.empty() && menu.labels.size() != menu.bundles.size())
    throw ConfigError("menu labels must match the number of bundles");
  if (menu.labels.empty())
    for (std::size_t i = 0; i < menu.bundles.size(); ++i)
      menu.labels.push_back("option " + std::to_string(i + 1));
  return menu;
}

Menu load_menu(const std::string& path) { return parse_menu(read_file(path)); }

}  // namespace fairdiv
