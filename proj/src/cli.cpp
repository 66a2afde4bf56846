#include "fairdiv/cli.hpp"

#include <cstdio>
#include <filesystem>

#include <CLI11.hpp>

#include "fairdiv/acceptance.hpp"
#include "fairdiv/ceei.hpp"
#include "fairdiv/certificate.hpp"
#include "fairdiv/config.hpp"
#include "fairdiv/evaluator.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/report.hpp"
#include "fairdiv/shadow.hpp"
#include "fairdiv/twogood.hpp"

namespace fairdiv::cli {

namespace {

RunConfig effective_config(const CommonFlags& flags) {
  if (flags.config_path.empty())
    throw ConfigError("a config file is required (--config PATH)");
  RunConfig cfg = load_config(flags.config_path);
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.samples >= 0) cfg.mc_samples = static_cast<std::size_t>(flags.samples);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.mode.empty()) {
    if (flags.mode == "quadrature")
      cfg.mode = IntegrationMode::quadrature;
    else if (flags.mode == "mc")
      cfg.mode = IntegrationMode::mc;
    else if (flags.mode == "auto")
      cfg.mode = IntegrationMode::auto_pick;
    else
      throw ConfigError("unknown integration mode: " + flags.mode);
  }
  validate(cfg);
  return cfg;
}

std::string mode_name(IntegrationMode m) {
  switch (m) {
    case IntegrationMode::quadrature:
      return "quadrature";
    case IntegrationMode::mc:
      return "mc";
    case IntegrationMode::auto_pick:
      return "auto";
  }
  return "auto";
}

CeeiOptions ceei_options(const RunConfig& cfg) {
  CeeiOptions o;
  o.mode = cfg.mode;
  o.mc_samples = cfg.mc_samples;
  o.seed = cfg.seed;
  o.tol_grad_quadrature = cfg.tol_grad;
  // the sampled gradient cannot resolve below the sampling noise
  o.tol_grad_mc = std::max(cfg.tol_grad, 1e-4);
  o.tol_clear = cfg.tol_clear;
  return o;
}

void config_echo(JsonWriter& w, const RunConfig& cfg, const char* command) {
  w.field("schema_version", 1);
  w.field("command", command);
  w.field("family", family_name(cfg.family));
  w.field("supplies", cfg.supplies);
  w.field("mode", mode_name(cfg.mode));
  w.field("seed", static_cast<std::size_t>(cfg.seed));
  w.field("mc_samples", cfg.mc_samples);
}

void menu_json(JsonWriter& w, const Menu& menu) {
  w.begin_object();
  w.key("bundles").begin_array();
  for (const auto& b : menu.bundles) w.value(b);
  w.end_array();
  w.key("labels").begin_array();
  for (const auto& l : menu.labels) w.value(l);
  w.end_array();
  w.end_object();
}

std::string write_report(const RunConfig& cfg, const std::string& filename,
                         const std::string& content) {
  std::filesystem::create_directories(cfg.out_dir);
  auto path = (std::filesystem::path(cfg.out_dir) / filename).string();
  write_text_file(path, content);
  return path;
}

template <typename F>
CommandResult guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    return {exit_config_error, {}, e.what()};
  } catch (const SolverError& e) {
    return {exit_solver_error, {}, e.what()};
  } catch (const std::invalid_argument& e) {
    return {exit_config_error, {}, e.what()};
  } catch (const std::domain_error& e) {
    return {exit_config_error, {}, e.what()};
  } catch (const std::exception& e) {
    return {exit_solver_error, {}, e.what()};
  }
}

}  // namespace

CommandResult cmd_ceei(const CommonFlags& flags) {
  return guarded([&]() -> CommandResult {
    RunConfig cfg = effective_config(flags);
    ValueModel model = cfg.make_model();
    RenormalizedModel rm(model);
    auto sol = solve_ceei(rm, cfg.supplies, ceei_options(cfg));

    JsonWriter w;
    w.begin_object();
    config_echo(w, cfg, "ceei");
    w.field("y", sol.y);
    w.field("p", sol.p);
    w.field("q", sol.q);
    w.field("theta0", sol.theta0.coords);
    w.field("region_masses", sol.region_masses);
    w.field("clearing_residual", sol.clearing_residual);
    w.field("iterations", sol.iterations);
    w.field("gradient_norm", sol.gradient_norm);
    w.field("converged", sol.converged);
    w.end_object();
    auto path = write_report(cfg, "ceei.json", w.str());

    std::string q_text;
    for (size_t i = 0; i < sol.q.size(); ++i)
      q_text += (i ? ", " : "") + format_double(sol.q[i]);
    char line[256];
    snprintf(line, sizeof line, "q = [%s], clearing residual %.3e\nwrote %s",
             q_text.c_str(), sol.clearing_residual, path.c_str());
    return {exit_ok, {path}, line};
  });
}

CommandResult cmd_shadow(const CommonFlags& flags) {
  return guarded([&]() -> CommandResult {
    RunConfig cfg = effective_config(flags);
    ValueModel model = cfg.make_model();
    RenormalizedModel rm(model);
    auto sol = solve_ceei(rm, cfg.supplies, ceei_options(cfg));
    ShadowOptions so;
    so.mode = cfg.mode;
    so.mc_samples = cfg.mc_samples;
    so.seed = cfg.seed;
    auto rep = shadow_costs(rm, sol.q, so);

    JsonWriter w;
    w.begin_object();
    config_echo(w, cfg, "shadow");
    w.field("q", sol.q);
    w.field("clearing_residual", sol.clearing_residual);
    w.field("M", rep.M);
    w.field("A", rep.A);
    w.field("T", rep.T);
    w.field("J", rep.J);
    w.field("c", rep.c);
    w.field("c_flow", rep.c_flow);
    w.field("diag_dominance_margin", rep.diag_dominance_margin);
    w.field("condition_number", rep.condition_number);
    w.field("positivity_verified", rep.positivity_verified);
    w.field("method", rep.method_tag);
    w.end_object();
    auto path = write_report(cfg, "shadow.json", w.str());

    std::string c_text;
    for (size_t i = 0; i < rep.c.size(); ++i)
      c_text += (i ? ", " : "") + format_double(rep.c[i]);
    char line[256];
    snprintf(line, sizeof line, "c = [%s] (%s)\nwrote %s", c_text.c_str(),
             rep.method_tag.c_str(), path.c_str());
    return {exit_ok, {path}, line};
  });
}

CommandResult cmd_certify(const CommonFlags& flags) {
  return guarded([&]() -> CommandResult {
    RunConfig cfg = effective_config(flags);
    ValueModel model = cfg.make_model();
    CertifyOptions co;
    co.mode = cfg.mode;
    co.mc_samples = cfg.mc_samples;
    co.seed = cfg.seed;
    co.tail_grid_size = cfg.tail_grid_size;
    co.balance_tol_factor = cfg.balance_tol;
    auto res = certify(model, cfg.supplies, co);

    JsonWriter w;
    w.begin_object();
    config_echo(w, cfg, "certify");
    w.field("verdict", verdict_name(res.report.verdict));
    w.field("method", res.report.method);
    w.key("balance_residuals").begin_array();
    w.value(res.report.balance_residuals[0]);
    w.value(res.report.balance_residuals[1]);
    w.end_array();
    w.key("total_variation").begin_array();
    w.value(res.report.total_variation[0]);
    w.value(res.report.total_variation[1]);
    w.end_array();
    w.field("min_tail_mass", res.report.min_tail_mass);
    w.field("min_tail_location", res.report.min_tail_location);
    w.field("min_tail_good", res.report.min_tail_good);
    w.field("detail", res.report.detail);
    if (!res.ceei.q.empty()) {
      w.field("q", res.ceei.q);
      w.field("c", res.shadow.c);
      w.field("c_flow", res.shadow.c_flow);
    }
    w.end_object();
    auto path = write_report(cfg, "certify.json", w.str());

    char line[512];
    snprintf(line, sizeof line, "verdict: %s (%s)\nwrote %s",
             verdict_name(res.report.verdict).c_str(),
             res.report.method.c_str(), path.c_str());
    return {exit_ok, {path}, line};
  });
}

CommandResult cmd_twogood(const CommonFlags& flags) {
  return guarded([&]() -> CommandResult {
    RunConfig cfg = effective_config(flags);
    if (cfg.supplies.size() != 2 || cfg.supplies[0] != cfg.supplies[1])
      throw ConfigError("menu size analysis requires two equal supplies");
    ValueModel model = cfg.make_model();
    TwoGoodOptions to;
    to.mode = cfg.mode;
    to.mc_samples = cfg.mc_samples;
    to.seed = cfg.seed;
    to.z_grid_size = cfg.z_grid_size;
    to.stat_sigmas = cfg.stat_tol;
    to.k_grid_steps = std::max(2, static_cast<int>(std::lround(1.0 / cfg.k_grid_step)));
    auto sol = optimize_z(model, cfg.supplies[0], to);

    JsonWriter w;
    w.begin_object();
    config_echo(w, cfg, "twogood");
    w.field("z_star", sol.z_star);
    w.field("zeta_star", sol.zeta_star);
    w.field("r_star", sol.r_star);
    w.field("r_half", sol.r_half);
    w.field("verdict", verdict_name(sol.verdict));
    w.field("gap_stat_tol", sol.gap_stat_tol);
    w.field("detail", sol.detail);
    w.key("menu");
    menu_json(w, sol.menu);
    if (sol.verdict == TwoGoodVerdict::indeterminate) {
      w.key("alternate_menu");
      menu_json(w, sol.alternate_menu);
    }
    w.field("near_maximizers", sol.near_maximizers);
    w.end_object();
    auto path = write_report(cfg, "twogood.json", w.str());

    std::vector<std::vector<double>> rows;
    rows.reserve(sol.r_curve.size());
    for (const auto& pt : sol.r_curve) rows.push_back({pt.z, pt.zeta, pt.r});
    auto csv_path =
        write_report(cfg, "twogood_curve.csv", render_csv({"z", "zeta", "r"}, rows));

    char line[512];
    snprintf(line, sizeof line, "z* = %.6f, r* = %.6f, verdict %s\nwrote %s\nwrote %s",
             sol.z_star, sol.r_star, verdict_name(sol.verdict).c_str(),
             path.c_str(), csv_path.c_str());
    return {exit_ok, {path, csv_path}, line};
  });
}

CommandResult cmd_evaluate(const CommonFlags& flags,
                           const std::string& menu_path) {
  return guarded([&]() -> CommandResult {
    RunConfig cfg = effective_config(flags);
    if (menu_path.empty())
      throw ConfigError("a menu file is required (--menu PATH)");
    Menu menu = load_menu(menu_path);
    ValueModel model = cfg.make_model();
    EvalOptions eo;
    eo.mode = cfg.mode;
    eo.mc_samples = cfg.mc_samples;
    eo.seed = cfg.seed;
    auto wr = simulate(model, menu, cfg.supplies, eo);
    auto mono = check_ratio_monotonicity(model, menu_rule(menu), 10'000, cfg.seed);
    auto slack = unit_demand_slack(menu);

    JsonWriter w;
    w.begin_object();
    config_echo(w, cfg, "evaluate");
    w.key("menu");
    menu_json(w, menu);
    w.field("welfare_v_space", wr.welfare_v_space);
    w.field("welfare_v_se", wr.welfare_v_se);
    w.field("welfare_theta_space", wr.welfare_theta_space);
    w.field("welfare_theta_se", wr.welfare_theta_se);
    w.field("theta_space_available", wr.theta_space_available);
    w.field("demand", wr.demand);
    w.field("demand_se", wr.demand_se);
    w.field("supply_slack", wr.supply_slack);
    w.field("choice_shares", wr.choice_shares);
    w.field("samples", wr.samples);
    w.key("ratio_monotonicity").begin_object();
    w.field("pairs_sampled", mono.pairs_sampled);
    w.field("comparisons", mono.comparisons);
    w.field("violations", mono.violations.size());
    w.field("max_deficit", mono.max_deficit);
    w.field("holds", mono.holds());
    w.end_object();
    w.key("unit_demand").begin_object();
    w.field("max_bundle_mass", slack.max_bundle_mass);
    w.field("interpretable", slack.interpretable);
    w.end_object();
    w.end_object();
    auto path = write_report(cfg, "evaluate.json", w.str());

    char line[512];
    snprintf(line, sizeof line,
             "welfare %.6f +- %.1e (v-space), %.6f +- %.1e (theta-space)\nwrote %s",
             wr.welfare_v_space, wr.welfare_v_se, wr.welfare_theta_space,
             wr.welfare_theta_se, path.c_str());
    return {exit_ok, {path}, line};
  });
}

CommandResult cmd_reproduce_examples(const CommonFlags& flags) {
  return guarded([&]() -> CommandResult {
    AcceptanceOptions opts;
    std::string out_dir = flags.out_dir.empty() ? "." : flags.out_dir;
    if (!flags.config_path.empty()) {
      RunConfig cfg = load_config(flags.config_path);
      opts.seed = cfg.seed;
      opts.mc_samples = cfg.mc_samples;
      if (flags.out_dir.empty()) out_dir = cfg.out_dir;
    }
    if (flags.seed >= 0) opts.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.samples >= 0)
      opts.mc_samples = static_cast<std::size_t>(flags.samples);

    auto rows = run_acceptance(opts);
    std::string msg;
    std::size_t passed = 0;
    for (const auto& r : rows) {
      char line[1024];
      snprintf(line, sizeof line, "%s  %2d %s: %s\n", r.pass ? "PASS" : "FAIL",
               r.id, r.name.c_str(), r.detail.c_str());
      msg += line;
      if (r.pass) ++passed;
    }
    char tail[128];
    snprintf(tail, sizeof tail, "%zu/%zu rows passed", passed, rows.size());
    msg += tail;

    std::filesystem::create_directories(out_dir);
    auto path = (std::filesystem::path(out_dir) / "reproduce_summary.json").string();
    write_text_file(path, acceptance_summary_json(rows));
    msg += "\nwrote " + path;
    return {passed == rows.size() ? exit_ok : exit_acceptance_failure,
            {path},
            msg};
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"welfare-maximizing allocation menus: solvers, certificates, evaluation"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd = nullptr;
    CommonFlags flags;
  };
  auto add_common = [&](const char* name, const char* desc) {
    Sub s;
    s.cmd = app.add_subcommand(name, desc);
    s.cmd->add_option("--config", s.flags.config_path, "config file (JSON)");
    s.cmd->add_option("--out", s.flags.out_dir, "output directory");
    s.cmd->add_option("--seed", s.flags.seed, "RNG seed override");
    s.cmd->add_option("--samples", s.flags.samples, "MC sample count override");
    s.cmd->add_option("--mode", s.flags.mode, "quadrature | mc | auto")
        ->check(CLI::IsMember({"quadrature", "mc", "auto"}));
    return s;
  };

  auto ceei = add_common("ceei", "solve market-clearing quantities");
  auto shadow = add_common("shadow", "shadow costs of supply at the clearing point");
  auto certify = add_common("certify", "optimality certificate for the pure-option menu");
  auto twogood = add_common("twogood", "optimal two-good menu size and threshold");
  auto evaluate = add_common("evaluate", "simulate a menu: welfare, demand, checks");
  std::string menu_path;
  evaluate.cmd->add_option("--menu", menu_path, "menu file (JSON)")->required();
  auto reproduce = add_common("reproduce-examples",
                              "run the quantitative reproduction checklist");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config_error;
  }

  CommandResult res;
  if (ceei.cmd->parsed())
    res = cmd_ceei(ceei.flags);
  else if (shadow.cmd->parsed())
    res = cmd_shadow(shadow.flags);
  else if (certify.cmd->parsed())
    res = cmd_certify(certify.flags);
  else if (twogood.cmd->parsed())
    res = cmd_twogood(twogood.flags);
  else if (evaluate.cmd->parsed())
    res = cmd_evaluate(evaluate.flags, menu_path);
  else
    res = cmd_reproduce_examples(reproduce.flags);

  if (res.exit_code == exit_ok || res.exit_code == exit_acceptance_failure) {
    if (!res.message.empty()) std::printf("%s\n", res.message.c_str());
  } else {
    std::fprintf(stderr, "error: %s\n", res.message.c_str());
  }
  return res.exit_code;
}

}  // namespace fairdiv::cli
