#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "fairdiv/ceei.hpp"
#include "fairdiv/certificate.hpp"
#include "fairdiv/evaluator.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/shadow.hpp"
#include "fairdiv/twogood.hpp"

namespace py = pybind11;
using namespace fairdiv;

namespace {

IntegrationMode mode_from(const std::string& name) {
  if (name == "quadrature") return IntegrationMode::quadrature;
  if (name == "mc") return IntegrationMode::mc;
  if (name == "auto") return IntegrationMode::auto_pick;
  throw std::invalid_argument("unknown integration mode: " + name +
                              " (expected quadrature, mc, or auto)");
}

Marginal marginal_from(const std::string& name, double alpha) {
  if (name == "uniform01") return Marginal::uniform01();
  if (name == "power") return Marginal::power(alpha);
  if (name == "exp_unit") return Marginal::exp_unit();
  throw std::invalid_argument("unknown marginal: " + name +
                              " (expected uniform01, power, or exp_unit)");
}

Menu menu_from(const std::vector<std::vector<double>>& bundles,
               const std::vector<std::string>& labels) {
  Menu m;
  m.bundles = bundles;
  m.labels = labels;
  if (m.labels.empty())
    for (std::size_t i = 0; i < m.bundles.size(); ++i)
      m.labels.push_back("option " + std::to_string(i + 1));
  return m;
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(m.n),
      std::vector<double>(static_cast<std::size_t>(m.n), 0.0));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          m(i, j);
  return rows;
}

py::dict ceei_dict(const CeeiSolution& s) {
  py::dict d;
  d["y"] = s.y;
  d["p"] = s.p;
  d["q"] = s.q;
  d["theta0"] = s.theta0.coords;
  d["region_masses"] = s.region_masses;
  d["clearing_residual"] = s.clearing_residual;
  d["iterations"] = s.iterations;
  d["gradient_norm"] = s.gradient_norm;
  d["converged"] = s.converged;
  return d;
}

py::dict shadow_dict(const ShadowCostReport& r) {
  py::dict d;
  d["M"] = r.M;
  d["A"] = r.A;
  d["T"] = matrix_rows(r.T);
  d["J"] = matrix_rows(r.J);
  d["c"] = r.c;
  d["c_flow"] = r.c_flow;
  d["diag_dominance_margin"] = r.diag_dominance_margin;
  d["condition_number"] = r.condition_number;
  d["positivity_verified"] = r.positivity_verified;
  d["method"] = r.method_tag;
  return d;
}

py::dict menu_dict(const Menu& m) {
  py::dict d;
  d["bundles"] = m.bundles;
  d["labels"] = m.labels;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "welfare-maximizing allocation menus: market solver, shadow costs, "
      "optimality certificates, menu evaluation";

  py::class_<ValueModel>(m, "ValueModel")
      .def_static("uniform_square", &ValueModel::uniform_square,
                  "independent uniform values on two goods")
      .def_static("corner_mass", &ValueModel::corner_mass,
                  py::arg("a") = 0.2, py::arg("hi") = 20.0,
                  py::arg("lo") = 5.0 / 24.0,
                  "extra density on the near-origin square [0, a]^2")
      .def_static(
          "iid",
          [](const std::string& marginal, int n, double alpha) {
            return ValueModel::iid(marginal_from(marginal, alpha), n);
          },
          py::arg("marginal") = "uniform01", py::arg("n") = 2,
          py::arg("alpha") = 2.0,
          "independent identical marginals on n goods")
      .def_static(
          "custom_piecewise",
          [](const std::vector<
              std::tuple<std::vector<double>, std::vector<double>, double>>&
                 cells) {
            std::vector<BoxCell> boxes;
            boxes.reserve(cells.size());
            for (const auto& [lo, hi, density] : cells)
              boxes.push_back({lo, hi, density});
            return ValueModel::custom_piecewise(std::move(boxes));
          },
          py::arg("cells"),
          "piecewise-constant density from (lo, hi, density) boxes")
      .def_property_readonly("n_goods", &ValueModel::n_goods)
      .def_property_readonly("exchangeable", &ValueModel::exchangeable)
      .def("expected_total_value", &ValueModel::expected_total_value)
      .def(
          "sample_values",
          [](const ValueModel& model, std::size_t n, std::uint64_t seed) {
            auto flat = model.sample_values(n, seed);
            const auto g = static_cast<std::size_t>(model.n_goods());
            std::vector<std::vector<double>> rows(n, std::vector<double>(g));
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < g; ++j)
                rows[i][j] = flat[i * g + j];
            return rows;
          },
          py::arg("n"), py::arg("seed") = 90210,
          "deterministic value draws, one row per instance");

  m.def(
      "solve_ceei",
      [](const ValueModel& model, const std::vector<double>& supplies,
         const std::string& mode, std::size_t mc_samples, std::uint64_t seed,
         double tol_clear) {
        CeeiOptions opts;
        opts.mode = mode_from(mode);
        opts.mc_samples = mc_samples;
        opts.seed = seed;
        opts.tol_clear = tol_clear;
        RenormalizedModel rm(model);
        return ceei_dict(solve_ceei(rm, supplies, opts));
      },
      py::arg("model"), py::arg("supplies"), py::arg("mode") = "auto",
      py::arg("mc_samples") = 1'000'000, py::arg("seed") = 90210,
      py::arg("tol_clear") = 1e-3,
      "market-clearing quantities for the pure-option menu");

  m.def(
      "shadow_costs",
      [](const ValueModel& model, const std::vector<double>& supplies,
         const std::string& mode, std::size_t mc_samples,
         std::uint64_t seed) {
        CeeiOptions copts;
        copts.mode = mode_from(mode);
        copts.mc_samples = mc_samples;
        copts.seed = seed;
        RenormalizedModel rm(model);
        auto ceei = solve_ceei(rm, supplies, copts);
        ShadowOptions sopts;
        sopts.mode = copts.mode;
        sopts.mc_samples = mc_samples;
        sopts.seed = seed;
        auto rep = shadow_costs(rm, ceei.q, sopts);
        py::dict d = shadow_dict(rep);
        d["ceei"] = ceei_dict(ceei);
        return d;
      },
      py::arg("model"), py::arg("supplies"), py::arg("mode") = "auto",
      py::arg("mc_samples") = 1'000'000, py::arg("seed") = 90210,
      "marginal welfare of relaxing each supply at the clearing point");

  m.def(
      "certify",
      [](const ValueModel& model, const std::vector<double>& supplies,
         const std::string& mode, std::size_t mc_samples, std::uint64_t seed,
         int tail_grid_size) {
        CertifyOptions opts;
        opts.mode = mode_from(mode);
        opts.mc_samples = mc_samples;
        opts.seed = seed;
        opts.tail_grid_size = tail_grid_size;
        auto res = certify(model, supplies, opts);
        py::dict d;
        d["verdict"] = verdict_name(res.report.verdict);
        d["method"] = res.report.method;
        d["balance_residuals"] = res.report.balance_residuals;
        d["total_variation"] = res.report.total_variation;
        d["min_tail_mass"] = res.report.min_tail_mass;
        d["min_tail_location"] = res.report.min_tail_location;
        d["min_tail_good"] = res.report.min_tail_good;
        d["detail"] = res.report.detail;
        d["ceei"] = ceei_dict(res.ceei);
        d["shadow"] = shadow_dict(res.shadow);
        return d;
      },
      py::arg("model"), py::arg("supplies"), py::arg("mode") = "auto",
      py::arg("mc_samples") = 1'000'000, py::arg("seed") = 90210,
      py::arg("tail_grid_size") = 2001,
      "stochastic-dominance certificate for the pure-option menu");

  m.def(
      "optimize_menu_size",
      [](const ValueModel& model, double s, const std::string& mode,
         std::size_t mc_samples, std::uint64_t seed, int z_grid_size) {
        TwoGoodOptions opts;
        opts.mode = mode_from(mode);
        opts.mc_samples = mc_samples;
        opts.seed = seed;
        opts.z_grid_size = z_grid_size;
        auto sol = optimize_z(model, s, opts);
        py::dict d;
        d["z_star"] = sol.z_star;
        d["zeta_star"] = sol.zeta_star;
        d["r_star"] = sol.r_star;
        d["r_half"] = sol.r_half;
        d["verdict"] = verdict_name(sol.verdict);
        d["menu"] = menu_dict(sol.menu);
        d["gap_stat_tol"] = sol.gap_stat_tol;
        d["near_maximizers"] = sol.near_maximizers;
        d["detail"] = sol.detail;
        std::vector<std::vector<double>> curve;
        curve.reserve(sol.r_curve.size());
        for (const auto& pt : sol.r_curve)
          curve.push_back({pt.z, pt.zeta, pt.r});
        d["r_curve"] = curve;
        return d;
      },
      py::arg("model"), py::arg("supply") = 0.1, py::arg("mode") = "auto",
      py::arg("mc_samples") = 1'000'000, py::arg("seed") = 90210,
      py::arg("z_grid_size") = 2001,
      "best two- or three-option menu under equal supplies");

  m.def(
      "simulate",
      [](const ValueModel& model,
         const std::vector<std::vector<double>>& bundles,
         const std::vector<double>& supplies,
         const std::vector<std::string>& labels, std::size_t mc_samples,
         std::uint64_t seed) {
        EvalOptions opts;
        opts.mc_samples = mc_samples;
        opts.seed = seed;
        auto rep = simulate(model, menu_from(bundles, labels), supplies, opts);
        py::dict d;
        d["welfare_v_space"] = rep.welfare_v_space;
        d["welfare_v_se"] = rep.welfare_v_se;
        d["welfare_theta_space"] = rep.welfare_theta_space;
        d["welfare_theta_se"] = rep.welfare_theta_se;
        d["theta_space_available"] = rep.theta_space_available;
        d["demand"] = rep.demand;
        d["demand_se"] = rep.demand_se;
        d["supply_slack"] = rep.supply_slack;
        d["choice_shares"] = rep.choice_shares;
        d["samples"] = rep.samples;
        return d;
      },
      py::arg("model"), py::arg("bundles"), py::arg("supplies"),
      py::arg("labels") = std::vector<std::string>{},
      py::arg("mc_samples") = 1'000'000, py::arg("seed") = 90210,
      "sampled welfare, demand, and choice shares of a menu");

  m.def(
      "ratio_monotonicity",
      [](const ValueModel& model,
         const std::vector<std::vector<double>>& bundles,
         std::size_t n_pairs, std::uint64_t seed) {
        auto rep = check_ratio_monotonicity(
            model, menu_rule(menu_from(bundles, {})), n_pairs, seed);
        py::dict d;
        d["holds"] = rep.holds();
        d["pairs_sampled"] = rep.pairs_sampled;
        d["comparisons"] = rep.comparisons;
        d["violations"] = rep.violations.size();
        d["max_deficit"] = rep.max_deficit;
        return d;
      },
      py::arg("model"), py::arg("bundles"), py::arg("n_pairs") = 10'000,
      py::arg("seed") = 90210,
      "implementability check of the menu-induced allocation rule");

  m.def(
      "lottery_fixed_point",
      [](const ValueModel& model, const std::vector<double>& supplies,
         const std::string& mode, std::size_t mc_samples, std::uint64_t seed,
         double alpha) {
        EvalOptions opts;
        opts.mode = mode_from(mode);
        opts.mc_samples = mc_samples;
        opts.seed = seed;
        opts.lottery_alpha = alpha;
        auto res = lottery_fixed_point(model, supplies, opts);
        py::dict d;
        d["q"] = res.q;
        d["masses"] = res.masses;
        d["iterations"] = res.iterations;
        d["converged"] = res.converged;
        d["residual"] = res.residual;
        d["detail"] = res.detail;
        return d;
      },
      py::arg("model"), py::arg("supplies"), py::arg("mode") = "auto",
      py::arg("mc_samples") = 1'000'000, py::arg("seed") = 90210,
      py::arg("alpha") = 0.5,
      "equilibrium of the single-request lottery game");

  m.def(
      "unit_demand_slack",
      [](const std::vector<std::vector<double>>& bundles) {
        auto s = unit_demand_slack(menu_from(bundles, {}));
        py::dict d;
        d["max_bundle_mass"] = s.max_bundle_mass;
        d["interpretable"] = s.interpretable;
        return d;
      },
      py::arg("bundles"),
      "whether every bundle stays strictly below one unit in total");
}
