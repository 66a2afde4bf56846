#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fairdiv/ceei.hpp"
#include "fairdiv/evaluator.hpp"
#include "fairdiv/model.hpp"

using namespace fairdiv;

namespace {

EvalOptions mc_opts(std::size_t n = 200'000) {
  EvalOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = n;
  return o;
}

Menu pure_menu(double q1, double q2) {
  Menu m;
  m.bundles = {{q1, 0.0}, {0.0, q2}};
  m.labels = {"pure good 1", "pure good 2"};
  return m;
}

}  // namespace

TEST_CASE("best response maximizes utility and breaks ties low") {
  Menu menu;
  menu.bundles = {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}};

  CHECK(best_response(menu, std::vector<double>{0.6, 0.4}) == 0);
  CHECK(best_response(menu, std::vector<double>{0.3, 0.7}) == 1);
  // exact three-way tie at the barycenter: lowest index wins
  CHECK(best_response(menu, std::vector<double>{0.5, 0.5}) == 0);
  CHECK(best_response(menu, SimplexPoint({0.5, 0.5})) == 0);

  auto rule = menu_rule(menu);
  auto picked = rule(SimplexPoint({0.2, 0.8}));
  CHECK(picked[1] == 1.0);

  Menu empty;
  CHECK_THROWS_WITH_AS(best_response(empty, std::vector<double>{1.0}),
                       "empty menu", std::invalid_argument);
}

TEST_CASE("simulated welfare of the market menu matches the closed form") {
  auto model = ValueModel::uniform_square();
  std::vector<double> s{0.1, 0.1};
  CeeiOptions copts;
  copts.mode = IntegrationMode::quadrature;
  RenormalizedModel rm(model);
  auto ceei = solve_ceei(rm, s, copts);
  auto menu = ceei_menu(ceei);

  auto rep = simulate(model, menu, s, mc_opts());
  CHECK(rep.samples == 200'000);

  // expected welfare of the two pure options under uniform values is
  // 2s E[max(V1, V2)] / E[V1 + V2] scaled into supply units: 4s/3 = 2/15
  const double target = 2.0 / 15.0;
  CHECK(std::abs(rep.welfare_v_space - target) < 3.0 * rep.welfare_v_se);
  CHECK(std::abs(rep.welfare_v_space - target) < 0.005);

  // the reweighted estimator integrates a pointwise-constant function here,
  // so it returns the exact value with zero variance
  REQUIRE(rep.theta_space_available);
  CHECK(rep.welfare_theta_se <= 1e-15);
  CHECK(rep.welfare_theta_space == doctest::Approx(target).epsilon(1e-12));

  // market-clearing menu: demand uses up the supply of both goods
  REQUIRE(rep.demand.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(rep.demand[static_cast<size_t>(i)] - 0.1) <
          3.0 * rep.demand_se[static_cast<size_t>(i)] + 1e-12);
    CHECK(std::abs(rep.supply_slack[static_cast<size_t>(i)]) < 0.002);
  }

  REQUIRE(rep.choice_shares.size() == 2);
  CHECK(rep.choice_shares[0] == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rep.choice_shares[0] + rep.choice_shares[1] ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simulate rejects menus of the wrong dimension") {
  auto model = ValueModel::uniform_square();
  Menu bad;
  bad.bundles = {{0.1, 0.1, 0.1}};
  CHECK_THROWS_WITH_AS(simulate(model, bad, {0.1, 0.1}),
                       "menu dimension does not match the model",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      simulate(model, pure_menu(0.2, 0.2), {0.1, 0.1, 0.1}),
      "supply vector has wrong dimension", std::invalid_argument);
}

TEST_CASE("menu rules pass the ratio-monotonicity check") {
  auto model = ValueModel::uniform_square();
  auto rep =
      check_ratio_monotonicity(model, menu_rule(pure_menu(0.2, 0.2)));
  CHECK(rep.holds());
  CHECK(rep.pairs_sampled == 10'000);
  CHECK(rep.comparisons > 0);
  CHECK(rep.max_deficit > -1e-9);

  Menu mixed;
  mixed.bundles = {{0.17, 0.0}, {0.0, 0.17}, {0.11, 0.11}};
  CHECK(check_ratio_monotonicity(model, menu_rule(mixed)).holds());
}

TEST_CASE("a rule that rewards mid types fails the ratio check") {
  auto model = ValueModel::uniform_square();
  // hands out double the pure bundle only in a mid band of theta_1: moving
  // toward the good-1 vertex then cuts the scaled utility in half
  AllocationRule band = [](const SimplexPoint& theta) {
    double t1 = theta.coords[0];
    if (t1 >= 0.4 && t1 <= 0.6) return std::vector<double>{2.0, 0.0};
    return std::vector<double>{1.0, 0.0};
  };
  auto rep = check_ratio_monotonicity(model, band);
  CHECK_FALSE(rep.holds());
  CHECK_FALSE(rep.violations.empty());
  CHECK(rep.violations.size() <= 100);
  // good-1 pairs across the band boundary sit at exactly -1; good-2 pairs
  // straddling theta_1 = 0.6 approach -1.5 without attaining it
  CHECK(rep.max_deficit <= -1.0);
  CHECK(rep.max_deficit > -1.5);
  for (const auto& v : rep.violations) {
    CHECK(v.deficit < 0.0);
    CHECK((v.good_index == 0 || v.good_index == 1));
  }
}

TEST_CASE("lottery fixed point matches the market quantities") {
  auto model = ValueModel::uniform_square();
  std::vector<double> s{0.1, 0.3};

  EvalOptions q;
  q.mode = IntegrationMode::quadrature;
  auto res = lottery_fixed_point(model, s, q);
  CHECK(res.converged);
  // uniform values with supplies (0.1, 0.3): quantities (0.3, 0.45) and
  // request masses (1/3, 2/3) clear both goods
  CHECK(res.q[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(res.q[1] == doctest::Approx(0.45).epsilon(1e-6));
  CHECK(res.masses[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(res.masses[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(res.residual < 1e-6);
  CHECK(res.iterations > 0);
  CHECK(res.detail.find("converged in") != std::string::npos);
}

TEST_CASE("sampled lottery converges despite empirical granularity") {
  auto model = ValueModel::uniform_square();
  std::vector<double> s{0.1, 0.3};
  auto opts = mc_opts(100'000);
  // tolerance below the resolution of empirical masses: the stopping rule
  // must widen to the sampling granularity instead of spinning forever
  opts.lottery_tol = 1e-10;
  auto res = lottery_fixed_point(model, s, opts);
  CHECK(res.converged);
  CHECK(res.iterations < opts.lottery_max_iters);
  CHECK(std::abs(res.q[0] - 0.3) / 0.3 < 0.02);
  CHECK(std::abs(res.q[1] - 0.45) / 0.45 < 0.02);
  CHECK(res.residual < 0.02);
}

TEST_CASE("degenerate type populations") {
  std::vector<double> s{0.1, 0.1};

  // a symmetric point mass ties everywhere; proportional splitting makes
  // the equal-quantity pair a fixed point immediately
  auto res = lottery_fixed_point_from_types({{0.5, 0.5}}, s);
  CHECK(res.converged);
  CHECK(res.q[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(res.q[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(res.masses[0] == doctest::Approx(0.5).epsilon(1e-12));

  // a single asymmetric point mass has no fixed point: everyone chases one
  // good, its odds collapse, and the preference flips forever
  EvalOptions short_run;
  short_run.lottery_max_iters = 500;
  CHECK_THROWS_WITH_AS(
      lottery_fixed_point_from_types({{0.3, 0.7}}, s, short_run),
      doctest::Contains("lottery iteration"), std::runtime_error);
}

TEST_CASE("type population validation") {
  std::vector<double> s{0.1, 0.1};
  CHECK_THROWS_WITH_AS(lottery_fixed_point_from_types({}, s),
                       "empty type population", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      lottery_fixed_point_from_types({{0.5, 0.3, 0.2}}, s),
      "type dimension does not match supplies", std::invalid_argument);
  CHECK_THROWS_WITH_AS(lottery_fixed_point_from_types({{0.0, 0.0}}, s),
                       "renormalization undefined at origin",
                       std::domain_error);
  CHECK_THROWS_WITH_AS(
      lottery_fixed_point_from_types({{0.5, 0.5}}, {0.1, -0.1}),
      "supplies must be strictly positive", std::domain_error);
}

TEST_CASE("unit-demand interpretation needs bundles below one unit") {
  auto ok = unit_demand_slack(pure_menu(0.2, 0.2));
  CHECK(ok.max_bundle_mass == doctest::Approx(0.2));
  CHECK(ok.interpretable);

  Menu heavy;
  heavy.bundles = {{0.7, 0.4}, {0.1, 0.1}};
  auto bad = unit_demand_slack(heavy);
  CHECK(bad.max_bundle_mass == doctest::Approx(1.1));
  CHECK_FALSE(bad.interpretable);

  // exactly one unit is already too much: the slack must be strict
  Menu boundary;
  boundary.bundles = {{0.5, 0.5}};
  CHECK_FALSE(unit_demand_slack(boundary).interpretable);
}
