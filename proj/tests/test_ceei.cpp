#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairdiv/ceei.hpp"
#include "fairdiv/model.hpp"

using namespace fairdiv;

namespace {

CeeiOptions quad() {
  CeeiOptions o;
  o.mode = IntegrationMode::quadrature;
  return o;
}

}  // namespace

TEST_CASE("potential value at the flat price point") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.1}, y{0.0, 0.0};
  // E[max(log th1, log th2)] + 0.2 = 0.2 - 2 log 2 + 1 for the square
  double oracle = 1.2 - 2.0 * std::log(2.0);
  CHECK(potential(rm, s, y, quad()) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("gradient components are clearing residuals in price space") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.3};
  std::vector<double> y{-1.0, 0.4};
  auto g = potential_gradient(rm, s, y, quad());
  const double h = 1e-6;
  for (size_t i = 0; i < y.size(); ++i) {
    auto yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    double fd =
        (potential(rm, s, yp, quad()) - potential(rm, s, ym, quad())) / (2 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("symmetric square clears at twice the supply") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.1};
  auto sol = solve_ceei(rm, s, quad());
  CHECK(sol.converged);
  CHECK(sol.q[0] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(sol.q[1] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(sol.theta0[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.region_masses[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.clearing_residual < 1e-8);
  CHECK(sol.p[0] == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("asymmetric supplies move the indifference point") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.3};
  auto sol = solve_ceei(rm, s, quad());
  // hand-solved clearing system: q = (0.3, 0.45), t0 = 0.6
  CHECK(sol.q[0] == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(sol.q[1] == doctest::Approx(0.45).epsilon(1e-8));
  // theta0 proportional to 1/q
  CHECK(sol.theta0[0] == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(sol.theta0[1] == doctest::Approx(0.4).epsilon(1e-8));
  // good 1 chosen by t >= 0.6: mass 1/3
  CHECK(sol.region_masses[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("corner model still clears at twice the supply by symmetry") {
  ValueModel m = ValueModel::corner_mass(0.2, 20.0, 5.0 / 24.0);
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.1};
  auto sol = solve_ceei(rm, s, quad());
  CHECK(sol.q[0] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(sol.q[1] == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("sampled solve lands within sampling error and is reproducible") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.3};
  CeeiOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = 200'000;
  o.seed = 90210;
  auto sol = solve_ceei(rm, s, o);
  CHECK(sol.converged);
  CHECK(sol.q[0] == doctest::Approx(0.3).epsilon(0.01));
  CHECK(sol.q[1] == doctest::Approx(0.45).epsilon(0.01));
  CHECK(sol.clearing_residual <= o.tol_clear);
  auto sol2 = solve_ceei(rm, s, o);
  CHECK(sol.q == sol2.q);
  CHECK(sol.iterations == sol2.iterations);
}

TEST_CASE("three-good sampled solve clears a symmetric iid market") {
  ValueModel m = ValueModel::iid(Marginal::uniform01(), 3);
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.1, 0.1};
  CeeiOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = 200'000;
  auto sol = solve_ceei(rm, s, o);
  CHECK(sol.converged);
  // symmetric: every region gets mass 1/3, so q = 3 s
  for (int i = 0; i < 3; ++i)
    CHECK(sol.q[size_t(i)] == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("a narrow two-good cell behaves like a single type") {
  // nearly-degenerate population concentrated at v = (0.6, 0.6)
  std::vector<BoxCell> cells{{{0.59, 0.59}, {0.61, 0.61}, 2500.0}};
  ValueModel m = ValueModel::custom_piecewise(cells);
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.1};
  auto sol = solve_ceei(rm, s, quad());
  CHECK(sol.q[0] == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(sol.q[1] == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(sol.region_masses[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("validation and failure reporting") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> bad{0.1, -0.1};
  CHECK_THROWS_WITH_AS(solve_ceei(rm, bad, quad()),
                       "supplies must be strictly positive", std::domain_error);

  // quadrature backend is a two-good reduction
  ValueModel m3 = ValueModel::iid(Marginal::uniform01(), 3);
  RenormalizedModel rm3(m3);
  std::vector<double> s3{0.1, 0.1, 0.1};
  CHECK_THROWS_AS(solve_ceei(rm3, s3, quad()), std::invalid_argument);

  // unattainable clearing tolerance on the sampled path surfaces the best
  // iterate instead of pretending to converge
  CeeiOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = 10'000;
  o.seed = 1;
  o.tol_clear = 1e-12;
  std::vector<double> s{0.1, 0.1};
  try {
    solve_ceei(rm, s, o);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("did not converge") != std::string::npos);
    CHECK(e.best.q[0] == doctest::Approx(0.2).epsilon(0.05));
    CHECK_FALSE(e.best.converged);
  }
}

TEST_CASE("regions and the pure-option menu") {
  std::vector<double> q{0.3, 0.45};
  CHECK(region_of(SimplexPoint({0.7, 0.3}), q) == 0);
  CHECK(region_of(SimplexPoint({0.5, 0.5}), q) == 1);
  // exact indifference breaks toward the lower index
  std::vector<double> q_tie{0.25, 0.25};
  CHECK(region_of(SimplexPoint({0.5, 0.5}), q_tie) == 0);

  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> s{0.1, 0.3};
  auto menu = ceei_menu(solve_ceei(rm, s, quad()));
  REQUIRE(menu.bundles.size() == 2);
  CHECK(menu.bundles[0][0] == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(menu.bundles[0][1] == 0.0);
  CHECK(menu.bundles[1][1] == doctest::Approx(0.45).epsilon(1e-8));
  CHECK(menu.labels[0] == "pure good 1");
  CHECK(menu.labels[1] == "pure good 2");
}
