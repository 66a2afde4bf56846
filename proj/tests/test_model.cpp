#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairdiv/model.hpp"

using namespace fairdiv;

TEST_CASE("uniform square renormalized closed forms") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  CHECK(m.n_goods() == 2);
  CHECK(m.exchangeable());
  CHECK(m.expected_total_value() == doctest::Approx(1.0));
  CHECK(rm.g_mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  // density of t = Theta_1: 1/(2 t^2) above 1/2, mirrored below
  CHECK(rm.g_t(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rm.g_t(0.75) == doctest::Approx(1.0 / (2.0 * 0.75 * 0.75)).epsilon(1e-12));
  CHECK(rm.g_t(0.25) == doctest::Approx(rm.g_t(0.75)).epsilon(1e-12));

  // conditional total value 2/(3 max(t, 1-t))
  CHECK(rm.lambda_t(0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(rm.lambda_t(0.75) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(rm.lambda_t(0.25) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));

  SimplexPoint mid({0.5, 0.5});
  CHECK(rm.g_density(mid) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rm.lambda_weight(mid) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("corner mass branch values") {
  ValueModel m = ValueModel::corner_mass(0.2, 20.0, 5.0 / 24.0);
  RenormalizedModel rm(m);
  CHECK(m.expected_total_value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rm.g_mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));

  // outer branch: 19/48 + 5/(48 t^2); inner: -95/3 + 10/t^2
  CHECK(rm.g_t(0.6) == doctest::Approx(0.685185185185).epsilon(1e-10));
  CHECK(rm.g_t(0.52) == doctest::Approx(5.31558185404).epsilon(1e-10));
  CHECK(rm.g_t(0.4) == doctest::Approx(rm.g_t(0.6)).epsilon(1e-12));
  CHECK(rm.lambda_t(0.6) == doctest::Approx(0.546246246246).epsilon(1e-10));

  // kinks where the support triangles end
  auto brk = rm.t_breaks();
  REQUIRE(brk.size() >= 3);
  CHECK(brk.front() == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(brk.back() == doctest::Approx(5.0 / 9.0).epsilon(1e-12));

  CHECK_THROWS_AS(ValueModel::corner_mass(0.2, 20.0, 0.625), std::invalid_argument);
}

TEST_CASE("custom piecewise reproduces the uniform square") {
  std::vector<BoxCell> cells{{{0.0, 0.0}, {1.0, 1.0}, 1.0}};
  ValueModel m = ValueModel::custom_piecewise(cells);
  RenormalizedModel rm(m);
  ValueModel u = ValueModel::uniform_square();
  RenormalizedModel ru(u);
  for (double t : {0.31, 0.5, 0.62, 0.9}) {
    CHECK(rm.g_t(t) == doctest::Approx(ru.g_t(t)).epsilon(1e-9));
    CHECK(rm.lambda_t(t) == doctest::Approx(ru.lambda_t(t)).epsilon(1e-9));
  }
}

TEST_CASE("marginals: closed forms and quantiles") {
  Marginal u = Marginal::uniform01();
  CHECK(u.mean() == doctest::Approx(0.5));
  CHECK(u.quantile(0.3) == doctest::Approx(0.3));
  CHECK(u.ratio_limit_at_zero() == doctest::Approx(1.0));

  Marginal p = Marginal::power(2.0);
  CHECK(p.cdf(0.5) == doctest::Approx(0.25));
  CHECK(p.quantile(0.25) == doctest::Approx(0.5));
  CHECK(p.pdf(0.5) == doctest::Approx(1.0));
  CHECK(p.ratio_limit_at_zero() == doctest::Approx(2.0));

  Marginal e = Marginal::exp_unit();
  CHECK(e.cdf(1.0) == doctest::Approx(1.0));
  CHECK(e.pdf(0.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)));
  // quantile inverts the cdf
  CHECK(e.cdf(e.quantile(0.7)) == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("sampling is deterministic and matches the density") {
  ValueModel m = ValueModel::corner_mass(0.2, 20.0, 5.0 / 24.0);
  auto a = m.sample_values(5000, 42);
  auto b = m.sample_values(5000, 42);
  CHECK(a == b);
  auto c = m.sample_values(5000, 43);
  CHECK(a != c);

  // all samples in the supported region, triangle mass ~ hi a^2 = 0.8
  std::size_t in_triangles = 0;
  for (std::size_t i = 0; i < 5000; ++i) {
    double x = a[2 * i], y = a[2 * i + 1];
    REQUIRE(x >= 0.0);
    REQUIRE(y >= 0.0);
    REQUIRE(x <= 1.0);
    REQUIRE(y <= 1.0);
    if (x + y <= 0.2 || x + y >= 1.8) ++in_triangles;
  }
  double share = double(in_triangles) / 5000.0;
  CHECK(share == doctest::Approx(0.8).epsilon(0.025));  // ~4.4 sigma
}

TEST_CASE("iid sampling hits the marginal mean") {
  ValueModel m = ValueModel::iid(Marginal::power(2.0), 3);
  CHECK(m.n_goods() == 3);
  CHECK(m.exchangeable());
  auto v = m.sample_values(20000, 7);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  CHECK(mean == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}

TEST_CASE("renormalize and simplex point validation") {
  std::vector<double> v{0.3, 0.9};
  auto p = renormalize(v);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.75));
  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(renormalize(zero), std::domain_error);
  CHECK_THROWS_AS(SimplexPoint({0.2, 0.2}), std::invalid_argument);
}

TEST_CASE("ray geometry of the square support") {
  ValueModel m = ValueModel::uniform_square();
  std::vector<double> theta{0.25, 0.75};
  // s * theta leaves [0,1]^2 when s * 0.75 = 1
  CHECK(m.ray_upper(theta) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  ValueModel cm = ValueModel::corner_mass(0.2, 20.0, 5.0 / 24.0);
  std::vector<double> brk;
  std::vector<double> mid{0.5, 0.5};
  cm.ray_breaks(mid, brk);
  // density regime changes at total value 0.2 and 1.8 along the diagonal
  REQUIRE(brk.size() == 2);
  CHECK(brk[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(brk[1] == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("numeric g integration agrees with registered closed forms") {
  // force the ray-quadrature path through a custom copy of the corner model
  ValueModel cm = ValueModel::corner_mass(0.2, 20.0, 5.0 / 24.0);
  RenormalizedModel rm(cm);
  // integrate_t over a kink-bracketing window equals the mass difference
  double direct = rm.integrate_t([&](double t) { return rm.g_t(t); }, 0.4, 0.6);
  CHECK(direct == doctest::Approx(rm.g_mass(0.4, 0.6)).epsilon(1e-10));
}
