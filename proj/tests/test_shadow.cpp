#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairdiv/model.hpp"
#include "fairdiv/shadow.hpp"

using namespace fairdiv;

namespace {

ShadowOptions quad() {
  ShadowOptions o;
  o.mode = IntegrationMode::quadrature;
  return o;
}

}  // namespace

TEST_CASE("symmetric square: full pipeline closed forms") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> q{0.2, 0.2};
  auto rep = shadow_costs(rm, q, quad());

  CHECK(rep.M[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.A[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(rep.A[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

  // sqrt(2) g(1/2) t0^2 / q2 = sqrt(2)/2 / 0.2
  double t12 = std::sqrt(2.0) * 2.0 * 0.25 / 0.2;
  CHECK(rep.T(0, 1) == doctest::Approx(t12).epsilon(1e-10));
  CHECK(rep.T(1, 0) == doctest::Approx(t12).epsilon(1e-10));
  CHECK(rep.J(0, 0) == doctest::Approx(0.5 + std::sqrt(2.0) / 2.0).epsilon(1e-10));
  CHECK(rep.J(0, 1) == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-10));

  CHECK(rep.c[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(rep.c[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  // at the symmetric point both conventions solve to the same costs
  CHECK(rep.c_flow[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));

  CHECK(rep.diag_dominance_margin == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(rep.positivity_verified);
  CHECK(rep.method_tag == "geometric");
}

TEST_CASE("asymmetric quantities: closed-form costs at two anchors") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);

  // t0 = 0.6
  std::vector<double> q1{0.3, 0.45};
  auto r1 = shadow_costs(rm, q1, quad());
  CHECK(r1.c[0] == doctest::Approx(0.798815536469).epsilon(1e-9));
  CHECK(r1.c[1] == doctest::Approx(0.594839265621).epsilon(1e-9));
  CHECK(r1.T(0, 1) == doctest::Approx(1.571348403).epsilon(1e-8));

  // t0 = 0.75
  std::vector<double> q2{0.2, 0.6};
  auto r2 = shadow_costs(rm, q2, quad());
  CHECK(r2.c[0] == doctest::Approx(1.22597812064).epsilon(1e-9));
  CHECK(r2.c[1] == doctest::Approx(0.540490347513).epsilon(1e-9));
  // flow-convention costs come out rational
  CHECK(r2.c_flow[0] == doctest::Approx(38.0 / 33.0).epsilon(1e-9));
  CHECK(r2.c_flow[1] == doctest::Approx(6.0 / 11.0).epsilon(1e-9));
  // margin is min_i M_i / q_i: M = (1/6, 5/6)
  CHECK(r2.diag_dominance_margin == doctest::Approx((1.0 / 6.0) / 0.2).epsilon(1e-9));

  // mass-flow reciprocity q_i T_ij = q_j T_ji survives the common scaling
  CHECK(q1[0] * r1.T(0, 1) == doctest::Approx(q1[1] * r1.T(1, 0)).epsilon(1e-10));
  CHECK(q2[0] * r2.T(0, 1) == doctest::Approx(q2[1] * r2.T(1, 0)).epsilon(1e-10));
}

TEST_CASE("finite differences agree with the geometric boundary integral") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> q{0.3, 0.45};
  ShadowOptions fd = quad();
  fd.method_forced = true;
  fd.method = SwitchMethod::finite_difference;
  auto rf = shadow_costs(rm, q, fd);
  auto rg = shadow_costs(rm, q, quad());
  CHECK(rf.method_tag == "finite_difference");
  for (int i = 0; i < 2; ++i) {
    CHECK(rf.c[size_t(i)] == doctest::Approx(rg.c[size_t(i)]).epsilon(1e-4));
    for (int j = 0; j < 2; ++j)
      if (i != j)
        CHECK(rf.T(i, j) == doctest::Approx(rg.T(i, j)).epsilon(1e-3));
  }
}

TEST_CASE("three goods: iid uniform symmetric point is fully solvable") {
  ValueModel m = ValueModel::iid(Marginal::uniform01(), 3);
  RenormalizedModel rm(m);
  std::vector<double> q{0.25, 0.25, 0.25};
  ShadowOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = 400'000;
  auto rep = shadow_costs(rm, q, o);
  CHECK(rep.method_tag == "geometric");
  // interface quadrature is deterministic: T = 4/3 exactly
  CHECK(rep.T(0, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(rep.T(2, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  // A_i = E[V_i; V_i largest] = E[max]/3 = 1/4, so c = 3A = 3/4
  for (int i = 0; i < 3; ++i) {
    CHECK(rep.A[size_t(i)] == doctest::Approx(0.25).epsilon(0.01));
    CHECK(rep.c[size_t(i)] == doctest::Approx(0.75).epsilon(0.01));
  }
  CHECK(rep.positivity_verified);
}

TEST_CASE("four goods fall back to finite differences") {
  ValueModel m = ValueModel::iid(Marginal::uniform01(), 4);
  RenormalizedModel rm(m);
  std::vector<double> q{0.25, 0.25, 0.25, 0.25};
  ShadowOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = 200'000;

  ShadowOptions forced = o;
  forced.method_forced = true;
  forced.method = SwitchMethod::geometric;
  CHECK_THROWS_WITH_AS(switching_densities(rm, q, SwitchMethod::geometric, o),
                       "geometric method requires N <= 3",
                       std::invalid_argument);
  CHECK_THROWS_AS(shadow_costs(rm, q, forced), std::invalid_argument);

  auto rep = shadow_costs(rm, q, o);
  CHECK(rep.method_tag == "finite_difference");
  // exchangeable symmetric point: all costs equal and positive
  CHECK(rep.positivity_verified);
  CHECK(rep.c[0] == doctest::Approx(rep.c[3]).epsilon(0.05));
}

TEST_CASE("sampled region moments match the quadrature ones") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> q{0.3, 0.45};
  ShadowOptions o;
  o.mode = IntegrationMode::mc;
  o.mc_samples = 400'000;
  auto [mm, am] = region_moments(rm, q, o);
  auto [mq, aq] = region_moments(rm, q, quad());
  for (int i = 0; i < 2; ++i) {
    CHECK(mm[size_t(i)] == doctest::Approx(mq[size_t(i)]).epsilon(0.01));
    CHECK(am[size_t(i)] == doctest::Approx(aq[size_t(i)]).epsilon(0.01));
  }
  CHECK(mq[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("quantity validation") {
  ValueModel m = ValueModel::uniform_square();
  RenormalizedModel rm(m);
  std::vector<double> q{0.2, 0.0};
  CHECK_THROWS_WITH_AS(shadow_costs(rm, q, quad()),
                       "quantities must be strictly positive",
                       std::domain_error);
}

TEST_CASE("linear solve certifies positivity through the dominance margin") {
  // hand-built 2x2 system mirroring the assembled structure
  Matrix t(2);
  t(0, 1) = 2.5;
  t(1, 0) = 2.5;
  std::vector<double> mass{0.5, 0.5};
  std::vector<double> q{0.2, 0.2};
  Matrix j = assemble_J(mass, t, q);
  CHECK(j(0, 0) == doctest::Approx(0.5 + 0.2 * 2.5));
  CHECK(j(0, 1) == doctest::Approx(-0.2 * 2.5));
  double margin = 0.0, cond = 0.0;
  std::vector<double> a{1.0 / 3.0, 1.0 / 3.0};
  auto c = solve_shadow_costs(j, a, q, &margin, &cond);
  CHECK(c[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(margin == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(cond > 1.0);
}
