#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fairdiv/ceei.hpp"
#include "fairdiv/evaluator_types.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv {

// Any allocation rule evaluable at simplex points; menus induce one via
// menu_rule.
using AllocationRule = std::function<std::vector<double>(const SimplexPoint&)>;

struct EvalOptions {
  IntegrationMode mode = IntegrationMode::auto_pick;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 90210;
  double lottery_alpha = 0.5;    // damping of the best-response iteration
  double lottery_tol = 1e-10;    // max relative change of q at convergence
  int lottery_max_iters = 10'000;
};

struct WelfareReport {
  double welfare_v_space = 0.0;   // mean of V . bundle(Theta(V))
  double welfare_v_se = 0.0;
  double welfare_theta_space = 0.0;  // mean of lambda(Theta) . U(Theta)
  double welfare_theta_se = 0.0;
  bool theta_space_available = false;
  std::vector<double> demand;         // mean bundle per good
  std::vector<double> demand_se;
  std::vector<double> supply_slack;   // s_i - demand_i
  std::vector<double> choice_shares;  // per menu bundle
  std::size_t samples = 0;
};

// Index of a welfare-maximizing bundle for the given valuation; ties break
// toward the lowest index.
std::size_t best_response(const Menu& menu, const std::vector<double>& theta);
std::size_t best_response(const Menu& menu, const SimplexPoint& theta);

AllocationRule menu_rule(const Menu& menu);

// Monte Carlo menu evaluation: welfare in both type spaces (the theta-space
// estimate uses the renormalized weight lambda), demand vs supply, choice
// shares. The two welfare estimators target the same number and must agree
// within sampling error.
WelfareReport simulate(const ValueModel& model, const Menu& menu,
                       const std::vector<double>& supplies,
                       const EvalOptions& opts = {});

struct RatioViolation {
  std::vector<double> theta_near;  // the type closer to vertex good_index
  std::vector<double> theta_far;
  int good_index = 0;
  double deficit = 0.0;  // U(far)/far_i - U(near)/near_i, negative on failure
};

struct RatioMonotonicityReport {
  std::size_t pairs_sampled = 0;
  std::size_t comparisons = 0;  // ordered (pair, good) combinations found
  std::vector<RatioViolation> violations;  // capped at 100
  double max_deficit = 0.0;                // most negative margin observed
  bool holds() const { return violations.empty(); }
};

// Implementability check: for sampled type pairs ordered by the per-good
// ratio order (theta closer to vertex i when all ratios theta_k/theta_i are
// smaller), U(theta)/theta_i must not exceed U(theta')/theta'_i + tol for the
// farther theta'. Menu-induced rules satisfy it by construction.
RatioMonotonicityReport check_ratio_monotonicity(const ValueModel& model,
                                                 const AllocationRule& rule,
                                                 std::size_t n_pairs = 10'000,
                                                 std::uint64_t seed = 90210,
                                                 double tol = 1e-9);

struct LotteryResult {
  std::vector<double> q;       // equilibrium winning quantities
  std::vector<double> masses;  // m_i: share requesting good i
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max_i |q_i m_i - s_i| / s_i
  std::string detail;
};

// Damped best-response iteration of the single-request lottery game:
// each type asks for its favorite good at current odds,
// q <- (1-alpha) q + alpha s/m. Exact ties split proportionally to current q.
// Empty regions make the target infinite for that step; the step is damped
// by capping the target. Non-convergence raises a diagnostic error
// suggesting smaller alpha.
LotteryResult lottery_fixed_point(const ValueModel& model,
                                  const std::vector<double>& supplies,
                                  const EvalOptions& opts = {});

// Same game on an explicit finite population of types (outer index = type),
// each with equal weight; covers degenerate point-mass populations.
LotteryResult lottery_fixed_point_from_types(
    const std::vector<std::vector<double>>& types,
    const std::vector<double>& supplies, const EvalOptions& opts = {});

struct UnitDemandSlack {
  double max_bundle_mass = 0.0;  // max over menu bundles of sum_i x_i
  bool interpretable = false;    // strictly below one unit total
};

// Largest bundle total; a menu is interpretable as a unit-demand lottery
// only when every bundle stays strictly below one unit in total.
UnitDemandSlack unit_demand_slack(const Menu& menu);

}  // namespace fairdiv
