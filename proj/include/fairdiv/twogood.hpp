#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fairdiv/ceei.hpp"
#include "fairdiv/evaluator_types.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv {

struct TwoGoodOptions {
  IntegrationMode mode = IntegrationMode::auto_pick;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 90210;
  int z_grid_size = 2001;
  double golden_tol = 1e-6;
  double stat_sigmas = 3.0;
  int k_grid_steps = 200;  // grid 0, 1/steps, ..., 1
};

// Shared evaluation context: one sample set (or the exact quadrature
// reduction) reused for every z, so the empirical curve is smooth.
class TwoGoodContext {
 public:
  TwoGoodContext(const ValueModel& model, const TwoGoodOptions& opts);
  ~TwoGoodContext();

  bool quadrature() const;
  double expected_total() const;
  // P[V2 - z(V1+V2) >= 0]
  double upper_share(double z) const;
  // E[(V2 - z(V1+V2))+]
  double excess_mean(double z) const;
  // batch-wise values for standard errors (MC path; empty on quadrature)
  std::vector<double> r_batches(double z) const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

double zeta(const TwoGoodContext& ctx, double z);
double r_value(const TwoGoodContext& ctx, double z);

enum class TwoGoodVerdict {
  two_option_optimal,
  three_option_optimal,
  indeterminate
};

std::string verdict_name(TwoGoodVerdict v);

struct RCurvePoint {
  double z, zeta, r;
};

struct TwoGoodSolution {
  double z_star = 0.5;
  double zeta_star = 0.5;
  double r_star = 0.0;
  TwoGoodVerdict verdict = TwoGoodVerdict::two_option_optimal;
  Menu menu;
  Menu alternate_menu;  // filled when the verdict is indeterminate
  std::vector<RCurvePoint> r_curve;
  std::vector<std::array<double, 2>> refinement_log;
  std::vector<double> near_maximizers;
  double r_half = 0.0;
  double gap_stat_tol = 0.0;
  std::string detail;
};

// Grid search over [1/2, 1] plus golden-section refinement of
// r(z) = (z E[V1+V2] + 2 E[(V2 - z(V1+V2))+]) / zeta(z); emits the two pure
// options of size s / zeta(z*) plus the equal mixture (z* q_L, z* q_L) when
// z* > 1/2. Requires symmetric supplies and an exchangeable model; throws
// std::invalid_argument otherwise.
TwoGoodSolution optimize_z(const ValueModel& model, double s,
                           const TwoGoodOptions& opts = {});

struct TwoOptionCondition {
  bool holds = false;
  double max_gap = 0.0;  // max over k of LHS - RHS
  double argmax_k = 0.0;
  bool monotone_sufficient_holds = false;
  double monotone_max_increase = 0.0;
  std::string detail;
};

// Exact two-option optimality condition: for every k in [0, 1],
//   E[min - k max | min/max >= k] <= E[max] (1 - k),
// with vacuous k skipped; also evaluates the stronger sufficient condition
// that the conditional total value along rays is non-increasing in the ratio.
TwoOptionCondition two_option_optimality_condition(
    const ValueModel& model, const TwoGoodOptions& opts = {});

}  // namespace fairdiv
