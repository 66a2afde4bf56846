#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/ceei.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/shadow.hpp"

namespace fairdiv {

// Signed measure on a sub-interval of [0, 1] in t = theta_1 coordinates:
// piecewise-smooth interior density plus boundary-vertex atoms.
struct SignedMeasure1D {
  int good_index = 0;  // 1 or 2
  double lo = 0.0, hi = 1.0;
  std::function<double(double)> interior_density;
  std::vector<std::pair<double, double>> atoms;  // (location, weight)
  std::vector<double> piece_breaks;

  // interior integral over [a, b] plus atoms inside
  double mass(double a, double b) const;
  double total() const { return mass(lo, hi); }
  double total_variation() const;
};

enum class CertVerdict { certified_optimal, certificate_fails, not_applicable };

std::string verdict_name(CertVerdict v);

struct CertificateReport {
  CertVerdict verdict = CertVerdict::not_applicable;
  std::string method;  // "two_good_exact" or "iid_sufficient"
  std::array<double, 2> balance_residuals{0.0, 0.0};
  std::array<double, 2> total_variation{0.0, 0.0};
  double min_tail_mass = 0.0;
  double min_tail_location = 0.0;
  int min_tail_good = 0;
  std::string detail;
};

// Builds (mu_1, mu_2) from the clearing solution and shadow costs. The
// densities evaluate through the model, so the underlying ValueModel must
// outlive the returned measures. With
// S = c_1 + c_2 and h(t) = (c_1 - c_2 + S(1 - 2t)) g~(t) / 2:
//   mu_1 on [t0, 1]: density t (lambda~ g~ + h' - S g~), atom c_2 g~(1) at 1
//   mu_2 on [0, t0]: density (1-t) (same bracket), atom c_1 g~(0) at 0
// Balance pins the atom weights; pass the flow-convention costs so the
// measures net to zero on every instance.
std::pair<SignedMeasure1D, SignedMeasure1D> build_mu_two_goods(
    const RenormalizedModel& model, const CeeiSolution& ceei,
    std::span<const double> c);

// mu(domain); magnitude is the balance residual
double measure_balance(const SignedMeasure1D& mu);

// Scans every tail [a, 1] of mu_1 and [0, a] of mu_2 on a grid refined at
// piece breaks and interior sign changes; certifies when all tails are above
// -tol_factor times the total variation.
CertificateReport dominance_check_two_goods(const SignedMeasure1D& mu1,
                                            const SignedMeasure1D& mu2,
                                            int grid_size = 2001,
                                            double tol_factor = 1e-6);

// Sufficient condition for symmetric iid models: x pdf(x) / cdf(x)
// non-increasing on (0, upper].
CertificateReport iid_ratio_condition(const Marginal& marginal,
                                      int grid_size = 2001);

struct CertifyOptions {
  IntegrationMode mode = IntegrationMode::auto_pick;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 90210;
  int tail_grid_size = 2001;
  double balance_tol_factor = 1e-6;
};

struct CertifyResult {
  CertificateReport report;
  CeeiSolution ceei;
  ShadowCostReport shadow;
};

// Dispatcher: exact two-good check when N = 2, the iid sufficient check for
// symmetric iid models otherwise, not_applicable else.
CertifyResult certify(const ValueModel& model, std::span<const double> s,
                      const CertifyOptions& opts = {});

}  // namespace fairdiv
