#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairdiv/evaluator_types.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv {

enum class IntegrationMode { quadrature, mc, auto_pick };

struct CeeiOptions {
  IntegrationMode mode = IntegrationMode::auto_pick;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 90210;
  double tol_grad_quadrature = 1e-8;
  double tol_grad_mc = 1e-4;
  double tol_clear = 1e-3;  // relative
  int max_iters = 200;
};

struct CeeiSolution {
  std::vector<double> y;  // log prices
  std::vector<double> p;  // prices
  std::vector<double> q;  // affordable quantities 1/p
  SimplexPoint theta0;    // type indifferent among all pure options
  std::vector<double> region_masses;
  double clearing_residual = 0.0;  // max_i |q_i m_i - s_i| / s_i
  int iterations = 0;
  double gradient_norm = 0.0;
  double integration_error_estimate = 0.0;
  bool converged = false;
};

struct SolverError : std::runtime_error {
  CeeiSolution best;
  SolverError(const std::string& msg, CeeiSolution b)
      : std::runtime_error(msg), best(std::move(b)) {}
};

// Convex market-clearing potential
//   Psi(y) = E_G[max_j (log theta_j - y_j)] + sum_j s_j e^{y_j}.
double potential(const RenormalizedModel& model, std::span<const double> s,
                 std::span<const double> y, const CeeiOptions& opts = {});

// dPsi/dy_i = -m_i(y) + s_i e^{y_i}, m_i the mass of the region where the
// pure option of good i wins (lowest index on ties).
std::vector<double> potential_gradient(const RenormalizedModel& model,
                                       std::span<const double> s,
                                       std::span<const double> y,
                                       const CeeiOptions& opts = {});

// Damped Newton (finite-difference Hessian) with backtracking on Psi,
// gradient-descent fallback. Throws SolverError carrying the best iterate on
// non-convergence; std::domain_error on non-positive supplies.
CeeiSolution solve_ceei(const RenormalizedModel& model,
                        std::span<const double> s,
                        const CeeiOptions& opts = {});

// argmax_j theta_j q_j, lowest index on ties
int region_of(const SimplexPoint& theta, std::span<const double> q);

// the N pure bundles {q_i e_i}
Menu ceei_menu(const CeeiSolution& sol);

}  // namespace fairdiv
