#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/ceei.hpp"
#include "fairdiv/linalg.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv {

enum class SwitchMethod { geometric, finite_difference };

struct ShadowOptions {
  IntegrationMode mode = IntegrationMode::auto_pick;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 90210;
  // geometric for N <= 3, finite differences beyond
  bool method_forced = false;
  SwitchMethod method = SwitchMethod::geometric;
  double fd_rel_step = 1e-3;
};

struct ShadowCostReport {
  std::vector<double> M;  // region masses
  std::vector<double> A;  // region moments of theta_i * lambda
  Matrix T;               // switching densities, scaled surface convention
  Matrix J;
  std::vector<double> c;       // J^-1 A, matches the reported T convention
  std::vector<double> c_flow;  // from the flow-convention T; balances the
                               // certificate measures identically
  double diag_dominance_margin = 0.0;  // min_i M_i / q_i of the transformed
                                       // system
  double condition_number = 0.0;
  bool positivity_verified = false;
  std::string method_tag;
};

// M_i = G(Gamma_i), A_i = integral over Gamma_i of theta_i lambda dG
std::pair<std::vector<double>, std::vector<double>> region_moments(
    const RenormalizedModel& model, std::span<const double> q,
    const ShadowOptions& opts = {});

// Off-diagonal T_ij. For two goods the returned values carry a sqrt(2)
// factor relative to the boundary mass-flow rate -dM_j/dq_i, matching the
// printed closed forms; for three or more goods the two conventions
// coincide. geometric supports N in {2, 3}; finite_difference re-solves
// region masses at perturbed quantities with common random numbers.
Matrix switching_densities(const RenormalizedModel& model,
                           std::span<const double> q, SwitchMethod method,
                           const ShadowOptions& opts = {});

// J_ii = M_i + q_i sum_j T_ij,  J_ij = -q_j T_ij
Matrix assemble_J(const std::vector<double>& M, const Matrix& T,
                  std::span<const double> q);

// Solves J c = A and computes the positivity certificate inputs: with
// column j of J divided by q_j the system is strictly row diagonally
// dominant with margin min_i M_i / q_i, which makes it an M-matrix and
// forces c > 0 whenever A > 0.
std::vector<double> solve_shadow_costs(const Matrix& J,
                                       const std::vector<double>& A,
                                       std::span<const double> q,
                                       double* diag_dominance_margin = nullptr,
                                       double* condition_number = nullptr);

// Full pipeline at a given CEEI quantity vector.
ShadowCostReport shadow_costs(const RenormalizedModel& model,
                              std::span<const double> q,
                              const ShadowOptions& opts = {});

}  // namespace fairdiv
