#include "fairdiv/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairdiv/quadrature.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

void check_quantities(std::span<const double> q, int n) {
  if (static_cast<int>(q.size()) != n)
    throw std::invalid_argument("quantity vector has wrong dimension");
  for (double v : q)
    if (!(v > 0.0)) throw std::domain_error("quantities must be strictly positive");
}

bool use_quadrature(const RenormalizedModel& model, IntegrationMode mode) {
  switch (mode) {
    case IntegrationMode::quadrature:
      if (model.n_goods() != 2)
        throw std::invalid_argument(
            "quadrature integration is only available for two goods");
      return true;
    case IntegrationMode::mc:
      return false;
    case IntegrationMode::auto_pick:
      return model.n_goods() == 2;
  }
  return false;
}

double report_scale(int n) { return n == 2 ? std::sqrt(2.0) : 1.0; }

// winning region at normalized values, lowest index on ties
int winner(const double* theta, std::span<const double> q, int n) {
  int best = 0;
  double best_v = theta[0] * q[0];
  for (int j = 1; j < n; ++j) {
    double v = theta[static_cast<size_t>(j)] * q[static_cast<size_t>(j)];
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

struct SampleSet {
  std::vector<double> thetas;  // row-major n_samples x N
  std::vector<double> sums;    // raw value totals per draw
  std::size_t n_samples = 0;
  int n = 0;

  static SampleSet make(const RenormalizedModel& model, std::size_t n_samples,
                        std::uint64_t seed) {
    SampleSet set;
    set.n = model.n_goods();
    set.n_samples = std::max<std::size_t>(n_samples, 2);
    auto values = model.base().sample_values(set.n_samples, seed);
    set.thetas.resize(values.size());
    set.sums.resize(set.n_samples);
    for (std::size_t i = 0; i < set.n_samples; ++i) {
      double sum = 0.0;
      for (int j = 0; j < set.n; ++j)
        sum += values[i * static_cast<size_t>(set.n) + static_cast<size_t>(j)];
      set.sums[i] = sum;
      for (int j = 0; j < set.n; ++j)
        set.thetas[i * static_cast<size_t>(set.n) + static_cast<size_t>(j)] =
            sum > 0.0 ? values[i * static_cast<size_t>(set.n) +
                               static_cast<size_t>(j)] /
                            sum
                      : 1.0 / set.n;
    }
    return set;
  }

  std::vector<double> masses(std::span<const double> q) const {
    std::vector<std::size_t> counts(static_cast<size_t>(n), 0);
    for (std::size_t i = 0; i < n_samples; ++i)
      ++counts[static_cast<size_t>(
          winner(&thetas[i * static_cast<size_t>(n)], q, n))];
    std::vector<double> m(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
      m[static_cast<size_t>(j)] =
          static_cast<double>(counts[static_cast<size_t>(j)]) /
          static_cast<double>(n_samples);
    return m;
  }
};

}  // namespace

std::pair<std::vector<double>, std::vector<double>> region_moments(
    const RenormalizedModel& model, std::span<const double> q,
    const ShadowOptions& opts) {
  const int n = model.n_goods();
  check_quantities(q, n);
  std::vector<double> m(static_cast<size_t>(n), 0.0);
  std::vector<double> a(static_cast<size_t>(n), 0.0);
  if (use_quadrature(model, opts.mode)) {
    const double t0 = q[1] / (q[0] + q[1]);
    auto g = [&](double t) { return model.g_t(t); };
    auto a1 = [&](double t) { return t * model.lambda_t(t) * model.g_t(t); };
    auto a2 = [&](double t) {
      return (1.0 - t) * model.lambda_t(t) * model.g_t(t);
    };
    m[0] = gl_integrate_pieces(g, make_panels(t0, 1.0, model.t_breaks()), 64)
               .value;
    m[1] = gl_integrate_pieces(g, make_panels(0.0, t0, model.t_breaks()), 64)
               .value;
    a[0] = gl_integrate_pieces(a1, make_panels(t0, 1.0, model.t_breaks()), 64)
               .value;
    a[1] = gl_integrate_pieces(a2, make_panels(0.0, t0, model.t_breaks()), 64)
               .value;
    return {m, a};
  }
  auto set = SampleSet::make(model, opts.mc_samples, opts.seed);
  std::vector<Kahan> macc(static_cast<size_t>(n));
  std::vector<Kahan> aacc(static_cast<size_t>(n));
  for (std::size_t i = 0; i < set.n_samples; ++i) {
    const double* th = &set.thetas[i * static_cast<size_t>(n)];
    int w = winner(th, q, n);
    macc[static_cast<size_t>(w)].add(1.0);
    // lambda(theta) integrates against theta_i as E[theta_i * total value]
    aacc[static_cast<size_t>(w)].add(th[w] * set.sums[i]);
  }
  for (int j = 0; j < n; ++j) {
    m[static_cast<size_t>(j)] = macc[static_cast<size_t>(j)].value() /
                                static_cast<double>(set.n_samples);
    a[static_cast<size_t>(j)] = aacc[static_cast<size_t>(j)].value() /
                                static_cast<double>(set.n_samples);
  }
  return {m, a};
}

Matrix switching_densities(const RenormalizedModel& model,
                           std::span<const double> q, SwitchMethod method,
                           const ShadowOptions& opts) {
  const int n = model.n_goods();
  check_quantities(q, n);
  Matrix t_flow(n);
  if (method == SwitchMethod::geometric) {
    if (n > 3)
      throw std::invalid_argument("geometric method requires N <= 3");
    if (n == 2) {
      const double t0 = q[1] / (q[0] + q[1]);
      const double g0 = model.g_t(t0);
      t_flow(0, 1) = g0 * t0 * t0 / q[1];
      t_flow(1, 0) = g0 * (1.0 - t0) * (1.0 - t0) / q[0];
    } else {
      // boundary segment between regions i and j, parameterized by the
      // third coordinate; the normal velocity of the boundary under dq_i
      // integrates g along the segment
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (i == j) continue;
          int k = 3 - i - j;
          const double qi = q[static_cast<size_t>(i)];
          const double qj = q[static_cast<size_t>(j)];
          const double qk = q[static_cast<size_t>(k)];
          const double kappa = qi * qj / (qi * qj + qk * (qi + qj));
          auto integrand = [&](double tk) {
            std::vector<double> th(3);
            th[static_cast<size_t>(i)] = (1.0 - tk) * qj / (qi + qj);
            th[static_cast<size_t>(j)] = (1.0 - tk) * qi / (qi + qj);
            th[static_cast<size_t>(k)] = tk;
            double g = model.g_density(SimplexPoint(th));
            return g * (1.0 - tk) * qj / ((qi + qj) * (qi + qj));
          };
          t_flow(i, j) =
              gl_integrate_pieces(integrand, make_panels(0.0, kappa, {}), 64)
                  .value;
        }
    }
  } else {
    // central differences of region masses with common random numbers
    const bool quad = use_quadrature(model, opts.mode);
    SampleSet set;
    if (!quad) set = SampleSet::make(model, opts.mc_samples, opts.seed);
    auto masses_at = [&](std::span<const double> qq) -> std::vector<double> {
      if (!quad) return set.masses(qq);
      const double t0 = qq[1] / (qq[0] + qq[1]);
      auto g = [&](double t) { return model.g_t(t); };
      std::vector<double> m(2);
      m[0] = gl_integrate_pieces(g, make_panels(t0, 1.0, model.t_breaks()), 64)
                 .value;
      m[1] = gl_integrate_pieces(g, make_panels(0.0, t0, model.t_breaks()), 64)
                 .value;
      return m;
    };
    std::vector<double> qv(q.begin(), q.end());
    for (int i = 0; i < n; ++i) {
      const double delta = opts.fd_rel_step * qv[static_cast<size_t>(i)];
      auto qp = qv, qm = qv;
      qp[static_cast<size_t>(i)] += delta;
      qm[static_cast<size_t>(i)] -= delta;
      auto mp = masses_at(qp);
      auto mm = masses_at(qm);
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double d = -(mp[static_cast<size_t>(j)] - mm[static_cast<size_t>(j)]) /
                   (2.0 * delta);
        t_flow(i, j) = std::max(d, 0.0);
      }
    }
  }
  const double scale = report_scale(n);
  if (scale != 1.0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t_flow(i, j) *= scale;
  return t_flow;
}

Matrix assemble_J(const std::vector<double>& M, const Matrix& T,
                  std::span<const double> q) {
  const int n = static_cast<int>(M.size());
  if (T.n != n || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("assemble_J: dimension mismatch");
  Matrix j(n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      row += T(i, k);
      j(i, k) = -q[static_cast<size_t>(k)] * T(i, k);
    }
    j(i, i) = M[static_cast<size_t>(i)] + q[static_cast<size_t>(i)] * row;
  }
  return j;
}

std::vector<double> solve_shadow_costs(const Matrix& J,
                                       const std::vector<double>& A,
                                       std::span<const double> q,
                                       double* diag_dominance_margin,
                                       double* condition_number) {
  const int n = J.n;
  if (static_cast<int>(A.size()) != n || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("solve_shadow_costs: dimension mismatch");
  auto c = solve_linear(J, A);
  if (diag_dominance_margin) {
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double row = J(i, i) / q[static_cast<size_t>(i)];
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        row -= std::abs(J(i, j)) / q[static_cast<size_t>(j)];
      }
      margin = std::min(margin, row);
    }
    *diag_dominance_margin = margin;
  }
  if (condition_number) *condition_number = condition_number_1(J);
  return c;
}

ShadowCostReport shadow_costs(const RenormalizedModel& model,
                              std::span<const double> q,
                              const ShadowOptions& opts) {
  const int n = model.n_goods();
  check_quantities(q, n);
  ShadowCostReport report;
  auto [m, a] = region_moments(model, q, opts);
  report.M = m;
  report.A = a;
  SwitchMethod method = opts.method_forced
                            ? opts.method
                            : (n <= 3 ? SwitchMethod::geometric
                                      : SwitchMethod::finite_difference);
  report.method_tag = method == SwitchMethod::geometric ? "geometric"
                                                        : "finite_difference";
  report.T = switching_densities(model, q, method, opts);
  report.J = assemble_J(report.M, report.T, q);
  report.c = solve_shadow_costs(report.J, report.A, q,
                                &report.diag_dominance_margin,
                                &report.condition_number);
  const double scale = report_scale(n);
  if (scale != 1.0) {
    Matrix t_flow = report.T;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t_flow(i, j) /= scale;
    report.c_flow = solve_shadow_costs(assemble_J(report.M, t_flow, q),
                                       report.A, q);
  } else {
    report.c_flow = report.c;
  }
  bool positive = report.diag_dominance_margin > 0.0;
  for (double v : report.c)
    if (!(v > 0.0)) positive = false;
  report.positivity_verified = positive;
  return report;
}

}  // namespace fairdiv
