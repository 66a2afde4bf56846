#include "fairdiv/ceei.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "fairdiv/linalg.hpp"
#include "fairdiv/quadrature.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

void check_supplies(std::span<const double> s, int n) {
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("supply vector has wrong dimension");
  for (double v : s)
    if (!(v > 0.0)) throw std::domain_error("supplies must be strictly positive");
}

bool resolve_quadrature(const RenormalizedModel& model, IntegrationMode mode) {
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

// One solve's integration backend: the exact two-good reduction in
// t = theta_1, or a fixed sample set reused for every y (so the surrogate
// objective is deterministic and line searches are meaningful).
struct Backend {
  const RenormalizedModel* model = nullptr;
  int n = 0;
  bool quad = false;
  std::vector<double> log_thetas;  // row-major, MC path
  std::size_t samples = 0;

  static Backend make(const RenormalizedModel& model, const CeeiOptions& opts) {
    Backend b;
    b.model = &model;
    b.n = model.n_goods();
    b.quad = resolve_quadrature(model, opts.mode);
    if (!b.quad) {
      b.samples = std::max<std::size_t>(opts.mc_samples, 2);
      auto values = model.base().sample_values(b.samples, opts.seed);
      b.log_thetas.resize(values.size());
      for (std::size_t i = 0; i < b.samples; ++i) {
        double sum = 0.0;
        for (int j = 0; j < b.n; ++j)
          sum += values[i * static_cast<size_t>(b.n) + static_cast<size_t>(j)];
        for (int j = 0; j < b.n; ++j) {
          double th =
              sum > 0.0
                  ? values[i * static_cast<size_t>(b.n) +
                           static_cast<size_t>(j)] /
                        sum
                  : 1.0 / b.n;
          b.log_thetas[i * static_cast<size_t>(b.n) + static_cast<size_t>(j)] =
              std::log(std::max(th, 1e-300));
        }
      }
    }
    return b;
  }

  double psi(std::span<const double> y, std::span<const double> s,
             double* err = nullptr) const {
    double supply_term = 0.0;
    for (int j = 0; j < n; ++j)
      supply_term += s[static_cast<size_t>(j)] * std::exp(y[static_cast<size_t>(j)]);
    if (quad) {
      double ts = 1.0 / (1.0 + std::exp(y[1] - y[0]));
      auto upper = [&](double t) { return (std::log(t) - y[0]) * model->g_t(t); };
      auto lower = [&](double t) {
        return (std::log(1.0 - t) - y[1]) * model->g_t(t);
      };
      auto pa = make_panels(ts, 1.0, model->t_breaks());
      auto pb = make_panels(0.0, ts, model->t_breaks());
      auto ia = gl_integrate_pieces(upper, pa, 64);
      auto ib = gl_integrate_pieces(lower, pb, 64);
      if (err) *err = ia.error + ib.error;
      return ia.value + ib.value + supply_term;
    }
    Kahan acc;
    for (std::size_t i = 0; i < samples; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        best = std::max(best,
                        log_thetas[i * static_cast<size_t>(n) +
                                   static_cast<size_t>(j)] -
                            y[static_cast<size_t>(j)]);
      acc.add(best);
    }
    if (err) *err = 1.0 / std::sqrt(static_cast<double>(samples));
    return acc.value() / static_cast<double>(samples) + supply_term;
  }

  // region masses m_i(y)
  std::vector<double> masses(std::span<const double> y,
                             double* err = nullptr) const {
    std::vector<double> m(static_cast<size_t>(n), 0.0);
    if (quad) {
      double ts = 1.0 / (1.0 + std::exp(y[1] - y[0]));
      auto g = [&](double t) { return model->g_t(t); };
      auto ia = gl_integrate_pieces(g, make_panels(ts, 1.0, model->t_breaks()), 64);
      auto ib = gl_integrate_pieces(g, make_panels(0.0, ts, model->t_breaks()), 64);
      m[0] = ia.value;
      m[1] = ib.value;
      if (err) *err = ia.error + ib.error;
      return m;
    }
    std::vector<std::size_t> counts(static_cast<size_t>(n), 0);
    for (std::size_t i = 0; i < samples; ++i) {
      int best = 0;
      double best_v = log_thetas[i * static_cast<size_t>(n)] - y[0];
      for (int j = 1; j < n; ++j) {
        double v = log_thetas[i * static_cast<size_t>(n) +
                              static_cast<size_t>(j)] -
                   y[static_cast<size_t>(j)];
        if (v > best_v) {
          best_v = v;
          best = j;
        }
      }
      ++counts[static_cast<size_t>(best)];
    }
    for (int j = 0; j < n; ++j)
      m[static_cast<size_t>(j)] =
          static_cast<double>(counts[static_cast<size_t>(j)]) /
          static_cast<double>(samples);
    if (err) *err = 1.0 / std::sqrt(static_cast<double>(samples));
    return m;
  }

  std::vector<double> gradient(std::span<const double> y,
                               std::span<const double> s,
                               double* err = nullptr) const {
    auto m = masses(y, err);
    std::vector<double> g(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
      g[static_cast<size_t>(j)] =
          -m[static_cast<size_t>(j)] +
          s[static_cast<size_t>(j)] * std::exp(y[static_cast<size_t>(j)]);
    return g;
  }
};

double inf_norm(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

double potential(const RenormalizedModel& model, std::span<const double> s,
                 std::span<const double> y, const CeeiOptions& opts) {
  check_supplies(s, model.n_goods());
  auto backend = Backend::make(model, opts);
  return backend.psi(y, s);
}

std::vector<double> potential_gradient(const RenormalizedModel& model,
                                       std::span<const double> s,
                                       std::span<const double> y,
                                       const CeeiOptions& opts) {
  check_supplies(s, model.n_goods());
  auto backend = Backend::make(model, opts);
  return backend.gradient(y, s);
}

CeeiSolution solve_ceei(const RenormalizedModel& model,
                        std::span<const double> s, const CeeiOptions& opts) {
  const int n = model.n_goods();
  check_supplies(s, n);
  auto backend = Backend::make(model, opts);
  const double tol =
      backend.quad ? opts.tol_grad_quadrature : opts.tol_grad_mc;

  std::vector<double> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    y[static_cast<size_t>(i)] = -std::log(n * s[static_cast<size_t>(i)]);

  double integ_err = 0.0;
  double psi_y = backend.psi(y, s, &integ_err);
  std::vector<double> grad = backend.gradient(y, s);
  int it = 0;
  bool grad_ok = inf_norm(grad) <= tol;

  for (; it < opts.max_iters && !grad_ok; ++it) {
    std::vector<double> d;
    bool have_newton = false;
    if (backend.quad) {
      // finite-difference Hessian of Psi from gradient stencils
      Matrix h(n);
      for (int j = 0; j < n; ++j) {
        double delta = 1e-4 * std::max(1.0, std::abs(y[static_cast<size_t>(j)]));
        auto yp = y, ym = y;
        yp[static_cast<size_t>(j)] += delta;
        ym[static_cast<size_t>(j)] -= delta;
        auto gp = backend.gradient(yp, s);
        auto gm = backend.gradient(ym, s);
        for (int i = 0; i < n; ++i)
          h(i, j) = (gp[static_cast<size_t>(i)] - gm[static_cast<size_t>(i)]) /
                    (2.0 * delta);
      }
      try {
        auto step = solve_linear(h, grad);
        d.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
          d[static_cast<size_t>(i)] = -step[static_cast<size_t>(i)];
        have_newton = true;
      } catch (const SingularMatrixError&) {
        have_newton = false;
      }
    } else {
      // mirror step toward the clearing fixed point y_i = log(m_i / s_i);
      // always a descent direction for the convex sample objective
      auto m = backend.masses(y);
      double floor = 0.1 / static_cast<double>(backend.samples);
      d.resize(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        d[static_cast<size_t>(i)] =
            std::log(std::max(m[static_cast<size_t>(i)], floor) /
                     s[static_cast<size_t>(i)]) -
            y[static_cast<size_t>(i)];
      have_newton = true;
    }
    if (!have_newton || dot(grad, d) >= 0.0) {
      d.resize(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        d[static_cast<size_t>(i)] = -grad[static_cast<size_t>(i)];
    }

    const double slope = dot(grad, d);
    double alpha = 1.0;
    bool stepped = false;
    while (alpha > 1e-10) {
      auto trial = y;
      for (int i = 0; i < n; ++i)
        trial[static_cast<size_t>(i)] += alpha * d[static_cast<size_t>(i)];
      double psi_trial = backend.psi(trial, s);
      if (psi_trial <= psi_y + 1e-4 * alpha * slope) {
        y = std::move(trial);
        psi_y = psi_trial;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) break;  // line search exhausted; gradient stalls
    grad = backend.gradient(y, s);
    grad_ok = inf_norm(grad) <= tol;
  }

  auto m = backend.masses(y, &integ_err);
  CeeiSolution sol;
  sol.y = y;
  sol.p.resize(static_cast<size_t>(n));
  sol.q.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    sol.p[static_cast<size_t>(i)] = std::exp(y[static_cast<size_t>(i)]);
    sol.q[static_cast<size_t>(i)] = std::exp(-y[static_cast<size_t>(i)]);
  }
  double psum = 0.0;
  for (double p : sol.p) psum += p;
  std::vector<double> th0(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    th0[static_cast<size_t>(i)] = sol.p[static_cast<size_t>(i)] / psum;
  sol.theta0 = SimplexPoint(std::move(th0));
  sol.region_masses = m;
  double resid = 0.0;
  for (int i = 0; i < n; ++i)
    resid = std::max(resid,
                     std::abs(sol.q[static_cast<size_t>(i)] *
                                  m[static_cast<size_t>(i)] -
                              s[static_cast<size_t>(i)]) /
                         s[static_cast<size_t>(i)]);
  sol.clearing_residual = resid;
  sol.iterations = it;
  sol.gradient_norm = inf_norm(grad);
  sol.integration_error_estimate = integ_err;
  sol.converged = grad_ok && resid <= opts.tol_clear;
  if (!sol.converged)
    throw SolverError(
        "CEEI solver did not converge: gradient_norm=" +
            std::to_string(sol.gradient_norm) +
            ", clearing_residual=" + std::to_string(resid),
        sol);
  return sol;
}

int region_of(const SimplexPoint& theta, std::span<const double> q) {
  if (theta.size() != static_cast<int>(q.size()))
    throw std::invalid_argument("region_of: dimension mismatch");
  int best = 0;
  double best_v = theta[0] * q[0];
  for (int i = 1; i < theta.size(); ++i) {
    double v = theta[i] * q[static_cast<size_t>(i)];
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

Menu ceei_menu(const CeeiSolution& sol) {
  Menu menu;
  const int n = static_cast<int>(sol.q.size());
  for (int i = 0; i < n; ++i) {
    std::vector<double> bundle(static_cast<size_t>(n), 0.0);
    bundle[static_cast<size_t>(i)] = sol.q[static_cast<size_t>(i)];
    menu.bundles.push_back(std::move(bundle));
    menu.labels.push_back("pure good " + std::to_string(i + 1));
  }
  return menu;
}

}  // namespace fairdiv
