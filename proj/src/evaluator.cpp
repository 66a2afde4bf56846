#include "fairdiv/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairdiv/quadrature.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void check_supplies(const std::vector<double>& s, int n) {
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("supply vector has wrong dimension");
  for (double v : s)
    if (!(v > 0.0)) throw std::domain_error("supplies must be strictly positive");
}

double mean_and_se(const std::vector<double>& xs, double* se) {
  Kahan acc;
  for (double x : xs) acc.add(x);
  double mean = acc.value() / static_cast<double>(xs.size());
  if (se) {
    Kahan sq;
    for (double x : xs) sq.add((x - mean) * (x - mean));
    double var = sq.value() / static_cast<double>(xs.size() - 1);
    *se = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return mean;
}

}  // namespace

std::size_t best_response(const Menu& menu, const std::vector<double>& theta) {
  if (menu.bundles.empty()) throw std::invalid_argument("empty menu");
  std::size_t best = 0;
  double best_u = dot(theta, menu.bundles[0]);
  for (std::size_t k = 1; k < menu.bundles.size(); ++k) {
    double u = dot(theta, menu.bundles[k]);
    if (u > best_u) {
      best_u = u;
      best = k;
    }
  }
  return best;
}

std::size_t best_response(const Menu& menu, const SimplexPoint& theta) {
  return best_response(menu, theta.coords);
}

AllocationRule menu_rule(const Menu& menu) {
  return [menu](const SimplexPoint& theta) {
    return menu.bundles[best_response(menu, theta)];
  };
}

WelfareReport simulate(const ValueModel& model, const Menu& menu,
                       const std::vector<double>& supplies,
                       const EvalOptions& opts) {
  const int n = model.n_goods();
  if (menu.n_goods() != n)
    throw std::invalid_argument("menu dimension does not match the model");
  check_supplies(supplies, n);

  RenormalizedModel rm(model);
  const std::size_t samples = std::max<std::size_t>(opts.mc_samples, 1000);
  auto values = model.sample_values(samples, opts.seed);

  std::vector<double> w_v(samples), w_t;
  w_t.reserve(samples);
  std::vector<Kahan> demand_acc(static_cast<size_t>(n));
  std::vector<Kahan> demand_sq(static_cast<size_t>(n));
  std::vector<std::size_t> picks(menu.bundles.size(), 0);
  std::vector<double> theta(static_cast<size_t>(n));

  bool theta_ok = true;
  for (std::size_t i = 0; i < samples; ++i) {
    const double* v = &values[i * static_cast<size_t>(n)];
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += v[j];
    for (int j = 0; j < n; ++j)
      theta[static_cast<size_t>(j)] = sum > 0.0 ? v[j] / sum : 1.0 / n;
    std::size_t k = best_response(menu, theta);
    ++picks[k];
    const auto& bundle = menu.bundles[k];
    w_v[i] = dot(std::span<const double>(v, static_cast<size_t>(n)), bundle);
    for (int j = 0; j < n; ++j) {
      demand_acc[static_cast<size_t>(j)].add(bundle[static_cast<size_t>(j)]);
      demand_sq[static_cast<size_t>(j)].add(bundle[static_cast<size_t>(j)] *
                                            bundle[static_cast<size_t>(j)]);
    }
    if (theta_ok) {
      // conditional-mean estimator of the same welfare integral: weight the
      // chosen utility by lambda(theta) instead of the realized total
      SimplexPoint sp(theta);
      if (rm.g_density(sp) > 0.0) {
        double u = dot(theta, bundle);
        w_t.push_back(rm.lambda_weight(sp) * u);
      } else {
        theta_ok = false;
      }
    }
  }

  WelfareReport report;
  report.samples = samples;
  report.welfare_v_space = mean_and_se(w_v, &report.welfare_v_se);
  report.theta_space_available = theta_ok && w_t.size() == samples;
  if (report.theta_space_available)
    report.welfare_theta_space = mean_and_se(w_t, &report.welfare_theta_se);
  report.demand.resize(static_cast<size_t>(n));
  report.demand_se.resize(static_cast<size_t>(n));
  report.supply_slack.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    double mean = demand_acc[static_cast<size_t>(j)].value() /
                  static_cast<double>(samples);
    double ex2 = demand_sq[static_cast<size_t>(j)].value() /
                 static_cast<double>(samples);
    double var = std::max(ex2 - mean * mean, 0.0);
    report.demand[static_cast<size_t>(j)] = mean;
    report.demand_se[static_cast<size_t>(j)] =
        std::sqrt(var / static_cast<double>(samples));
    report.supply_slack[static_cast<size_t>(j)] =
        supplies[static_cast<size_t>(j)] - mean;
  }
  report.choice_shares.resize(menu.bundles.size());
  for (std::size_t k = 0; k < menu.bundles.size(); ++k)
    report.choice_shares[k] =
        static_cast<double>(picks[k]) / static_cast<double>(samples);
  return report;
}

RatioMonotonicityReport check_ratio_monotonicity(const ValueModel& model,
                                                 const AllocationRule& rule,
                                                 std::size_t n_pairs,
                                                 std::uint64_t seed,
                                                 double tol) {
  const int n = model.n_goods();
  RatioMonotonicityReport report;
  report.pairs_sampled = n_pairs;
  auto values = model.sample_values(2 * n_pairs, seed);

  auto theta_at = [&](std::size_t row) {
    std::vector<double> th(static_cast<size_t>(n));
    const double* v = &values[row * static_cast<size_t>(n)];
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += v[j];
    for (int j = 0; j < n; ++j)
      th[static_cast<size_t>(j)] = sum > 0.0 ? v[j] / sum : 1.0 / n;
    return th;
  };

  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n_pairs; ++p) {
    auto ta = theta_at(2 * p);
    auto tb = theta_at(2 * p + 1);
    double ua = dot(ta, rule(SimplexPoint(ta)));
    double ub = dot(tb, rule(SimplexPoint(tb)));
    for (int i = 0; i < n; ++i) {
      auto check = [&](const std::vector<double>& near_t, double u_near,
                       const std::vector<double>& far_t, double u_far) {
        double ni = near_t[static_cast<size_t>(i)];
        double fi = far_t[static_cast<size_t>(i)];
        if (!(ni > 0.0) || !(fi > 0.0)) return;
        for (int k = 0; k < n; ++k) {
          if (k == i) continue;
          if (near_t[static_cast<size_t>(k)] / ni >
              far_t[static_cast<size_t>(k)] / fi)
            return;  // not ordered toward vertex i
        }
        ++report.comparisons;
        double margin = u_far / fi - u_near / ni;
        if (margin < min_margin) min_margin = margin;
        if (margin < -tol && report.violations.size() < 100) {
          RatioViolation v;
          v.theta_near = near_t;
          v.theta_far = far_t;
          v.good_index = i;
          v.deficit = margin;
          report.violations.push_back(std::move(v));
        }
      };
      check(ta, ua, tb, ub);
      check(tb, ub, ta, ua);
    }
  }
  report.max_deficit =
      report.comparisons > 0 && min_margin < 0.0 ? min_margin : 0.0;
  return report;
}

namespace {

LotteryResult run_lottery(
    const std::function<std::vector<double>(const std::vector<double>&)>&
        masses_at,
    const std::vector<double>& supplies, const EvalOptions& opts,
    double granularity) {
  const int n = static_cast<int>(supplies.size());
  LotteryResult result;
  std::vector<double> q(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    q[static_cast<size_t>(i)] = n * supplies[static_cast<size_t>(i)];

  const double alpha = opts.lottery_alpha;
  int it = 0;
  bool converged = false;
  std::vector<double> m;
  for (; it < opts.lottery_max_iters; ++it) {
    m = masses_at(q);
    // empirical masses move in steps of the sample weight, so the iterate
    // hovers within that granularity; stop once changes reach it
    double tol_eff = opts.lottery_tol;
    if (granularity > 0.0) {
      double min_m = std::numeric_limits<double>::infinity();
      for (double mi : m) min_m = std::min(min_m, std::max(mi, granularity));
      tol_eff = std::max(tol_eff, alpha * 4.0 * granularity / min_m);
    }
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      double mi = m[static_cast<size_t>(i)];
      // empty region: the best-response target diverges; cap it so the
      // damped step stays finite
      double target = mi > 0.0 ? supplies[static_cast<size_t>(i)] / mi
                               : 10.0 * q[static_cast<size_t>(i)];
      target = std::min(target, 10.0 * q[static_cast<size_t>(i)]);
      double next = (1.0 - alpha) * q[static_cast<size_t>(i)] + alpha * target;
      if (!std::isfinite(next))
        throw std::runtime_error(
            "lottery iteration diverged (non-finite quantities); try a "
            "smaller lottery_alpha");
      max_change = std::max(max_change,
                            std::abs(next - q[static_cast<size_t>(i)]) /
                                q[static_cast<size_t>(i)]);
      q[static_cast<size_t>(i)] = next;
    }
    if (max_change <= tol_eff) {
      converged = true;
      ++it;
      break;
    }
  }
  m = masses_at(q);
  double resid = 0.0;
  for (int i = 0; i < n; ++i)
    resid = std::max(resid, std::abs(q[static_cast<size_t>(i)] *
                                         m[static_cast<size_t>(i)] -
                                     supplies[static_cast<size_t>(i)]) /
                                supplies[static_cast<size_t>(i)]);
  result.q = q;
  result.masses = m;
  result.iterations = it;
  result.converged = converged;
  result.residual = resid;
  if (!converged)
    throw std::runtime_error(
        "lottery iteration did not converge after " +
        std::to_string(opts.lottery_max_iters) +
        " iterations (last relative step above tolerance); try a smaller "
        "lottery_alpha");
  result.detail = "converged in " + std::to_string(it) + " iterations";
  return result;
}

}  // namespace

LotteryResult lottery_fixed_point(const ValueModel& model,
                                  const std::vector<double>& supplies,
                                  const EvalOptions& opts) {
  const int n = model.n_goods();
  check_supplies(supplies, n);
  bool quad = false;
  switch (opts.mode) {
    case IntegrationMode::quadrature:
      if (n != 2)
        throw std::invalid_argument(
            "quadrature integration is only available for two goods");
      quad = true;
      break;
    case IntegrationMode::mc:
      quad = false;
      break;
    case IntegrationMode::auto_pick:
      quad = n == 2;
      break;
  }

  if (quad) {
    RenormalizedModel rm(model);
    auto masses_at = [&rm](const std::vector<double>& q) {
      double t0 = q[1] / (q[0] + q[1]);
      std::vector<double> m(2);
      m[0] = rm.g_mass(t0, 1.0);
      m[1] = rm.g_mass(0.0, t0);
      return m;
    };
    return run_lottery(masses_at, supplies, opts, 0.0);
  }

  const std::size_t samples = std::max<std::size_t>(opts.mc_samples, 1000);
  auto values = model.sample_values(samples, opts.seed);
  std::vector<double> thetas(values.size());
  for (std::size_t i = 0; i < samples; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      sum += values[i * static_cast<size_t>(n) + static_cast<size_t>(j)];
    for (int j = 0; j < n; ++j)
      thetas[i * static_cast<size_t>(n) + static_cast<size_t>(j)] =
          sum > 0.0
              ? values[i * static_cast<size_t>(n) + static_cast<size_t>(j)] /
                    sum
              : 1.0 / n;
  }
  auto masses_at = [&thetas, samples, n](const std::vector<double>& q) {
    std::vector<std::size_t> counts(static_cast<size_t>(n), 0);
    for (std::size_t i = 0; i < samples; ++i) {
      const double* th = &thetas[i * static_cast<size_t>(n)];
      int best = 0;
      double best_v = th[0] * q[0];
      for (int j = 1; j < n; ++j) {
        double v = th[j] * q[static_cast<size_t>(j)];
        if (v > best_v) {
          best_v = v;
          best = j;
        }
      }
      ++counts[static_cast<size_t>(best)];
    }
    std::vector<double> m(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
      m[static_cast<size_t>(j)] =
          static_cast<double>(counts[static_cast<size_t>(j)]) /
          static_cast<double>(samples);
    return m;
  };
  return run_lottery(masses_at, supplies, opts,
                     1.0 / static_cast<double>(samples));
}

LotteryResult lottery_fixed_point_from_types(
    const std::vector<std::vector<double>>& types,
    const std::vector<double>& supplies, const EvalOptions& opts) {
  if (types.empty()) throw std::invalid_argument("empty type population");
  const int n = static_cast<int>(supplies.size());
  check_supplies(supplies, n);
  std::vector<double> thetas;
  thetas.reserve(types.size() * static_cast<size_t>(n));
  for (const auto& t : types) {
    if (static_cast<int>(t.size()) != n)
      throw std::invalid_argument("type dimension does not match supplies");
    double sum = 0.0;
    for (double v : t) sum += v;
    if (!(sum > 0.0))
      throw std::domain_error("renormalization undefined at origin");
    for (double v : t) thetas.push_back(v / sum);
  }
  const std::size_t count = types.size();
  auto masses_at = [&thetas, count, n](const std::vector<double>& q) {
    std::vector<double> m(static_cast<size_t>(n), 0.0);
    const double weight = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double* th = &thetas[i * static_cast<size_t>(n)];
      double best_v = 0.0;
      for (int j = 0; j < n; ++j)
        best_v = std::max(best_v, th[j] * q[static_cast<size_t>(j)]);
      // exact ties split proportionally to current q
      double q_tied = 0.0;
      for (int j = 0; j < n; ++j)
        if (th[j] * q[static_cast<size_t>(j)] >= best_v * (1.0 - 1e-12))
          q_tied += q[static_cast<size_t>(j)];
      for (int j = 0; j < n; ++j)
        if (th[j] * q[static_cast<size_t>(j)] >= best_v * (1.0 - 1e-12))
          m[static_cast<size_t>(j)] += weight * q[static_cast<size_t>(j)] /
                                       q_tied;
    }
    return m;
  };
  // explicit populations are exact: no sampling-noise floor on the stopping
  // rule; a genuine limit cycle should surface as the diagnostic error
  return run_lottery(masses_at, supplies, opts, 0.0);
}

UnitDemandSlack unit_demand_slack(const Menu& menu) {
  UnitDemandSlack slack;
  for (const auto& bundle : menu.bundles) {
    double total = 0.0;
    for (double x : bundle) total += x;
    slack.max_bundle_mass = std::max(slack.max_bundle_mass, total);
  }
  slack.interpretable = slack.max_bundle_mass < 1.0;
  return slack;
}

}  // namespace fairdiv
