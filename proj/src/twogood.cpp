#include "fairdiv/twogood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fairdiv/quadrature.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

constexpr int kBatches = 100;

}  // namespace

struct TwoGoodContext::Impl {
  bool quad = false;
  double e_total = 0.0;

  // quadrature path
  std::unique_ptr<RenormalizedModel> rm;

  // mc path: sorted by theta2 ascending, suffix sums from the top
  std::size_t n = 0;
  std::vector<double> theta2;     // sorted
  std::vector<double> suffix_w;   // sum of totals w over [i, n)
  std::vector<double> suffix_tw;  // sum of theta2 * w over [i, n)
  std::vector<int> batch;         // batch id per sorted element
  std::vector<double> batch_w;    // per-batch total of w
  std::vector<std::size_t> batch_n;

  double share(double z) const {
    auto it = std::lower_bound(theta2.begin(), theta2.end(), z);
    return static_cast<double>(theta2.end() - it) / static_cast<double>(n);
  }
  double excess(double z) const {
    std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(theta2.begin(), theta2.end(), z) - theta2.begin());
    return (suffix_tw[idx] - z * suffix_w[idx]) / static_cast<double>(n);
  }
};

TwoGoodContext::TwoGoodContext(const ValueModel& model,
                               const TwoGoodOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  if (model.n_goods() != 2)
    throw std::invalid_argument("menu size analysis requires two goods");
  bool quad = false;
  switch (opts.mode) {
    case IntegrationMode::quadrature:
    case IntegrationMode::auto_pick:
      quad = true;
      break;
    case IntegrationMode::mc:
      quad = false;
      break;
  }
  impl_->quad = quad;
  if (quad) {
    impl_->rm = std::make_unique<RenormalizedModel>(model);
    impl_->e_total = model.expected_total_value();
    return;
  }
  const std::size_t n = std::max<std::size_t>(opts.mc_samples, 1000);
  impl_->n = n;
  auto values = model.sample_values(n, opts.seed);
  std::vector<double> w(n), t2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v1 = values[2 * i], v2 = values[2 * i + 1];
    double sum = v1 + v2;
    w[i] = sum;
    t2[i] = sum > 0.0 ? v2 / sum : 0.5;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return t2[a] < t2[b]; });
  impl_->theta2.resize(n);
  impl_->batch.resize(n);
  std::vector<double> ws(n), tws(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = order[i];
    impl_->theta2[i] = t2[j];
    impl_->batch[i] = static_cast<int>(j % kBatches);
    ws[i] = w[j];
    tws[i] = t2[j] * w[j];
  }
  impl_->suffix_w.assign(n + 1, 0.0);
  impl_->suffix_tw.assign(n + 1, 0.0);
  Kahan aw, atw;
  for (std::size_t i = n; i-- > 0;) {
    aw.add(ws[i]);
    atw.add(tws[i]);
    impl_->suffix_w[i] = aw.value();
    impl_->suffix_tw[i] = atw.value();
  }
  impl_->e_total = impl_->suffix_w[0] / static_cast<double>(n);
  impl_->batch_w.assign(kBatches, 0.0);
  impl_->batch_n.assign(kBatches, 0);
  for (std::size_t i = 0; i < n; ++i) {
    impl_->batch_w[static_cast<size_t>(impl_->batch[i])] += ws[i];
    ++impl_->batch_n[static_cast<size_t>(impl_->batch[i])];
  }
}

TwoGoodContext::~TwoGoodContext() = default;

bool TwoGoodContext::quadrature() const { return impl_->quad; }

double TwoGoodContext::expected_total() const { return impl_->e_total; }

double TwoGoodContext::upper_share(double z) const {
  if (!impl_->quad) return impl_->share(z);
  if (z >= 1.0) return 0.0;
  if (z <= 0.0) return 1.0;
  auto g = [this](double t) { return impl_->rm->g_t(t); };
  return gl_integrate_pieces(
             g, make_panels(0.0, 1.0 - z, impl_->rm->t_breaks()), 64)
      .value;
}

double TwoGoodContext::excess_mean(double z) const {
  if (!impl_->quad) return impl_->excess(z);
  if (z >= 1.0) return 0.0;
  auto f = [this, z](double t) {
    return (1.0 - t - z) * impl_->rm->lambda_t(t) * impl_->rm->g_t(t);
  };
  return gl_integrate_pieces(
             f, make_panels(0.0, 1.0 - z, impl_->rm->t_breaks()), 64)
      .value;
}

std::vector<double> TwoGoodContext::r_batches(double z) const {
  if (impl_->quad) return {};
  const auto& im = *impl_;
  std::size_t idx = static_cast<std::size_t>(
      std::lower_bound(im.theta2.begin(), im.theta2.end(), z) -
      im.theta2.begin());
  std::vector<double> cnt(kBatches, 0.0), sw(kBatches, 0.0), stw(kBatches, 0.0);
  for (std::size_t i = idx; i < im.n; ++i) {
    int b = im.batch[i];
    cnt[static_cast<size_t>(b)] += 1.0;
    double wi = i + 1 <= im.n ? im.suffix_w[i] - im.suffix_w[i + 1] : 0.0;
    double twi = im.suffix_tw[i] - im.suffix_tw[i + 1];
    sw[static_cast<size_t>(b)] += wi;
    stw[static_cast<size_t>(b)] += twi;
  }
  std::vector<double> out;
  out.reserve(kBatches);
  for (int b = 0; b < kBatches; ++b) {
    double nb = static_cast<double>(im.batch_n[static_cast<size_t>(b)]);
    if (nb == 0.0) continue;
    double share_b = cnt[static_cast<size_t>(b)] / nb;
    double excess_b =
        (stw[static_cast<size_t>(b)] - z * sw[static_cast<size_t>(b)]) / nb;
    double etot_b = im.batch_w[static_cast<size_t>(b)] / nb;
    double zeta_b = z - (2.0 * z - 1.0) * share_b;
    if (zeta_b <= 0.0) continue;
    out.push_back((z * etot_b + 2.0 * excess_b) / zeta_b);
  }
  return out;
}

double zeta(const TwoGoodContext& ctx, double z) {
  double value = z - (2.0 * z - 1.0) * ctx.upper_share(z);
  if (!(value > 0.0))
    throw std::domain_error(
        "supply usage rate vanishes: no feasible menu at this z");
  return value;
}

double r_value(const TwoGoodContext& ctx, double z) {
  return (z * ctx.expected_total() + 2.0 * ctx.excess_mean(z)) / zeta(ctx, z);
}

std::string verdict_name(TwoGoodVerdict v) {
  switch (v) {
    case TwoGoodVerdict::two_option_optimal:
      return "two_option_optimal";
    case TwoGoodVerdict::three_option_optimal:
      return "three_option_optimal";
    case TwoGoodVerdict::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

namespace {

double batch_se(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

Menu pure_pair_menu(double size) {
  Menu menu;
  menu.bundles = {{size, 0.0}, {0.0, size}};
  menu.labels = {"pure good 1", "pure good 2"};
  return menu;
}

Menu mixed_menu(double q_l, double z) {
  Menu menu;
  menu.bundles = {{q_l, 0.0}, {0.0, q_l}, {z * q_l, z * q_l}};
  menu.labels = {"pure good 1", "pure good 2", "equal mixture"};
  return menu;
}

}  // namespace

TwoGoodSolution optimize_z(const ValueModel& model, double s,
                           const TwoGoodOptions& opts) {
  if (model.n_goods() != 2)
    throw std::invalid_argument("menu size analysis requires two goods");
  if (!model.exchangeable())
    throw std::invalid_argument(
        "menu size analysis requires an exchangeable model");
  if (!(s > 0.0)) throw std::domain_error("supplies must be strictly positive");

  TwoGoodContext ctx(model, opts);
  TwoGoodSolution sol;

  const int grid_n = std::max(opts.z_grid_size, 11);
  sol.r_curve.reserve(static_cast<size_t>(grid_n));
  int best_i = 0;
  double best_r = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_n; ++i) {
    double z = 0.5 + 0.5 * static_cast<double>(i) / (grid_n - 1);
    double zt = zeta(ctx, z);
    double r = r_value(ctx, z);
    sol.r_curve.push_back({z, zt, r});
    if (r > best_r) {
      best_r = r;
      best_i = i;
    }
  }

  // golden-section refinement inside the bracketing grid cells
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = sol.r_curve[static_cast<size_t>(std::max(best_i - 1, 0))].z;
  double hi =
      sol.r_curve[static_cast<size_t>(std::min(best_i + 1, grid_n - 1))].z;
  lo = std::max(lo, 0.5 + 1e-9);
  hi = std::min(hi, 1.0 - 1e-9);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = r_value(ctx, x1);
  double f2 = r_value(ctx, x2);
  sol.refinement_log.push_back({x1, f1});
  sol.refinement_log.push_back({x2, f2});
  while (hi - lo > opts.golden_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = r_value(ctx, x2);
      sol.refinement_log.push_back({x2, f2});
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = r_value(ctx, x1);
      sol.refinement_log.push_back({x1, f1});
    }
  }
  double z_star = f1 > f2 ? x1 : x2;
  double r_star = std::max(f1, f2);
  if (best_r > r_star) {
    z_star = sol.r_curve[static_cast<size_t>(best_i)].z;
    r_star = best_r;
  }

  sol.z_star = z_star;
  sol.zeta_star = zeta(ctx, z_star);
  sol.r_star = r_star;
  sol.r_half = r_value(ctx, 0.5);

  const double gap = r_star - sol.r_half;
  double se_combined = 0.0;
  if (!ctx.quadrature()) {
    auto b_star = ctx.r_batches(z_star);
    auto b_half = ctx.r_batches(0.5);
    se_combined = std::sqrt(batch_se(b_star) * batch_se(b_star) +
                            batch_se(b_half) * batch_se(b_half));
  }
  const double tiny = 1e-9 * std::max(1.0, std::abs(r_star));
  const double near_tol =
      ctx.quadrature() ? tiny : std::max(se_combined, tiny);
  for (const auto& pt : sol.r_curve)
    if (pt.r >= r_star - near_tol) sol.near_maximizers.push_back(pt.z);

  if (ctx.quadrature()) {
    sol.gap_stat_tol = tiny;
    sol.verdict = gap > tiny ? TwoGoodVerdict::three_option_optimal
                             : TwoGoodVerdict::two_option_optimal;
  } else {
    sol.gap_stat_tol = opts.stat_sigmas * se_combined;
    if (gap > opts.stat_sigmas * se_combined)
      sol.verdict = TwoGoodVerdict::three_option_optimal;
    else if (gap <= se_combined)
      sol.verdict = TwoGoodVerdict::two_option_optimal;
    else
      sol.verdict = TwoGoodVerdict::indeterminate;
  }

  const double q_low = s / sol.zeta_star;
  switch (sol.verdict) {
    case TwoGoodVerdict::three_option_optimal:
      sol.menu = mixed_menu(q_low, z_star);
      break;
    case TwoGoodVerdict::two_option_optimal:
      sol.menu = pure_pair_menu(2.0 * s);
      break;
    case TwoGoodVerdict::indeterminate:
      sol.menu = mixed_menu(q_low, z_star);
      sol.alternate_menu = pure_pair_menu(2.0 * s);
      break;
  }
  sol.detail = "r(z*) - r(1/2) = " + std::to_string(gap) +
               (ctx.quadrature()
                    ? " (quadrature)"
                    : " (mc, se = " + std::to_string(se_combined) + ")");
  return sol;
}

TwoOptionCondition two_option_optimality_condition(const ValueModel& model,
                                                   const TwoGoodOptions& opts) {
  if (model.n_goods() != 2)
    throw std::invalid_argument("menu size analysis requires two goods");
  if (!model.exchangeable())
    throw std::invalid_argument(
        "menu size analysis requires an exchangeable model");
  TwoOptionCondition cond;
  const int steps = std::max(opts.k_grid_steps, 10);

  bool quad = opts.mode != IntegrationMode::mc;
  RenormalizedModel rm(model);
  double max_gap = -std::numeric_limits<double>::infinity();
  double argmax_k = 0.0;

  if (quad) {
    auto lg = [&rm](double t) { return rm.lambda_t(t) * rm.g_t(t); };
    auto g = [&rm](double t) { return rm.g_t(t); };
    const double e_max =
        2.0 * gl_integrate_pieces([&](double t) { return t * lg(t); },
                                  make_panels(0.5, 1.0, rm.t_breaks()), 64)
                  .value;
    for (int i = 0; i <= steps; ++i) {
      double k = static_cast<double>(i) / steps;
      double upper = 1.0 / (1.0 + k);
      double p =
          2.0 * gl_integrate_pieces(g, make_panels(0.5, upper, rm.t_breaks()),
                                    64)
                    .value;
      if (p < 1e-12) continue;  // vacuous conditioning event
      double lhs_num =
          2.0 *
          gl_integrate_pieces(
              [&](double t) { return (1.0 - t * (1.0 + k)) * lg(t); },
              make_panels(0.5, upper, rm.t_breaks()), 64)
              .value;
      double gap = lhs_num / p - e_max * (1.0 - k);
      if (gap > max_gap) {
        max_gap = gap;
        argmax_k = k;
      }
    }
    cond.holds = max_gap <= 1e-9 * std::max(1.0, e_max);
  } else {
    const std::size_t n = std::max<std::size_t>(opts.mc_samples, 1000);
    auto values = model.sample_values(n, opts.seed);
    std::vector<double> rho(n), mn(n), mx(n);
    for (std::size_t i = 0; i < n; ++i) {
      double a = values[2 * i], b = values[2 * i + 1];
      double lo_v = std::min(a, b), hi_v = std::max(a, b);
      mn[i] = lo_v;
      mx[i] = hi_v;
      rho[i] = hi_v > 0.0 ? lo_v / hi_v : 1.0;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rho[a] < rho[b]; });
    std::vector<double> rho_s(n), s_mn(n + 1, 0.0), s_mx(n + 1, 0.0),
        s_mn2(n + 1, 0.0), s_mx2(n + 1, 0.0), s_mnmx(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) rho_s[i] = rho[order[i]];
    for (std::size_t i = n; i-- > 0;) {
      double a = mn[order[i]], b = mx[order[i]];
      s_mn[i] = s_mn[i + 1] + a;
      s_mx[i] = s_mx[i + 1] + b;
      s_mn2[i] = s_mn2[i + 1] + a * a;
      s_mx2[i] = s_mx2[i + 1] + b * b;
      s_mnmx[i] = s_mnmx[i + 1] + a * b;
    }
    const double e_max = s_mx[0] / static_cast<double>(n);
    const double var_mx_all =
        s_mx2[0] / static_cast<double>(n) - e_max * e_max;
    bool all_hold = true;
    for (int i = 0; i <= steps; ++i) {
      double k = static_cast<double>(i) / steps;
      std::size_t idx = static_cast<std::size_t>(
          std::lower_bound(rho_s.begin(), rho_s.end(), k) - rho_s.begin());
      double cnt = static_cast<double>(n - idx);
      if (cnt < 10.0) continue;
      double m1 = (s_mn[idx] - k * s_mx[idx]) / cnt;
      double m2 = (s_mn2[idx] - 2.0 * k * s_mnmx[idx] + k * k * s_mx2[idx]) /
                  cnt;
      double var_c = std::max(m2 - m1 * m1, 0.0);
      double se = std::sqrt(var_c / cnt +
                            (1.0 - k) * (1.0 - k) * var_mx_all /
                                static_cast<double>(n));
      double gap = m1 - e_max * (1.0 - k);
      if (gap > max_gap) {
        max_gap = gap;
        argmax_k = k;
      }
      if (gap > opts.stat_sigmas * se) all_hold = false;
    }
    cond.holds = all_hold;
  }
  cond.max_gap = max_gap;
  cond.argmax_k = argmax_k;

  // stronger sufficient condition: conditional total value along rays
  // non-increasing in the min/max ratio
  double worst_inc = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    double rr = static_cast<double>(i) / steps;
    double lam = rm.lambda_t(1.0 / (1.0 + rr));
    if (lam - prev > worst_inc) worst_inc = lam - prev;
    prev = lam;
  }
  cond.monotone_max_increase = worst_inc;
  cond.monotone_sufficient_holds = worst_inc <= 1e-9;
  cond.detail = "max condition gap " + std::to_string(max_gap) + " at k=" +
                std::to_string(argmax_k) +
                (cond.monotone_sufficient_holds
                     ? "; ray-monotone sufficient condition holds"
                     : "; ray-monotone sufficient condition fails (max "
                       "increase " +
                           std::to_string(worst_inc) + ")");
  return cond;
}

}  // namespace fairdiv
