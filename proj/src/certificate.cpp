#include "fairdiv/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairdiv/quadrature.hpp"

namespace fairdiv {

namespace {

constexpr double kAtomEps = 1e-12;

std::vector<double> clipped_panels(const SignedMeasure1D& mu, double a,
                                   double b) {
  a = std::max(a, mu.lo);
  b = std::min(b, mu.hi);
  if (!(b > a)) return {};
  std::vector<double> breaks;
  for (double x : mu.piece_breaks)
    if (x > a && x < b) breaks.push_back(x);
  return make_panels(a, b, breaks);
}

}  // namespace

double SignedMeasure1D::mass(double a, double b) const {
  double value = 0.0;
  auto panels = clipped_panels(*this, a, b);
  if (!panels.empty())
    value = gl_integrate_pieces(interior_density, panels, 64).value;
  for (const auto& [loc, w] : atoms)
    if (loc >= a - kAtomEps && loc <= b + kAtomEps) value += w;
  return value;
}

double SignedMeasure1D::total_variation() const {
  auto abs_density = [this](double t) { return std::abs(interior_density(t)); };
  double value = 0.0;
  auto panels = clipped_panels(*this, lo, hi);
  if (!panels.empty()) value = gl_integrate_pieces(abs_density, panels, 64).value;
  for (const auto& [loc, w] : atoms) value += std::abs(w);
  return value;
}

std::string verdict_name(CertVerdict v) {
  switch (v) {
    case CertVerdict::certified_optimal:
      return "certified_optimal";
    case CertVerdict::certificate_fails:
      return "certificate_fails";
    case CertVerdict::not_applicable:
      return "not_applicable";
  }
  return "not_applicable";
}

std::pair<SignedMeasure1D, SignedMeasure1D> build_mu_two_goods(
    const RenormalizedModel& model, const CeeiSolution& ceei,
    std::span<const double> c) {
  if (model.n_goods() != 2)
    throw std::invalid_argument("certificate measures require two goods");
  if (c.size() != 2) throw std::invalid_argument("need two shadow costs");
  const double c1 = c[0], c2 = c[1];
  const double s_total = c1 + c2;
  const double t0 = ceei.q[1] / (ceei.q[0] + ceei.q[1]);

  // common bracket lambda~ g~ - 2 S g~ + (c1 - S t) g~'
  // (captures the view by value: only the base ValueModel must stay alive)
  auto bracket = [model, c1, s_total](double t) {
    const double g = model.g_t(t);
    const double lg = model.lambda_t(t) * g;
    const double gp = model.g_t_derivative(t);
    return lg - 2.0 * s_total * g + (c1 - s_total * t) * gp;
  };

  SignedMeasure1D mu1;
  mu1.good_index = 1;
  mu1.lo = t0;
  mu1.hi = 1.0;
  mu1.interior_density = [bracket](double t) { return t * bracket(t); };
  mu1.atoms = {{1.0, c2 * model.g_t(1.0)}};
  for (double x : model.t_breaks())
    if (x > mu1.lo && x < mu1.hi) mu1.piece_breaks.push_back(x);

  SignedMeasure1D mu2;
  mu2.good_index = 2;
  mu2.lo = 0.0;
  mu2.hi = t0;
  mu2.interior_density = [bracket](double t) { return (1.0 - t) * bracket(t); };
  mu2.atoms = {{0.0, c1 * model.g_t(0.0)}};
  for (double x : model.t_breaks())
    if (x > mu2.lo && x < mu2.hi) mu2.piece_breaks.push_back(x);

  return {std::move(mu1), std::move(mu2)};
}

double measure_balance(const SignedMeasure1D& mu) { return mu.total(); }

CertificateReport dominance_check_two_goods(const SignedMeasure1D& mu1,
                                            const SignedMeasure1D& mu2,
                                            int grid_size,
                                            double tol_factor) {
  CertificateReport report;
  report.method = "two_good_exact";
  report.balance_residuals = {measure_balance(mu1), measure_balance(mu2)};
  report.total_variation = {mu1.total_variation(), mu2.total_variation()};

  double min_tail = std::numeric_limits<double>::infinity();
  double min_loc = 0.0;
  int min_good = 0;

  auto scan = [&](const SignedMeasure1D& mu, bool upper_tail) {
    if (!(mu.hi > mu.lo)) {
      // degenerate interval: the only tail is the atom total
      double v = mu.total();
      if (v < min_tail) {
        min_tail = v;
        min_loc = mu.lo;
        min_good = mu.good_index;
      }
      return;
    }
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(grid_size) + mu.piece_breaks.size() + 8);
    for (int i = 0; i < grid_size; ++i)
      grid.push_back(mu.lo + (mu.hi - mu.lo) * i /
                                 static_cast<double>(grid_size - 1));
    for (double x : mu.piece_breaks) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // refine at interior sign changes of the density: tails are stationary
    // exactly where the density vanishes
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      double a = grid[i], b = grid[i + 1];
      double fa = mu.interior_density(a), fb = mu.interior_density(b);
      if (!(fa == 0.0) && !(fb == 0.0) && std::signbit(fa) != std::signbit(fb)) {
        for (int it = 0; it < 60; ++it) {
          double m = 0.5 * (a + b);
          double fm = mu.interior_density(m);
          if (fm == 0.0) {
            a = b = m;
            break;
          }
          if (std::signbit(fm) == std::signbit(fa)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
    }
    grid.insert(grid.end(), roots.begin(), roots.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // cumulative tails: for the upper-tail good sweep from hi down so
    // tail(a) = mu([a, hi]); for the mirrored good tail(a) = mu([lo, a])
    const std::size_t m = grid.size();
    std::vector<double> tail(m, 0.0);
    if (upper_tail) {
      double acc = 0.0;
      for (const auto& [loc, w] : mu.atoms)
        if (loc >= grid[m - 1] - kAtomEps) acc += w;
      tail[m - 1] = acc;
      for (std::size_t i = m - 1; i-- > 0;) {
        auto panels = clipped_panels(mu, grid[i], grid[i + 1]);
        double seg = panels.empty()
                         ? 0.0
                         : gl_integrate_pieces(mu.interior_density, panels, 32)
                               .value;
        for (const auto& [loc, w] : mu.atoms)
          if (loc >= grid[i] - kAtomEps && loc < grid[i + 1] - kAtomEps)
            seg += w;
        tail[i] = tail[i + 1] + seg;
      }
    } else {
      double acc = 0.0;
      for (const auto& [loc, w] : mu.atoms)
        if (loc <= grid[0] + kAtomEps) acc += w;
      tail[0] = acc;
      for (std::size_t i = 1; i < m; ++i) {
        auto panels = clipped_panels(mu, grid[i - 1], grid[i]);
        double seg = panels.empty()
                         ? 0.0
                         : gl_integrate_pieces(mu.interior_density, panels, 32)
                               .value;
        for (const auto& [loc, w] : mu.atoms)
          if (loc > grid[i - 1] + kAtomEps && loc <= grid[i] + kAtomEps)
            seg += w;
        tail[i] = tail[i - 1] + seg;
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      if (tail[i] < min_tail) {
        min_tail = tail[i];
        min_loc = grid[i];
        min_good = mu.good_index;
      }
  };

  scan(mu1, /*upper_tail=*/true);
  scan(mu2, /*upper_tail=*/false);

  report.min_tail_mass = min_tail;
  report.min_tail_location = min_loc;
  report.min_tail_good = min_good;
  const double scale =
      std::max({1.0, report.total_variation[0], report.total_variation[1]});
  report.verdict = min_tail >= -tol_factor * scale
                       ? CertVerdict::certified_optimal
                       : CertVerdict::certificate_fails;
  report.detail = "min tail mass " + std::to_string(min_tail) + " at t=" +
                  std::to_string(min_loc) + " (good " +
                  std::to_string(min_good) + ")";
  return report;
}

CertificateReport iid_ratio_condition(const Marginal& marginal,
                                      int grid_size) {
  CertificateReport report;
  report.method = "iid_sufficient";
  double worst_increase = 0.0;
  double worst_loc = 0.0;
  double prev_ratio = std::numeric_limits<double>::infinity();
  bool have_prev = false;
  for (int i = 1; i < grid_size; ++i) {
    double x = static_cast<double>(i) / (grid_size - 1);
    double cdf = marginal.cdf(x);
    if (!(cdf > 0.0)) continue;
    double ratio = x * marginal.pdf(x) / cdf;
    if (have_prev) {
      double inc = ratio - prev_ratio;
      if (inc > worst_increase) {
        worst_increase = inc;
        worst_loc = x;
      }
    }
    prev_ratio = ratio;
    have_prev = true;
  }
  report.min_tail_mass = -worst_increase;
  report.min_tail_location = worst_loc;
  if (worst_increase <= 1e-9) {
    report.verdict = CertVerdict::certified_optimal;
    report.detail = "x pdf(x)/cdf(x) non-increasing on (0, 1]";
  } else {
    // the condition is sufficient only: failing it proves nothing
    report.verdict = CertVerdict::not_applicable;
    report.detail = "x pdf(x)/cdf(x) increases by " +
                    std::to_string(worst_increase) + " near x=" +
                    std::to_string(worst_loc) +
                    "; sufficient condition inconclusive";
  }
  return report;
}

CertifyResult certify(const ValueModel& model, std::span<const double> s,
                      const CertifyOptions& opts) {
  RenormalizedModel rm(model);
  CertifyResult result;

  CeeiOptions copts;
  copts.mode = opts.mode;
  copts.mc_samples = opts.mc_samples;
  copts.seed = opts.seed;
  result.ceei = solve_ceei(rm, s, copts);

  ShadowOptions sopts;
  sopts.mode = opts.mode;
  sopts.mc_samples = opts.mc_samples;
  sopts.seed = opts.seed;
  result.shadow = shadow_costs(rm, result.ceei.q, sopts);

  if (model.n_goods() == 2) {
    auto [mu1, mu2] = build_mu_two_goods(rm, result.ceei, result.shadow.c_flow);
    result.report = dominance_check_two_goods(mu1, mu2, opts.tail_grid_size,
                                              opts.balance_tol_factor);
    return result;
  }
  if (model.family() == Family::iid) {
    result.report = iid_ratio_condition(model.marginal(), opts.tail_grid_size);
    return result;
  }
  result.report.verdict = CertVerdict::not_applicable;
  result.report.method = "none";
  result.report.detail =
      "no certificate method for this model class; two goods or symmetric "
      "iid required";
  return result;
}

}  // namespace fairdiv
