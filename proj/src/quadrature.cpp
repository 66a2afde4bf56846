#include "fairdiv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace {

GaussLegendre compute_rule(int n) {
  GaussLegendre rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // root of P_n near cos(pi (i + 3/4) / (n + 1/2)), polished by Newton
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      deriv = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    rule.x[i] = -x;
    rule.w[i] = w;
    rule.x[n - 1 - i] = x;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

std::map<int, GaussLegendre>& rule_cache() {
  static std::map<int, GaussLegendre> cache;
  return cache;
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

const GaussLegendre& GaussLegendre::order(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto& cache = rule_cache();
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int nodes) {
  if (!(b > a)) return 0.0;
  const auto& rule = GaussLegendre::order(nodes);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Kahan acc;
  for (int k = 0; k < nodes; ++k)
    acc.add(rule.w[k] * f(mid + half * rule.x[k]));
  return half * acc.value();
}

IntegralEstimate gl_integrate_pieces(const std::function<double(double)>& f,
                                     const std::vector<double>& breaks,
                                     int nodes) {
  IntegralEstimate est;
  if (breaks.size() < 2) return est;
  Kahan value, error;
  const int half_nodes = std::max(4, nodes / 2);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    double full = gl_integrate(f, breaks[k], breaks[k + 1], nodes);
    double coarse = gl_integrate(f, breaks[k], breaks[k + 1], half_nodes);
    value.add(full);
    error.add(std::abs(full - coarse));
  }
  est.value = value.value();
  est.error = error.value();
  return est;
}

std::vector<double> make_panels(double a, double b,
                                const std::vector<double>& kinks) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double k : kinks)
    if (k > a && k < b) pts.push_back(k);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  const double eps = 1e-13 * std::max(1.0, std::abs(b - a));
  for (double p : pts)
    if (out.empty() || p - out.back() > eps) out.push_back(p);
  if (out.size() < 2) out = {a, b};
  out.front() = a;
  out.back() = b;
  return out;
}

}  // namespace fairdiv
