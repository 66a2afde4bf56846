#pragma once

#include <functional>
#include <vector>

namespace fairdiv {

// Gauss-Legendre nodes and weights on [-1, 1]. Computed once per order by
// Newton iteration on the Legendre recurrence and cached.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
  static const GaussLegendre& order(int n);
};

// Single-panel Gauss-Legendre on [a, b].
double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int nodes = 64);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // |full-order - half-order| summed over pieces
};

// Composite rule over the panels defined by a sorted breakpoint list
// (first and last entries are the integration limits). Breakpoints should
// include every kink of the integrand so each panel is smooth.
IntegralEstimate gl_integrate_pieces(const std::function<double(double)>& f,
                                     const std::vector<double>& breaks,
                                     int nodes = 64);

// Builds the sorted panel list for [a, b] from candidate interior kinks,
// dropping points outside (a, b) and de-duplicating.
std::vector<double> make_panels(double a, double b,
                                const std::vector<double>& kinks);

}  // namespace fairdiv
