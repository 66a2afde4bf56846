#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fairdiv {

enum class Family { uniform_square, corner_mass, iid, custom_piecewise };

std::string family_name(Family f);

// One-dimensional marginal on [0, 1] with registered closed forms,
// used by the iid family and the marginal-ratio optimality check.
struct Marginal {
  std::string name;
  double alpha = 1.0;

  static Marginal uniform01();
  static Marginal power(double alpha);  // cdf x^alpha, alpha >= 1
  static Marginal exp_unit();           // pdf e^x / (e - 1)

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
  double mean() const;
  double upper() const { return 1.0; }
  // lim_{x->0+} x pdf(x) / cdf(x)
  double ratio_limit_at_zero() const;
};

// Axis-aligned cell with constant density, for the custom family.
struct BoxCell {
  std::vector<double> lo;
  std::vector<double> hi;
  double density = 0.0;
};

// Point on the unit simplex. Construction enforces nonnegative coordinates
// summing to one within 1e-12.
struct SimplexPoint {
  std::vector<double> coords;

  SimplexPoint() = default;
  explicit SimplexPoint(std::vector<double> c);

  int size() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[static_cast<size_t>(i)]; }
};

// v / sum(v). Throws std::domain_error on the zero vector.
SimplexPoint renormalize(std::span<const double> v);

class ValueModel {
 public:
  static ValueModel uniform_square();
  static ValueModel corner_mass(double a = 0.2, double hi = 20.0,
                                double lo = 5.0 / 24.0);
  static ValueModel iid(Marginal marginal, int n_goods);
  static ValueModel custom_piecewise(std::vector<BoxCell> cells);

  int n_goods() const { return n_; }
  Family family() const { return family_; }
  bool exchangeable() const { return exchangeable_; }
  const std::vector<double>& support_box() const { return support_; }

  double density(std::span<const double> v) const;
  double expected_total_value() const;

  // n iid draws from the joint distribution, row-major n x N.
  // Deterministic in (seed, n, family parameters).
  std::vector<double> sample_values(std::size_t n, std::uint64_t seed) const;

  // Ray structure of s -> f(s * theta): largest s keeping s*theta inside the
  // support box, and the interior s values where the density changes regime.
  double ray_upper(std::span<const double> theta) const;
  void ray_breaks(std::span<const double> theta,
                  std::vector<double>& out) const;

  // Closed forms of the renormalized objects in t = theta_1 coordinates.
  bool has_analytic_t() const;
  double analytic_g_t(double t) const;
  double analytic_g_t_derivative(double t) const;
  double analytic_lambda_t(double t) const;
  // Kink locations of g~ in (0, 1); meaningful for any two-good model.
  std::vector<double> t_breaks() const;

  const Marginal& marginal() const;

  double corner_a() const { return a_; }
  double corner_hi() const { return hi_; }
  double corner_lo() const { return lo_; }
  const std::vector<BoxCell>& cells() const { return cells_; }

 private:
  ValueModel() = default;

  Family family_ = Family::uniform_square;
  int n_ = 2;
  bool exchangeable_ = true;
  std::vector<double> support_;
  double a_ = 0.0, hi_ = 0.0, lo_ = 0.0;
  Marginal marginal_;
  std::vector<BoxCell> cells_;
  std::vector<double> cell_mass_cum_;
};

// Renormalized view: density g of Theta = V / sum(V) in barycentric Lebesgue
// coordinates and the conditional total-value weight lambda(theta), evaluated
// through registered closed forms or piecewise Gauss-Legendre ray integrals.
class RenormalizedModel {
 public:
  explicit RenormalizedModel(const ValueModel& base, int ray_nodes = 64);

  const ValueModel& base() const { return *base_; }
  int n_goods() const { return base_->n_goods(); }
  int ray_nodes() const { return ray_nodes_; }

  double g_density(const SimplexPoint& theta) const;
  double lambda_weight(const SimplexPoint& theta) const;

  // Two-good views in t = theta_1 coordinates.
  double g_t(double t) const;
  double lambda_t(double t) const;
  double g_t_derivative(double t) const;
  const std::vector<double>& t_breaks() const { return t_breaks_; }

  // integral of fn over [a, b] in t, split at the g~ kinks
  double integrate_t(const std::function<double(double)>& fn, double a,
                     double b) const;
  double g_mass(double a, double b) const;

 private:
  double ray_integral(std::span<const double> theta, int power) const;

  const ValueModel* base_;
  int ray_nodes_;
  std::vector<double> t_breaks_;
};

}  // namespace fairdiv
