#include "fairdiv/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fairdiv/quadrature.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

std::string family_name(Family f) {
  switch (f) {
    case Family::uniform_square: return "uniform_square";
    case Family::corner_mass: return "corner_mass";
    case Family::iid: return "iid";
    case Family::custom_piecewise: return "custom_piecewise";
  }
  return "unknown";
}

// ---------------------------------------------------------------- Marginal

Marginal Marginal::uniform01() { return Marginal{"uniform01", 1.0}; }

Marginal Marginal::power(double alpha) {
  if (alpha < 1.0)
    throw std::invalid_argument("power marginal requires alpha >= 1");
  return Marginal{"power", alpha};
}

Marginal Marginal::exp_unit() { return Marginal{"exp_unit", 1.0}; }

double Marginal::pdf(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (name == "uniform01") return 1.0;
  if (name == "power") return alpha * std::pow(x, alpha - 1.0);
  if (name == "exp_unit") return std::exp(x) / (std::numbers::e - 1.0);
  throw std::logic_error("unknown marginal " + name);
}

double Marginal::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (name == "uniform01") return x;
  if (name == "power") return std::pow(x, alpha);
  if (name == "exp_unit")
    return (std::exp(x) - 1.0) / (std::numbers::e - 1.0);
  throw std::logic_error("unknown marginal " + name);
}

double Marginal::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (name == "uniform01") return u;
  if (name == "power") return std::pow(u, 1.0 / alpha);
  if (name == "exp_unit") return std::log1p(u * (std::numbers::e - 1.0));
  throw std::logic_error("unknown marginal " + name);
}

double Marginal::mean() const {
  if (name == "uniform01") return 0.5;
  if (name == "power") return alpha / (alpha + 1.0);
  if (name == "exp_unit") return 1.0 / (std::numbers::e - 1.0);
  throw std::logic_error("unknown marginal " + name);
}

double Marginal::ratio_limit_at_zero() const {
  // lim x->0+ of x pdf(x) / cdf(x)
  if (name == "uniform01") return 1.0;
  if (name == "power") return alpha;
  if (name == "exp_unit") return 1.0;
  throw std::logic_error("unknown marginal " + name);
}

// ------------------------------------------------------------ SimplexPoint

SimplexPoint::SimplexPoint(std::vector<double> c) : coords(std::move(c)) {
  if (coords.size() < 2)
    throw std::invalid_argument("simplex point needs at least two coordinates");
  double sum = 0.0;
  for (double x : coords) {
    if (x < 0.0) throw std::invalid_argument("simplex coordinates must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("simplex coordinates must sum to one");
}

SimplexPoint renormalize(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) {
    if (x < 0.0)
      throw std::domain_error("renormalization requires nonnegative values");
    sum += x;
  }
  if (sum <= 0.0)
    throw std::domain_error("renormalization undefined at origin");
  std::vector<double> c(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i] / sum;
  // guard against rounding pushing the sum off one
  double s2 = std::accumulate(c.begin(), c.end(), 0.0);
  for (double& x : c) x /= s2;
  return SimplexPoint(std::move(c));
}

// -------------------------------------------------------------- ValueModel

ValueModel ValueModel::uniform_square() {
  ValueModel m;
  m.family_ = Family::uniform_square;
  m.n_ = 2;
  m.exchangeable_ = true;
  m.support_ = {1.0, 1.0};
  return m;
}

ValueModel ValueModel::corner_mass(double a, double hi, double lo) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("corner_mass requires 0 < a < 1");
  if (!(hi > 0.0) || lo < 0.0)
    throw std::invalid_argument("corner_mass requires hi > 0 and lo >= 0");
  // two triangles of combined area a^2, band of area 1 - a^2
  double mass = hi * a * a + lo * (1.0 - a * a);
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument(
        "corner_mass density must integrate to one over the unit square");
  ValueModel m;
  m.family_ = Family::corner_mass;
  m.n_ = 2;
  m.exchangeable_ = true;
  m.support_ = {1.0, 1.0};
  m.a_ = a;
  m.hi_ = hi;
  m.lo_ = lo;
  return m;
}

ValueModel ValueModel::iid(Marginal marginal, int n_goods) {
  if (n_goods < 2) throw std::invalid_argument("iid model needs n_goods >= 2");
  // touch the registry so unknown names fail at construction
  (void)marginal.mean();
  ValueModel m;
  m.family_ = Family::iid;
  m.n_ = n_goods;
  m.exchangeable_ = true;
  m.support_.assign(static_cast<size_t>(n_goods), 1.0);
  m.marginal_ = std::move(marginal);
  return m;
}

namespace {

bool boxes_overlap(const BoxCell& a, const BoxCell& b) {
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    if (a.hi[i] <= b.lo[i] + 1e-15 || b.hi[i] <= a.lo[i] + 1e-15) return false;
  }
  return true;
}

double box_volume(const BoxCell& c) {
  double v = 1.0;
  for (std::size_t i = 0; i < c.lo.size(); ++i) v *= c.hi[i] - c.lo[i];
  return v;
}

bool same_cell_permuted(const BoxCell& a, const BoxCell& b,
                        const std::vector<int>& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i) {
    std::size_t j = static_cast<size_t>(perm[i]);
    if (std::abs(a.lo[i] - b.lo[j]) > 1e-12) return false;
    if (std::abs(a.hi[i] - b.hi[j]) > 1e-12) return false;
  }
  return std::abs(a.density - b.density) <= 1e-12;
}

bool cells_exchangeable(const std::vector<BoxCell>& cells, int n) {
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end())) {
    for (const auto& cell : cells) {
      bool found = false;
      for (const auto& other : cells)
        if (same_cell_permuted(cell, other, perm)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
  }
  return true;
}

}  // namespace

ValueModel ValueModel::custom_piecewise(std::vector<BoxCell> cells) {
  if (cells.empty())
    throw std::invalid_argument("custom_piecewise needs at least one cell");
  const std::size_t dim = cells.front().lo.size();
  if (dim < 2)
    throw std::invalid_argument("custom_piecewise needs at least two goods");
  double mass = 0.0;
  for (const auto& c : cells) {
    if (c.lo.size() != dim || c.hi.size() != dim)
      throw std::invalid_argument("custom_piecewise cells disagree on dimension");
    if (c.density < 0.0)
      throw std::invalid_argument("cell density must be nonnegative");
    for (std::size_t i = 0; i < dim; ++i) {
      if (c.lo[i] < 0.0 || !(c.hi[i] > c.lo[i]))
        throw std::invalid_argument("cell bounds must satisfy 0 <= lo < hi");
    }
    mass += c.density * box_volume(c);
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument(
        "custom_piecewise density must integrate to one");
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (boxes_overlap(cells[i], cells[j]))
        throw std::invalid_argument("custom_piecewise cells must not overlap");

  ValueModel m;
  m.family_ = Family::custom_piecewise;
  m.n_ = static_cast<int>(dim);
  m.support_.assign(dim, 0.0);
  for (const auto& c : cells)
    for (std::size_t i = 0; i < dim; ++i)
      m.support_[i] = std::max(m.support_[i], c.hi[i]);
  m.exchangeable_ = cells_exchangeable(cells, m.n_);
  m.cells_ = std::move(cells);
  m.cell_mass_cum_.reserve(m.cells_.size());
  double cum = 0.0;
  for (const auto& c : m.cells_) {
    cum += c.density * box_volume(c);
    m.cell_mass_cum_.push_back(cum);
  }
  m.cell_mass_cum_.back() = 1.0;
  return m;
}

double ValueModel::density(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != n_)
    throw std::invalid_argument("density: wrong dimension");
  for (int i = 0; i < n_; ++i)
    if (v[static_cast<size_t>(i)] < 0.0 ||
        v[static_cast<size_t>(i)] > support_[static_cast<size_t>(i)])
      return 0.0;
  switch (family_) {
    case Family::uniform_square:
      return 1.0;
    case Family::corner_mass: {
      double sum = v[0] + v[1];
      return (sum <= a_ || sum >= 2.0 - a_) ? hi_ : lo_;
    }
    case Family::iid: {
      double prod = 1.0;
      for (int i = 0; i < n_; ++i)
        prod *= marginal_.pdf(v[static_cast<size_t>(i)]);
      return prod;
    }
    case Family::custom_piecewise: {
      for (const auto& c : cells_) {
        bool inside = true;
        for (int i = 0; i < n_ && inside; ++i) {
          double x = v[static_cast<size_t>(i)];
          inside = x >= c.lo[static_cast<size_t>(i)] &&
                   x <= c.hi[static_cast<size_t>(i)];
        }
        if (inside) return c.density;
      }
      return 0.0;
    }
  }
  return 0.0;
}

double ValueModel::expected_total_value() const {
  switch (family_) {
    case Family::uniform_square:
      return 1.0;
    case Family::corner_mass:
      // equals the total mass by the reflection symmetry of the two triangles
      return hi_ * a_ * a_ + lo_ * (1.0 - a_ * a_);
    case Family::iid:
      return n_ * marginal_.mean();
    case Family::custom_piecewise: {
      double total = 0.0;
      for (const auto& c : cells_) {
        double mids = 0.0;
        for (std::size_t i = 0; i < c.lo.size(); ++i)
          mids += 0.5 * (c.lo[i] + c.hi[i]);
        total += c.density * box_volume(c) * mids;
      }
      return total;
    }
  }
  return 0.0;
}

std::vector<double> ValueModel::sample_values(std::size_t n,
                                              std::uint64_t seed) const {
  SplitRng rng(seed);
  std::vector<double> out(n * static_cast<size_t>(n_));
  switch (family_) {
    case Family::uniform_square:
      for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < n_; ++j)
          out[i * 2 + static_cast<size_t>(j)] =
              rng.uniform(static_cast<std::uint64_t>(j) + 1, i, 0);
      break;
    case Family::iid:
      for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < n_; ++j)
          out[i * static_cast<size_t>(n_) + static_cast<size_t>(j)] =
              marginal_.quantile(
                  rng.uniform(static_cast<std::uint64_t>(j) + 1, i, 0));
      break;
    case Family::corner_mass: {
      const double w_tri = hi_ * a_ * a_ / 2.0;  // each triangle
      for (std::size_t i = 0; i < n; ++i) {
        double pick = rng.uniform(0, i, 0);
        double x, y;
        if (pick < 2.0 * w_tri) {
          // uniform on {x,y >= 0, x + y <= a}: total s has density 2s/a^2,
          // the cross-section at fixed s is uniform
          double s = a_ * std::sqrt(rng.uniform(1, i, 0));
          double u = rng.uniform(2, i, 0);
          x = s * u;
          y = s * (1.0 - u);
          if (pick >= w_tri) {  // mirrored triangle at the opposite corner
            x = 1.0 - x;
            y = 1.0 - y;
          }
        } else {
          // middle band by rejection from the unit square
          std::uint32_t d = 0;
          do {
            x = rng.uniform(3, i, d++);
            y = rng.uniform(3, i, d++);
          } while (x + y <= a_ || x + y >= 2.0 - a_);
        }
        out[i * 2] = x;
        out[i * 2 + 1] = y;
      }
      break;
    }
    case Family::custom_piecewise:
      for (std::size_t i = 0; i < n; ++i) {
        double pick = rng.uniform(0, i, 0);
        std::size_t cell = 0;
        while (cell + 1 < cells_.size() && pick >= cell_mass_cum_[cell]) ++cell;
        const auto& c = cells_[cell];
        for (int j = 0; j < n_; ++j) {
          double u = rng.uniform(static_cast<std::uint64_t>(j) + 1, i, 0);
          out[i * static_cast<size_t>(n_) + static_cast<size_t>(j)] =
              c.lo[static_cast<size_t>(j)] +
              u * (c.hi[static_cast<size_t>(j)] - c.lo[static_cast<size_t>(j)]);
        }
      }
      break;
  }
  return out;
}

double ValueModel::ray_upper(std::span<const double> theta) const {
  double s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i) {
    double th = theta[static_cast<size_t>(i)];
    if (th > 0.0)
      s = std::min(s, support_[static_cast<size_t>(i)] / th);
  }
  return s;
}

void ValueModel::ray_breaks(std::span<const double> theta,
                            std::vector<double>& out) const {
  out.clear();
  switch (family_) {
    case Family::uniform_square:
    case Family::iid:
      break;
    case Family::corner_mass:
      // along v = s*theta the coordinate sum is s, so the density switches
      // exactly at s = a and s = 2 - a
      out.push_back(a_);
      out.push_back(2.0 - a_);
      break;
    case Family::custom_piecewise:
      for (const auto& c : cells_)
        for (int i = 0; i < n_; ++i) {
          double th = theta[static_cast<size_t>(i)];
          if (th <= 0.0) continue;
          out.push_back(c.lo[static_cast<size_t>(i)] / th);
          out.push_back(c.hi[static_cast<size_t>(i)] / th);
        }
      break;
  }
}

bool ValueModel::has_analytic_t() const {
  return n_ == 2 && (family_ == Family::uniform_square ||
                     family_ == Family::corner_mass);
}

namespace {

struct CornerPieces {
  // radial closed forms in u = max(t, 1-t); "far" piece is u >= 1/(2-a)
  // where the ray exits the square before reaching the opposite triangle
  double tc, g_far_const, g_near_const, l_far_const, l_near_const;
  double hi, lo;
};

CornerPieces corner_pieces(double a, double hi, double lo) {
  CornerPieces p;
  p.tc = 1.0 / (2.0 - a);
  p.hi = hi;
  p.lo = lo;
  double b = 2.0 - a;
  p.g_far_const = (hi * a * a - lo * a * a) / 2.0;
  p.l_far_const = (hi * a * a * a - lo * a * a * a) / 3.0;
  p.g_near_const = (hi * a * a + lo * (b * b - a * a) - hi * b * b) / 2.0;
  p.l_near_const =
      (hi * a * a * a + lo * (b * b * b - a * a * a) - hi * b * b * b) / 3.0;
  return p;
}

}  // namespace

double ValueModel::analytic_g_t(double t) const {
  double u = std::max(t, 1.0 - t);
  if (family_ == Family::uniform_square) return 0.5 / (u * u);
  if (family_ == Family::corner_mass) {
    auto p = corner_pieces(a_, hi_, lo_);
    if (u >= p.tc) return p.g_far_const + 0.5 * lo_ / (u * u);
    return p.g_near_const + 0.5 * hi_ / (u * u);
  }
  throw std::logic_error("no analytic g~ registered for this family");
}

double ValueModel::analytic_g_t_derivative(double t) const {
  double u = std::max(t, 1.0 - t);
  double sign = t >= 0.5 ? 1.0 : -1.0;
  if (family_ == Family::uniform_square) return sign * (-1.0 / (u * u * u));
  if (family_ == Family::corner_mass) {
    auto p = corner_pieces(a_, hi_, lo_);
    double level = u >= p.tc ? lo_ : hi_;
    return sign * (-level / (u * u * u));
  }
  throw std::logic_error("no analytic g~ registered for this family");
}

double ValueModel::analytic_lambda_t(double t) const {
  double u = std::max(t, 1.0 - t);
  if (family_ == Family::uniform_square) return 2.0 / (3.0 * u);
  if (family_ == Family::corner_mass) {
    auto p = corner_pieces(a_, hi_, lo_);
    double g, l;
    if (u >= p.tc) {
      g = p.g_far_const + 0.5 * lo_ / (u * u);
      l = p.l_far_const + lo_ / (3.0 * u * u * u);
    } else {
      g = p.g_near_const + 0.5 * hi_ / (u * u);
      l = p.l_near_const + hi_ / (3.0 * u * u * u);
    }
    return l / g;
  }
  throw std::logic_error("no analytic lambda~ registered for this family");
}

std::vector<double> ValueModel::t_breaks() const {
  if (n_ != 2) return {};
  switch (family_) {
    case Family::uniform_square:
    case Family::iid:
      return {0.5};
    case Family::corner_mass: {
      double tc = 1.0 / (2.0 - a_);
      return {1.0 - tc, 0.5, tc};
    }
    case Family::custom_piecewise: {
      // g~ kinks where the ray direction passes through a cell corner
      std::vector<double> vals;
      vals.push_back(0.5);
      for (const auto& c : cells_) {
        const double xs[2] = {c.lo[0], c.hi[0]};
        const double ys[2] = {c.lo[1], c.hi[1]};
        for (double x : xs)
          for (double y : ys)
            if (x + y > 0.0) vals.push_back(x / (x + y));
      }
      // support-box corner
      if (support_[0] + support_[1] > 0.0)
        vals.push_back(support_[0] / (support_[0] + support_[1]));
      std::sort(vals.begin(), vals.end());
      std::vector<double> out;
      for (double v : vals) {
        if (v <= 1e-12 || v >= 1.0 - 1e-12) continue;
        if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
      }
      return out;
    }
  }
  return {};
}

const Marginal& ValueModel::marginal() const {
  if (family_ != Family::iid)
    throw std::logic_error("marginal() is only defined for iid models");
  return marginal_;
}

// ------------------------------------------------------- RenormalizedModel

RenormalizedModel::RenormalizedModel(const ValueModel& base, int ray_nodes)
    : base_(&base), ray_nodes_(ray_nodes) {
  if (ray_nodes < 4)
    throw std::invalid_argument("ray quadrature needs at least 4 nodes");
  if (base.n_goods() == 2) t_breaks_ = base.t_breaks();
}

double RenormalizedModel::ray_integral(std::span<const double> theta,
                                       int power) const {
  double s_max = base_->ray_upper(theta);
  if (!std::isfinite(s_max) || s_max <= 0.0) return 0.0;
  std::vector<double> kinks;
  base_->ray_breaks(theta, kinks);
  auto panels = make_panels(0.0, s_max, kinks);
  const int exponent = base_->n_goods() - 1 + power;
  std::vector<double> v(theta.size());
  auto f = [&](double s) {
    for (std::size_t i = 0; i < theta.size(); ++i) v[i] = s * theta[i];
    return base_->density(v) * std::pow(s, exponent);
  };
  return gl_integrate_pieces(f, panels, ray_nodes_).value;
}

double RenormalizedModel::g_density(const SimplexPoint& theta) const {
  if (theta.size() != base_->n_goods())
    throw std::invalid_argument("g_density: wrong dimension");
  if (base_->n_goods() == 2 && base_->has_analytic_t())
    return base_->analytic_g_t(theta[0]);
  return ray_integral(theta.coords, 0);
}

double RenormalizedModel::lambda_weight(const SimplexPoint& theta) const {
  if (base_->n_goods() == 2 && base_->has_analytic_t())
    return base_->analytic_lambda_t(theta[0]);
  double g = ray_integral(theta.coords, 0);
  if (g <= 0.0)
    throw std::domain_error("lambda undefined outside support of G");
  return ray_integral(theta.coords, 1) / g;
}

double RenormalizedModel::g_t(double t) const {
  if (base_->n_goods() != 2)
    throw std::logic_error("g_t is a two-good view");
  if (base_->has_analytic_t()) return base_->analytic_g_t(t);
  const double th[2] = {t, 1.0 - t};
  return ray_integral(std::span<const double>(th, 2), 0);
}

double RenormalizedModel::lambda_t(double t) const {
  if (base_->n_goods() != 2)
    throw std::logic_error("lambda_t is a two-good view");
  if (base_->has_analytic_t()) return base_->analytic_lambda_t(t);
  const double th[2] = {t, 1.0 - t};
  double g = ray_integral(std::span<const double>(th, 2), 0);
  if (g <= 0.0)
    throw std::domain_error("lambda undefined outside support of G");
  return ray_integral(std::span<const double>(th, 2), 1) / g;
}

double RenormalizedModel::g_t_derivative(double t) const {
  if (base_->n_goods() != 2)
    throw std::logic_error("g_t_derivative is a two-good view");
  if (base_->has_analytic_t()) return base_->analytic_g_t_derivative(t);
  // central difference confined to the piece containing t
  double lo = 0.0, hi = 1.0;
  for (double b : t_breaks_) {
    if (b <= t && b > lo) lo = b;
    if (b > t && b < hi) hi = b;
  }
  if (t - lo < 1e-12 && hi > lo) t = std::min(lo + 1e-9, 0.5 * (lo + hi));
  double h = std::min({1e-6, 0.45 * (t - lo), 0.45 * (hi - t)});
  if (h <= 0.0) h = 1e-9;
  return (g_t(t + h) - g_t(t - h)) / (2.0 * h);
}

double RenormalizedModel::integrate_t(const std::function<double(double)>& fn,
                                      double a, double b) const {
  if (!(b > a)) return 0.0;
  auto panels = make_panels(a, b, t_breaks_);
  return gl_integrate_pieces(fn, panels, 64).value;
}

double RenormalizedModel::g_mass(double a, double b) const {
  return integrate_t([this](double t) { return g_t(t); }, a, b);
}

}  // namespace fairdiv
