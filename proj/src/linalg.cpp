#include "fairdiv/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fairdiv {

std::vector<double> solve_linear(Matrix m, std::vector<double> b) {
  const int n = m.n;
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_linear: dimension mismatch");
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) < 1e-14)
      throw SingularMatrixError(
          "singular system: pivot column " + std::to_string(col) +
              " has no usable pivot",
          col);
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
      std::swap(b[static_cast<size_t>(pivot)], b[static_cast<size_t>(col)]);
    }
    for (int r = col + 1; r < n; ++r) {
      double factor = m(r, col) / m(col, col);
      if (factor == 0.0) continue;
      for (int j = col; j < n; ++j) m(r, j) -= factor * m(col, j);
      b[static_cast<size_t>(r)] -= factor * b[static_cast<size_t>(col)];
    }
  }
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[static_cast<size_t>(r)];
    for (int j = r + 1; j < n; ++j) acc -= m(r, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(r)] = acc / m(r, r);
  }
  return x;
}

Matrix invert(const Matrix& m) {
  const int n = m.n;
  Matrix inv(n);
  for (int col = 0; col < n; ++col) {
    std::vector<double> e(static_cast<size_t>(n), 0.0);
    e[static_cast<size_t>(col)] = 1.0;
    auto x = solve_linear(m, e);
    for (int r = 0; r < n; ++r) inv(r, col) = x[static_cast<size_t>(r)];
  }
  return inv;
}

namespace {

double norm_1(const Matrix& m) {
  double best = 0.0;
  for (int j = 0; j < m.n; ++j) {
    double col = 0.0;
    for (int i = 0; i < m.n; ++i) col += std::abs(m(i, j));
    best = std::max(best, col);
  }
  return best;
}

}  // namespace

double condition_number_1(const Matrix& m) {
  return norm_1(m) * norm_1(invert(m));
}

}  // namespace fairdiv
