#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fairdiv {

// Dense row-major matrix, sized for N = number of goods (tiny).
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const {
    return a[static_cast<size_t>(i) * n + j];
  }
};

struct SingularMatrixError : std::runtime_error {
  int pivot;
  SingularMatrixError(const std::string& msg, int pivot_)
      : std::runtime_error(msg), pivot(pivot_) {}
};

// Gaussian elimination with partial pivoting. Throws SingularMatrixError
// naming the offending pivot column.
std::vector<double> solve_linear(Matrix m, std::vector<double> b);

Matrix invert(const Matrix& m);

// 1-norm condition estimate ||A||_1 * ||A^-1||_1.
double condition_number_1(const Matrix& m);

}  // namespace fairdiv
