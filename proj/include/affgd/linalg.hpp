#pragma once

#include <cstddef>
#include <vector>

namespace affgd {

using Vec = std::vector<double>;

double dot(const Vec& x, const Vec& y);
double nrm2(const Vec& x);
double linf_norm(const Vec& x);
/// Euclidean distance between x and y.
double dist(const Vec& x, const Vec& y);
/// Squared Euclidean distance between x and y.
double dist2(const Vec& x, const Vec& y);
/// a*x + y.
Vec axpy(double a, const Vec& x, const Vec& y);
Vec scaled(double a, const Vec& x);
Vec sub(const Vec& x, const Vec& y);

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool operator==(const Matrix&) const = default;

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vec& d);

  bool is_square() const { return rows == cols; }
  bool is_symmetric(double tol = 1e-12) const;
  double frobenius() const;
};

Vec matvec(const Matrix& m, const Vec& x);

/// Eigendecomposition of a symmetric matrix; columns of `vectors` are
/// unit eigenvectors paired with `values` (descending).
struct SymEig {
  Vec values;
  Matrix vectors;
};

/// Cyclic Jacobi rotations; converges to machine precision for the small
/// symmetric matrices used here.
SymEig sym_eig(const Matrix& a);
double sym_lambda_max(const Matrix& a);

/// Minimum-norm solution of a*x = rhs for symmetric PSD a. Throws
/// ConvergenceError when rhs has a component outside range(a).
Vec solve_sym_psd(const Matrix& a, const Vec& rhs, double rel_tol = 1e-12);

double median(std::vector<double> v);

}  // namespace affgd
