#include <cmath>
#include <cstddef>

#include "affgd/errors.hpp"
#include "affgd/io.hpp"
#include "affgd/linalg.hpp"
#include "affgd/rng.hpp"
#include "doctest.h"

using namespace affgd;

namespace {

Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  return a;
}

// Independent dominant-eigenvalue oracle: shifted power iteration on a + cI
// with c = max row sum, which makes the shifted matrix PSD with the same
// eigenvector ordering at the top.
double power_lambda_max(const Matrix& a, int iters = 20000) {
  const std::size_t n = a.rows;
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j));
    shift = std::max(shift, row);
  }
  Matrix b = a;
  for (std::size_t i = 0; i < n; ++i) b(i, i) += shift;
  Vec v(n, 1.0);
  v[0] = 1.5;  // break symmetry against unlucky exact orthogonality
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = matvec(b, v);
    const double norm = nrm2(w);
    REQUIRE(norm > 0.0);
    for (auto& wi : w) wi /= norm;
    lambda = dot(w, matvec(b, w));
    v = std::move(w);
  }
  return lambda - shift;
}

}  // namespace

TEST_CASE("vector primitives on hand values") {
  const Vec x{3.0, -4.0};
  const Vec y{1.0, 2.0};
  CHECK(dot(x, y) == doctest::Approx(-5.0));
  CHECK(nrm2(x) == doctest::Approx(5.0));
  CHECK(linf_norm(x) == doctest::Approx(4.0));
  CHECK(dist(x, y) == doctest::Approx(std::sqrt(4.0 + 36.0)));
  CHECK(dist2(x, y) == doctest::Approx(40.0));
  const Vec z = axpy(2.0, x, y);  // 2x + y
  CHECK(z[0] == doctest::Approx(7.0));
  CHECK(z[1] == doctest::Approx(-6.0));
  const Vec s = scaled(-1.0, x);
  CHECK(s[0] == doctest::Approx(-3.0));
  const Vec d = sub(x, y);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(-6.0));
}

TEST_CASE("matrix constructors and predicates") {
  const Matrix eye = Matrix::identity(3);
  CHECK(eye(0, 0) == 1.0);
  CHECK(eye(0, 1) == 0.0);
  CHECK(eye.is_square());
  CHECK(eye.is_symmetric());
  CHECK(eye.frobenius() == doctest::Approx(std::sqrt(3.0)));

  const Matrix d = Matrix::diagonal({1.0, 4.0});
  CHECK(d.rows == 2);
  CHECK(d(1, 1) == 4.0);
  const Vec mv = matvec(d, {2.0, 3.0});
  CHECK(mv[0] == doctest::Approx(2.0));
  CHECK(mv[1] == doctest::Approx(12.0));

  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  CHECK_FALSE(asym.is_symmetric());
}

TEST_CASE("sym_eig matches hand spectrum on diagonal and 2x2 matrices") {
  const SymEig e = sym_eig(Matrix::diagonal({1.0, 4.0, 2.0}));
  REQUIRE(e.values.size() == 3);
  CHECK(e.values[0] == doctest::Approx(4.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(1.0));

  // [[2,1],[1,2]] has eigenvalues 3 and 1.
  Matrix a(2, 2);
  a(0, 0) = a(1, 1) = 2.0;
  a(0, 1) = a(1, 0) = 1.0;
  const SymEig e2 = sym_eig(a);
  CHECK(e2.values[0] == doctest::Approx(3.0));
  CHECK(e2.values[1] == doctest::Approx(1.0));
  CHECK(sym_lambda_max(a) == doctest::Approx(3.0));
}

TEST_CASE("sym_eig reconstructs random matrices and tops out at the power-iteration value") {
  Rng rng(314159);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.index(6));
    const Matrix a = random_symmetric(n, rng);
    const SymEig e = sym_eig(a);

    // Eigenvalues descending.
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);

    // Columns are orthonormal eigenvectors: ||A v_i - lambda_i v_i|| small.
    for (std::size_t i = 0; i < n; ++i) {
      Vec vi(n);
      for (std::size_t r = 0; r < n; ++r) vi[r] = e.vectors(r, i);
      CHECK(nrm2(vi) == doctest::Approx(1.0).epsilon(1e-12));
      const Vec avi = matvec(a, vi);
      CHECK(dist(avi, scaled(e.values[i], vi)) < 1e-10);
    }

    // Reconstruction A = V diag(values) V^T entrywise.
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          sum += e.vectors(r, i) * e.values[i] * e.vectors(c, i);
        CHECK(sum == doctest::Approx(a(r, c)).epsilon(1e-10));
      }

    CHECK(sym_lambda_max(a) == doctest::Approx(power_lambda_max(a)).epsilon(1e-8));
  }
}

TEST_CASE("solve_sym_psd solves full-rank systems and rejects out-of-range rhs") {
  Rng rng(2718);
  // Well-conditioned PSD system A = B^T B + I with known solution.
  const std::size_t n = 4;
  const Matrix b = random_symmetric(n, rng);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(k, i) * b(k, j);
      a(i, j) = s;
    }
  Vec x_true(n);
  for (auto& v : x_true) v = rng.uniform(-2.0, 2.0);
  const Vec rhs = matvec(a, x_true);
  const Vec x = solve_sym_psd(a, rhs);
  CHECK(dist(x, x_true) < 1e-9);

  // Singular matrix with rhs outside its range.
  const Matrix sing = Matrix::diagonal({1.0, 0.0});
  CHECK_THROWS_AS((void)solve_sym_psd(sing, {1.0, 1.0}), ConvergenceError);
  // Same matrix, rhs in range: minimum-norm solution zeroes the null direction.
  const Vec xm = solve_sym_psd(sing, {3.0, 0.0});
  CHECK(xm[0] == doctest::Approx(3.0));
  CHECK(xm[1] == doctest::Approx(0.0));
}

TEST_CASE("median of odd and even length vectors") {
  CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK(median({5.0}) == doctest::Approx(5.0));
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, (double)rng.index(20) - 10.0);
    const Vec back = parse_doubles(fmt_g17(v));
    REQUIRE(back.size() == 1);
    CHECK(back[0] == v);
  }
  CHECK_THROWS_AS((void)parse_doubles("1.0,junk"), InvalidArgumentError);
}
