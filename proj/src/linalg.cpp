#include "affgd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "affgd/errors.hpp"

namespace affgd {

double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double nrm2(const Vec& x) { return std::sqrt(dot(x, x)); }

double linf_norm(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double dist(const Vec& x, const Vec& y) { return std::sqrt(dist2(x, y)); }

double dist2(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

Vec axpy(double a, const Vec& x, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + y[i];
  return r;
}

Vec scaled(double a, const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
  return r;
}

Vec sub(const Vec& x, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool Matrix::is_symmetric(double tol) const {
  if (!is_square()) return false;
  const double scale = std::max(1.0, frobenius());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i + 1; j < cols; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * scale) return false;
  return true;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

Vec matvec(const Matrix& m, const Vec& x) {
  if (x.size() != m.cols) throw InvalidArgumentError("matvec: dimension mismatch");
  Vec r(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

SymEig sym_eig(const Matrix& a) {
  if (!a.is_square()) throw InvalidArgumentError("sym_eig: matrix must be square");
  const std::size_t n = a.rows;
  Matrix d = a;
  // Work on the symmetrized copy so tiny asymmetries cannot stall the sweep.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (d(i, j) + d(j, i));
      d(i, j) = d(j, i) = avg;
    }
  Matrix v = Matrix::identity(n);
  const double scale = std::max(d.frobenius(), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += d(p, q) * d(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = d(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double dip = d(i, p), diq = d(i, q);
          d(i, p) = c * dip - s * diq;
          d(i, q) = s * dip + c * diq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double dpi = d(p, i), dqi = d(q, i);
          d(p, i) = c * dpi - s * dqi;
          d(q, i) = s * dpi + c * dqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d(i, i) > d(j, j); });
  SymEig out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = d(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

double sym_lambda_max(const Matrix& a) {
  const SymEig e = sym_eig(a);
  return e.values.empty() ? 0.0 : e.values.front();
}

Vec solve_sym_psd(const Matrix& a, const Vec& rhs, double rel_tol) {
  if (rhs.size() != a.rows) throw InvalidArgumentError("solve_sym_psd: dimension mismatch");
  const SymEig e = sym_eig(a);
  const double lmax = e.values.empty() ? 0.0 : std::abs(e.values.front());
  const double cutoff = rel_tol * std::max(lmax, 1e-300);
  const std::size_t n = a.rows;
  Vec x(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double lam = e.values[c];
    if (lam <= cutoff) continue;
    double proj = 0.0;
    for (std::size_t r = 0; r < n; ++r) proj += e.vectors(r, c) * rhs[r];
    const double coeff = proj / lam;
    for (std::size_t r = 0; r < n; ++r) x[r] += coeff * e.vectors(r, c);
  }
  const Vec res = sub(matvec(a, x), rhs);
  const double res_norm = nrm2(res);
  if (res_norm > 1e-8 * std::max(1.0, nrm2(rhs)))
    throw ConvergenceError("solve_sym_psd: rhs not in range of the matrix", x,
                           res_norm, res_norm);
  return x;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace affgd
