#include "affgd/quadratic.hpp"

#include <memory>

#include "affgd/errors.hpp"

namespace affgd {

Objective quadratic_objective(Matrix m, Vec b) {
  if (!m.is_square()) throw InvalidArgumentError("quadratic_objective: matrix not square");
  if (b.size() != m.rows)
    throw InvalidArgumentError("quadratic_objective: linear term dimension mismatch");
  if (!m.is_symmetric(1e-12))
    throw InvalidArgumentError("quadratic_objective: matrix not symmetric");
  const SymEig eig = sym_eig(m);
  const double lmax = eig.values.empty() ? 0.0 : eig.values.front();
  const double lmin = eig.values.empty() ? 0.0 : eig.values.back();
  if (lmin < -1e-10 * std::max(1.0, lmax))
    throw InvalidArgumentError("quadratic_objective: matrix has a negative eigenvalue");

  auto mat = std::make_shared<Matrix>(std::move(m));
  auto lin = std::make_shared<Vec>(std::move(b));

  Objective obj;
  obj.dim = mat->rows;
  obj.value_fn = [mat, lin](const Vec& x) {
    const Vec mx = matvec(*mat, x);
    return 0.5 * dot(x, mx) + dot(*lin, x);
  };
  obj.gradient_fn = [mat, lin](const Vec& x) {
    Vec g = matvec(*mat, x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += (*lin)[i];
    return g;
  };
  obj.value_grad_fn = [mat, lin](const Vec& x, Vec& g) {
    const Vec mx = matvec(*mat, x);
    g.resize(x.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = mx[i] + (*lin)[i];
    return 0.5 * dot(x, mx) + dot(*lin, x);
  };
  obj.smoothness = lmax;
  obj.hessian = *mat;
  obj.linear_term = *lin;
  return obj;
}

}  // namespace affgd
