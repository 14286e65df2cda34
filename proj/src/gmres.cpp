#include "mep/gmres.hpp"

#include <cmath>
#include <vector>

namespace mep {

GmresResult gmres(const VecOp& apply, const Vector& rhs,
                  const std::optional<VecOp>& precond, int max_steps,
                  double tol) {
  if (max_steps < 1) throw DimensionError("gmres: max_steps must be positive");
  const Eigen::Index n = rhs.size();
  if (n == 0 || rhs.norm() == 0.0)
    throw DimensionError("gmres: rhs must be nonzero");

  auto prec = [&](const Vector& v) { return precond ? (*precond)(v) : v; };

  GmresResult res;
  const Vector b = prec(rhs);
  const double beta = b.norm();
  if (beta == 0.0) {
    res.x = Vector::Zero(n);
    res.breakdown = true;
    res.rel_residual = 1.0;
    return res;
  }

  const int m = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
  std::vector<Vector> basis;
  basis.reserve(m + 1);
  basis.push_back(b / beta);

  Matrix h = Matrix::Zero(m + 1, m);
  // Givens rotations for the progressive least-squares solve.
  std::vector<Complex> cs(m), sn(m);
  Vector g = Vector::Zero(m + 1);
  g(0) = beta;

  int k = 0;
  for (; k < m; ++k) {
    Vector w = prec(apply(basis[k]));
    for (int i = 0; i <= k; ++i) {
      h(i, k) = basis[i].dot(w);
      w -= h(i, k) * basis[i];
    }
    // one reorthogonalization pass
    for (int i = 0; i <= k; ++i) {
      const Complex c = basis[i].dot(w);
      h(i, k) += c;
      w -= c * basis[i];
    }
    h(k + 1, k) = w.norm();

    // apply previous rotations to the new column
    for (int i = 0; i < k; ++i) {
      const Complex t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
      h(i + 1, k) = -std::conj(sn[i]) * h(i, k) + std::conj(cs[i]) * h(i + 1, k);
      h(i, k) = t;
    }
    const double a0 = std::abs(h(k, k));
    const double a1 = std::abs(h(k + 1, k));
    const double rho = std::hypot(a0, a1);
    if (rho == 0.0) {
      res.breakdown = true;
      break;
    }
    {
      // complex Givens zeroing h(k+1,k)
      if (a0 == 0.0) {
        cs[k] = 0.0;
        sn[k] = 1.0;
      } else {
        cs[k] = a0 / rho;
        sn[k] = (h(k, k) / a0) * std::conj(h(k + 1, k)) / rho;
      }
      const Complex t = cs[k] * h(k, k) + sn[k] * h(k + 1, k);
      h(k + 1, k) = 0.0;
      h(k, k) = t;
    }
    g(k + 1) = -std::conj(sn[k]) * g(k);
    g(k) = cs[k] * g(k);

    const double rel = std::abs(g(k + 1)) / beta;
    if (a1 <= 1e-14 * beta) {
      // lucky or exact breakdown: subspace is invariant
      ++k;
      res.breakdown = rel > tol;
      break;
    }
    basis.push_back(w / a1);
    if (rel <= tol) {
      ++k;
      break;
    }
  }

  // back-substitute y from the k x k triangular system
  Vector y = Vector::Zero(k);
  for (int i = k - 1; i >= 0; --i) {
    Complex s = g(i);
    for (int j = i + 1; j < k; ++j) s -= h(i, j) * y(j);
    y(i) = s / h(i, i);
  }
  Vector x = Vector::Zero(n);
  for (int i = 0; i < k; ++i) x += y(i) * basis[i];

  res.x = x;
  res.steps = k;
  res.rel_residual = (b - prec(apply(x))).norm() / beta;
  return res;
}

}  // namespace mep
