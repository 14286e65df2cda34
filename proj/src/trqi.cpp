#include "mep/trqi.hpp"

#include <Eigen/LU>

namespace mep {

Vector trqi_function(const ThreeParamProblem& p, const std::array<Vector, 3>& x,
                     const EigenTriple& value,
                     const std::array<Vector, 3>& anchors) {
  const auto n = p.sizes();
  Vector f(n[0] + n[1] + n[2] + 3);
  Eigen::Index off = 0;
  for (int j = 0; j < 3; ++j) {
    f.segment(off, n[j]) = p.pencil(j, value.lambda, value.mu, value.eta) * x[j];
    off += n[j];
  }
  for (int j = 0; j < 3; ++j) f(off + j) = anchors[j].dot(x[j]) - 1.0;
  return f;
}

Matrix trqi_jacobian(const ThreeParamProblem& p, const std::array<Vector, 3>& x,
                     const EigenTriple& value,
                     const std::array<Vector, 3>& anchors) {
  const auto n = p.sizes();
  const Eigen::Index dim = n[0] + n[1] + n[2] + 3;
  Matrix jac = Matrix::Zero(dim, dim);
  Eigen::Index off = 0;
  for (int j = 0; j < 3; ++j) {
    jac.block(off, off, n[j], n[j]) =
        p.pencil(j, value.lambda, value.mu, value.eta);
    jac.block(off, n[0] + n[1] + n[2] + 0, n[j], 1) = -p.B[j] * x[j];
    jac.block(off, n[0] + n[1] + n[2] + 1, n[j], 1) = -p.C[j] * x[j];
    jac.block(off, n[0] + n[1] + n[2] + 2, n[j], 1) = -p.D[j] * x[j];
    off += n[j];
  }
  off = 0;
  for (int j = 0; j < 3; ++j) {
    jac.block(n[0] + n[1] + n[2] + j, off, 1, n[j]) =
        anchors[j].adjoint();
    off += n[j];
  }
  return jac;
}

std::array<Vector, 3> trqi_step(const ThreeParamProblem& p,
                                const std::array<Vector, 3>& x,
                                EigenTriple* value_at_input) {
  const EigenTriple val = rayleigh_triple(p, x);
  if (value_at_input) *value_at_input = val;

  const Matrix jac = trqi_jacobian(p, x, val, x);
  const Vector f = trqi_function(p, x, val, x);

  Eigen::PartialPivLU<Matrix> lu(jac);
  double scale = jac.cwiseAbs().maxCoeff();
  double minpiv = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (minpiv <= 1e-14 * std::max(scale, 1e-300))
    throw SingularityError("trqi_step: singular Jacobian");
  const Vector delta = lu.solve(-f);

  const auto n = p.sizes();
  std::array<Vector, 3> out;
  Eigen::Index off = 0;
  for (int j = 0; j < 3; ++j) {
    out[j] = x[j] + delta.segment(off, n[j]);
    const double nn = out[j].norm();
    if (nn == 0.0) throw SingularityError("trqi_step: zero update");
    out[j] /= nn;
    off += n[j];
  }
  return out;
}

TrqiOutcome trqi(const ThreeParamProblem& p, const std::array<Vector, 3>& x0,
                 int max_steps, double tol) {
  TrqiOutcome out;
  std::array<Vector, 3> x = x0;
  for (auto& v : x) v /= v.norm();

  auto evaluate = [&](const std::array<Vector, 3>& xs, EigenTriple& val,
                      double& res) -> bool {
    try {
      val = rayleigh_triple(p, xs);
    } catch (const SingularityError&) {
      return false;
    }
    res = residual(p, val, xs).total;
    return true;
  };

  EigenTriple val;
  double res = 0.0;
  if (!evaluate(x, val, res)) {
    out.pair.right = x;
    out.converged = false;
    return out;
  }
  out.residual_history.push_back(res);
  const double res0 = res;

  for (int step = 0; step < max_steps; ++step) {
    if (res <= tol) break;
    std::array<Vector, 3> next;
    try {
      next = trqi_step(p, x);
    } catch (const SingularityError&) {
      break;
    }
    EigenTriple nval;
    double nres = 0.0;
    if (!evaluate(next, nval, nres)) break;
    x = next;
    val = nval;
    res = nres;
    out.residual_history.push_back(res);
    ++out.steps_taken;
    if (res > 1e6 * std::max(res0, 1e-300)) break;  // divergence guard
  }

  out.pair.value = val;
  out.pair.right = x;
  out.pair.residual_norm = res;
  out.converged = res <= tol;
  return out;
}

}  // namespace mep
