#include "mep/ortho.hpp"

#include <Eigen/SVD>

namespace mep {

ExpandResult rgs_expand(const Matrix& u, const Vector& v) {
  const double vnorm = v.norm();
  if (vnorm == 0.0) throw DimensionError("rgs_expand: zero input vector");
  if (u.rows() > 0 && u.rows() != v.size())
    throw DimensionError("rgs_expand: row dimension mismatch");

  Vector w = v;
  for (int pass = 0; pass < 2; ++pass)
    if (u.cols() > 0) w -= u * (u.adjoint() * w);
  const double wnorm = w.norm();
  if (wnorm <= 1e-12 * vnorm) return {u, false};

  Matrix out(v.size(), u.cols() + 1);
  out.leftCols(u.cols()) = u;
  out.col(u.cols()) = w / wnorm;
  return {out, true};
}

Matrix orthonormalize(const Matrix& m, double drop_tol) {
  Matrix q(m.rows(), 0);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Vector v = m.col(j);
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      if (q.cols() > 0) v -= q * (q.adjoint() * v);
    const double wnorm = v.norm();
    if (wnorm <= drop_tol * vnorm) continue;
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v / wnorm;
  }
  return q;
}

Matrix svd_filter(const Matrix& f, double zeta) {
  if (f.size() == 0 || f.norm() == 0.0)
    throw DimensionError("svd_filter: zero input matrix");
  Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = zeta * sv(0);
  Eigen::Index keep = 1;  // at least one column
  while (keep < sv.size() && sv(keep) >= cutoff && sv(keep) > 0.0) ++keep;
  return svd.matrixU().leftCols(keep);
}

Matrix block_arnoldi(const BlockOp& apply_b, const BlockOp& apply_c,
                     const Matrix& f, int r, double zeta, int max_cols) {
  if (max_cols <= 0) throw DimensionError("block_arnoldi: max_cols must be positive");
  Matrix w = svd_filter(f, zeta);
  Matrix q = w;
  for (int step = 0; step < r && q.cols() < max_cols; ++step) {
    Matrix g(q.rows(), 2 * w.cols());
    g.leftCols(w.cols()) = apply_b(w);
    g.rightCols(w.cols()) = apply_c(w);
    for (int pass = 0; pass < 2; ++pass) g -= q * (q.adjoint() * g);
    if (g.norm() <= 1e-14 * std::max(1.0, q.norm())) break;
    w = svd_filter(g, zeta);
    Matrix next(q.rows(), q.cols() + w.cols());
    next.leftCols(q.cols()) = q;
    next.rightCols(w.cols()) = w;
    q = next;
  }
  if (q.cols() > max_cols) q = Matrix(q.leftCols(max_cols));
  return q;
}

}  // namespace mep
