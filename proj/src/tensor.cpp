#include "mep/tensor.hpp"

namespace mep {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Tensor3 unvec(const Vector& v, int n1, int n2, int n3) {
  if (v.size() != static_cast<Eigen::Index>(n1) * n2 * n3)
    throw DimensionError("unvec: size mismatch");
  Tensor3 t(n1, n2, n3);
  t.data = v;
  return t;
}

Matrix unfold(const Tensor3& t, int mode) {
  const int n1 = t.dims[0], n2 = t.dims[1], n3 = t.dims[2];
  Matrix m;
  switch (mode) {
    case 1:
      m.resize(n1, static_cast<Eigen::Index>(n2) * n3);
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          for (int k = 0; k < n3; ++k) m(i, j * n3 + k) = t(i, j, k);
      break;
    case 2:
      m.resize(n2, static_cast<Eigen::Index>(n1) * n3);
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          for (int k = 0; k < n3; ++k) m(j, i * n3 + k) = t(i, j, k);
      break;
    case 3:
      m.resize(n3, static_cast<Eigen::Index>(n1) * n2);
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          for (int k = 0; k < n3; ++k) m(k, i * n2 + j) = t(i, j, k);
      break;
    default:
      throw DimensionError("unfold: mode must be 1, 2 or 3");
  }
  return m;
}

Tensor3 mode_mul(const Tensor3& t, const Matrix& m, int mode) {
  if (mode < 1 || mode > 3) throw DimensionError("mode_mul: mode must be 1, 2 or 3");
  if (m.cols() != t.dims[mode - 1])
    throw DimensionError("mode_mul: matrix column count must match tensor dim");
  const int n1 = t.dims[0], n2 = t.dims[1], n3 = t.dims[2];
  const int p = static_cast<int>(m.rows());
  Tensor3 out(mode == 1 ? p : n1, mode == 2 ? p : n2, mode == 3 ? p : n3);
  switch (mode) {
    case 1:
      for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n3; ++k)
          for (int r = 0; r < p; ++r) {
            Complex s = 0.0;
            for (int i = 0; i < n1; ++i) s += m(r, i) * t(i, j, k);
            out(r, j, k) = s;
          }
      break;
    case 2:
      for (int i = 0; i < n1; ++i)
        for (int k = 0; k < n3; ++k)
          for (int r = 0; r < p; ++r) {
            Complex s = 0.0;
            for (int j = 0; j < n2; ++j) s += m(r, j) * t(i, j, k);
            out(i, r, k) = s;
          }
      break;
    case 3:
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          for (int r = 0; r < p; ++r) {
            Complex s = 0.0;
            for (int k = 0; k < n3; ++k) s += m(r, k) * t(i, j, k);
            out(i, j, r) = s;
          }
      break;
  }
  return out;
}

}  // namespace mep
