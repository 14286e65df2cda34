#ifndef MEP_TENSOR_HPP
#define MEP_TENSOR_HPP

#include "mep/types.hpp"

namespace mep {

/// Kronecker product, size (rA*rB) x (cA*cB).
Matrix kron(const Matrix& a, const Matrix& b);

inline Matrix kron3(const Matrix& a, const Matrix& b, const Matrix& c) {
  return kron(a, kron(b, c));
}

/// Dense order-3 tensor. Entry (i1,i2,i3) is stored at flat index
/// i1*n2*n3 + i2*n3 + i3, so that the flat data equals
/// vec(x1 (o) x2 (o) x3) = kron(x1, kron(x2, x3)) for rank-1 tensors
/// (third index fastest). This vec ordering is used everywhere.
struct Tensor3 {
  std::array<int, 3> dims{0, 0, 0};
  Vector data;

  Tensor3() = default;
  Tensor3(int n1, int n2, int n3) : dims{n1, n2, n3} {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0)
      throw DimensionError("Tensor3: dims must be positive");
    data = Vector::Zero(static_cast<Eigen::Index>(n1) * n2 * n3);
  }

  Complex& operator()(int i, int j, int k) {
    return data(static_cast<Eigen::Index>(i) * dims[1] * dims[2] +
                static_cast<Eigen::Index>(j) * dims[2] + k);
  }
  Complex operator()(int i, int j, int k) const {
    return data(static_cast<Eigen::Index>(i) * dims[1] * dims[2] +
                static_cast<Eigen::Index>(j) * dims[2] + k);
  }
};

inline Vector vec(const Tensor3& t) { return t.data; }

Tensor3 unvec(const Vector& v, int n1, int n2, int n3);

/// j-mode product: replaces dims[mode-1] by the row count of m.
/// Satisfies vec(T x1 A x2 B x3 C) = kron3(A,B,C) * vec(T).
Tensor3 mode_mul(const Tensor3& t, const Matrix& m, int mode);

/// Matricization: mode-j unfolding with rows indexed by the mode-j index.
Matrix unfold(const Tensor3& t, int mode);

}  // namespace mep

#endif
