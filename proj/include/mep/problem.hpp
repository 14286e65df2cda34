#ifndef MEP_PROBLEM_HPP
#define MEP_PROBLEM_HPP

#include "mep/types.hpp"

namespace mep {

/// Algebraic 3-parameter eigenvalue problem
///   A_i x_i = lambda B_i x_i + mu C_i x_i + eta D_i x_i,  i = 1,2,3.
struct ThreeParamProblem {
  std::array<Matrix, 3> A, B, C, D;

  std::array<int, 3> sizes() const {
    return {static_cast<int>(A[0].rows()), static_cast<int>(A[1].rows()),
            static_cast<int>(A[2].rows())};
  }
  Eigen::Index product_size() const {
    return A[0].rows() * A[1].rows() * A[2].rows();
  }
  /// Pencil evaluation A_i - l B_i - m C_i - e D_i.
  Matrix pencil(int i, Complex l, Complex m, Complex e) const {
    return A[i] - l * B[i] - m * C[i] - e * D[i];
  }
  void validate() const;
};

/// Explicit operator-determinant matrices of size n1*n2*n3.
struct DeltaSet {
  Matrix d0, d1, d2, d3;
  const Matrix& operator[](int i) const {
    switch (i) {
      case 0: return d0;
      case 1: return d1;
      case 2: return d2;
      default: return d3;
    }
  }
};

/// Six-term signed Kronecker expansions of the 3x3 operator determinants.
/// Throws when n1*n2*n3 exceeds size_cap.
DeltaSet build_deltas(const ThreeParamProblem& p, Eigen::Index size_cap = 20000);

/// (y1 (o) y2 (o) y3)^H Delta_which (x1 (o) x2 (o) x3) evaluated as the 3x3
/// scalar determinant with rows y_i^H {A|B|C|D}_i x_i; never forms Kronecker
/// products.
Complex decomposable_form(const std::array<Vector, 3>& y,
                          const ThreeParamProblem& p, int which,
                          const std::array<Vector, 3>& x);

/// Tensor Rayleigh quotient: ratios of the Delta_i and Delta_0 decomposable
/// forms at x. Throws SingularityError when the Delta_0 form vanishes.
EigenTriple rayleigh_triple(const ThreeParamProblem& p,
                            const std::array<Vector, 3>& x);

struct ResidualNorms {
  std::array<double, 3> per_equation{0, 0, 0};
  double total = 0.0;
};

ResidualNorms residual(const ThreeParamProblem& p, const EigenTriple& value,
                       const std::array<Vector, 3>& x);

/// Deflation ratio: max over locked pairs of
/// |y_q^H Delta_0 u| / |y_q^H Delta_0 x_q| (decomposable forms); 0 for an
/// empty list. Locked pairs must carry left eigenvectors.
double selection_ratio(const std::array<Vector, 3>& candidate,
                       const std::vector<EigenPair>& locked,
                       const ThreeParamProblem& p);

struct DirectOptions {
  Eigen::Index size_cap = 20000;
  double cond_gate = 1e12;
  uint64_t xi_seed = 0x5eed3d1;  // fixed: reproducible combination draw
};

/// Direct (oracle-grade) solver: eigendecomposition of
/// Delta_0^{-1} (xi_1 Delta_1 + xi_2 Delta_2 + xi_3 Delta_3) for a fixed
/// random unit combination, eigenvalue recovery by Rayleigh quotients and
/// component extraction by dominant singular vectors of the unfoldings.
/// Returns all n1*n2*n3 eigenpairs (no left vectors).
std::vector<EigenPair> solve_direct(const ThreeParamProblem& p,
                                    const DirectOptions& opt = {});

/// Compress all twelve matrices as U_j^H M U_j.
ThreeParamProblem project(const ThreeParamProblem& p, const Matrix& u1,
                          const Matrix& u2, const Matrix& u3);

/// A_j <- A_j + lambda_shift B_j - eta_tar D_j. Eigenvalues map exactly by
/// (lambda, mu, eta) -> (lambda + lambda_shift, mu, eta - eta_tar).
ThreeParamProblem shift_substitute(const ThreeParamProblem& p, Complex eta_tar,
                                   Complex lambda_shift);

/// Left-multiply each equation by A_j^{-1} (new A_j = I); spectrum unchanged.
ThreeParamProblem precondition_inverse_A(const ThreeParamProblem& p,
                                         double cond_gate = 1e12);

/// Unit left eigenvector components: smallest-singular-value left singular
/// vectors of the pencil evaluations. Throws when the smallest singular value
/// exceeds 1e-4 * ||A_j||.
std::array<Vector, 3> left_eigenvector(const ThreeParamProblem& p,
                                       const EigenTriple& value);

}  // namespace mep

#endif
