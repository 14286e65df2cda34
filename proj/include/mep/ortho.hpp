#ifndef MEP_ORTHO_HPP
#define MEP_ORTHO_HPP

#include <functional>

#include "mep/types.hpp"

namespace mep {

/// Operator applied blockwise to a matrix of column vectors.
using BlockOp = std::function<Matrix(const Matrix&)>;

struct ExpandResult {
  Matrix basis;
  bool expanded = false;
};

/// Appends the component of v orthogonal to span(U), reorthogonalized twice
/// (repeated classical Gram-Schmidt) and normalized. If the orthogonal
/// component has norm below 1e-12*||v||, U is returned unchanged with
/// expanded=false. U may have zero columns.
ExpandResult rgs_expand(const Matrix& u, const Vector& v);

/// Orthonormal basis from the columns of m (thin QR, rank-revealing by
/// repeated Gram-Schmidt with drop tolerance).
Matrix orthonormalize(const Matrix& m, double drop_tol = 1e-12);

/// Left singular vectors of f with singular values sigma_j >= zeta*sigma_1.
/// Keeps at least one column unless f is exactly zero (error).
Matrix svd_filter(const Matrix& f, double zeta);

/// Block Arnoldi with SVD filtering: orthonormal basis for (a subspace of)
/// the generalized Krylov space spanned by F, BF, CF, B^2F, BCF, ... built
/// by r block steps of the recursion M_{l+1} = [B M_l, C M_l], SVD-filtered
/// with relative cutoff zeta at every step. Column count capped at max_cols
/// by truncating trailing columns of the final block.
Matrix block_arnoldi(const BlockOp& apply_b, const BlockOp& apply_c,
                     const Matrix& f, int r, double zeta, int max_cols);

}  // namespace mep

#endif
