#include "mep/problem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <random>

#include "mep/tensor.hpp"

namespace mep {

void ThreeParamProblem::validate() const {
  for (int i = 0; i < 3; ++i) {
    const Eigen::Index n = A[i].rows();
    if (n == 0 || A[i].cols() != n) throw DimensionError("problem: A_i must be square");
    for (const Matrix* m : {&B[i], &C[i], &D[i]})
      if (m->rows() != n || m->cols() != n)
        throw DimensionError("problem: size mismatch across coefficient matrices");
    for (const Matrix* m : {&A[i], &B[i], &C[i], &D[i]})
      if (!m->allFinite()) throw MepError("problem: non-finite entries");
  }
}

namespace {

// permutations of (0,1,2) with signs; column picks per row
constexpr int kPerm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                             {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
constexpr double kSign[6] = {1, 1, 1, -1, -1, -1};

// column layouts of the four operator determinants: which coefficient
// (0=A,1=B,2=C,3=D) sits in each of the three determinant columns
constexpr int kCols[4][3] = {{1, 2, 3}, {0, 2, 3}, {1, 0, 3}, {1, 2, 0}};

const Matrix& coeff(const ThreeParamProblem& p, int row, int which) {
  switch (which) {
    case 0: return p.A[row];
    case 1: return p.B[row];
    case 2: return p.C[row];
    default: return p.D[row];
  }
}

Matrix delta_of(const ThreeParamProblem& p, int which) {
  const auto& cols = kCols[which];
  Matrix out;
  for (int s = 0; s < 6; ++s) {
    Matrix term = kSign[s] * kron3(coeff(p, 0, cols[kPerm[s][0]]),
                                   coeff(p, 1, cols[kPerm[s][1]]),
                                   coeff(p, 2, cols[kPerm[s][2]]));
    if (out.size() == 0)
      out = std::move(term);
    else
      out += term;
  }
  return out;
}

}  // namespace

DeltaSet build_deltas(const ThreeParamProblem& p, Eigen::Index size_cap) {
  p.validate();
  if (p.product_size() > size_cap)
    throw MepError("build_deltas: n1*n2*n3 exceeds size cap");
  DeltaSet d;
  d.d0 = delta_of(p, 0);
  d.d1 = delta_of(p, 1);
  d.d2 = delta_of(p, 2);
  d.d3 = delta_of(p, 3);
  return d;
}

Complex decomposable_form(const std::array<Vector, 3>& y,
                          const ThreeParamProblem& p, int which,
                          const std::array<Vector, 3>& x) {
  if (which < 0 || which > 3) throw DimensionError("decomposable_form: which in 0..3");
  const auto n = p.sizes();
  for (int i = 0; i < 3; ++i)
    if (y[i].size() != n[i] || x[i].size() != n[i])
      throw DimensionError("decomposable_form: component dimension mismatch");
  Complex m[3][3];
  const auto& cols = kCols[which];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m[i][j] = y[i].dot(coeff(p, i, cols[j]) * x[i]);
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

EigenTriple rayleigh_triple(const ThreeParamProblem& p,
                            const std::array<Vector, 3>& x) {
  const Complex d0 = decomposable_form(x, p, 0, x);
  const Complex d1 = decomposable_form(x, p, 1, x);
  const Complex d2 = decomposable_form(x, p, 2, x);
  const Complex d3 = decomposable_form(x, p, 3, x);
  const double scale = std::max(
      {std::abs(d0), std::abs(d1), std::abs(d2), std::abs(d3), 1e-300});
  if (std::abs(d0) <= 1e-14 * scale)
    throw SingularityError("rayleigh_triple: Delta_0 form numerically zero");
  return {d1 / d0, d2 / d0, d3 / d0};
}

ResidualNorms residual(const ThreeParamProblem& p, const EigenTriple& value,
                       const std::array<Vector, 3>& x) {
  ResidualNorms r;
  double tot = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double nj =
        (p.pencil(j, value.lambda, value.mu, value.eta) * x[j]).norm();
    r.per_equation[j] = nj;
    tot += nj * nj;
  }
  r.total = std::sqrt(tot);
  return r;
}

double selection_ratio(const std::array<Vector, 3>& candidate,
                       const std::vector<EigenPair>& locked,
                       const ThreeParamProblem& p) {
  double worst = 0.0;
  for (const auto& pair : locked) {
    if (!pair.has_left())
      throw MepError("selection_ratio: locked pair lacks left eigenvector");
    const Complex den = decomposable_form(pair.left, p, 0, pair.right);
    if (std::abs(den) == 0.0)
      throw SingularityError("selection_ratio: zero diagonal Delta_0 form for a locked pair");
    const Complex num = decomposable_form(pair.left, p, 0, candidate);
    worst = std::max(worst, std::abs(num) / std::abs(den));
  }
  return worst;
}

namespace {

// Rank-1 component extraction from a Delta-eigenvector: dominant left
// singular vectors of the three unfoldings. Returns the relative rank-1
// defect (second singular value ratio of the mode-1 unfolding).
double extract_components(const Vector& z, const std::array<int, 3>& n,
                          std::array<Vector, 3>& x) {
  const Tensor3 t = unvec(z, n[0], n[1], n[2]);
  double defect = 0.0;
  for (int mode = 1; mode <= 3; ++mode) {
    Matrix unf = unfold(t, mode);
    Eigen::JacobiSVD<Matrix> svd(unf, Eigen::ComputeThinU);
    x[mode - 1] = svd.matrixU().col(0);
    if (mode == 1 && svd.singularValues().size() > 1 &&
        svd.singularValues()(0) > 0.0)
      defect = svd.singularValues()(1) / svd.singularValues()(0);
  }
  return defect;
}

}  // namespace

std::vector<EigenPair> solve_direct(const ThreeParamProblem& p,
                                    const DirectOptions& opt) {
  const DeltaSet d = build_deltas(p, opt.size_cap);
  const Eigen::Index bign = d.d0.rows();

  Eigen::PartialPivLU<Matrix> lu(d.d0);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || 1.0 / rc > opt.cond_gate)
    throw SingularityError("solve_direct: Delta_0 singular or ill-conditioned");

  std::mt19937_64 rng(opt.xi_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_xi = [&] {
    Eigen::Vector3cd xi;
    for (int i = 0; i < 3; ++i) xi(i) = Complex(gauss(rng), gauss(rng));
    xi /= xi.norm();
    return xi;
  };

  const Matrix g1 = lu.solve(d.d1), g2 = lu.solve(d.d2), g3 = lu.solve(d.d3);

  Eigen::ComplexEigenSolver<Matrix> es;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Eigen::Vector3cd xi = draw_xi();
    const Matrix gamma = xi(0) * g1 + xi(1) * g2 + xi(2) * g3;
    es.compute(gamma);
    if (es.info() != Eigen::Success)
      throw MepError("solve_direct: eigendecomposition failed");

    // collision check on the combination eigenvalues
    std::vector<Complex> evs(es.eigenvalues().data(),
                             es.eigenvalues().data() + bign);
    std::sort(evs.begin(), evs.end(), [](Complex a, Complex b) {
      return std::real(a) != std::real(b) ? std::real(a) < std::real(b)
                                          : std::imag(a) < std::imag(b);
    });
    double scale = 0.0;
    for (Complex e : evs) scale = std::max(scale, std::abs(e));
    bool collision = false;
    for (size_t i = 0; i + 1 < evs.size(); ++i)
      if (std::abs(evs[i + 1] - evs[i]) < 1e-10 * std::max(scale, 1.0)) {
        collision = true;
        break;
      }
    if (!collision) break;
    if (attempt == 1)
      throw SingularityError("solve_direct: defective random combination after redraw");
  }

  const auto n = p.sizes();
  std::vector<EigenPair> out;
  out.reserve(bign);
  for (Eigen::Index i = 0; i < bign; ++i) {
    const Vector z = es.eigenvectors().col(i);
    EigenPair pair;
    pair.value.lambda = z.dot(g1 * z) / z.squaredNorm();
    pair.value.mu = z.dot(g2 * z) / z.squaredNorm();
    pair.value.eta = z.dot(g3 * z) / z.squaredNorm();
    extract_components(z, n, pair.right);
    pair.residual_norm = residual(p, pair.value, pair.right).total;
    out.push_back(std::move(pair));
  }
  return out;
}

ThreeParamProblem project(const ThreeParamProblem& p, const Matrix& u1,
                          const Matrix& u2, const Matrix& u3) {
  const Matrix* us[3] = {&u1, &u2, &u3};
  ThreeParamProblem q;
  for (int i = 0; i < 3; ++i) {
    const Matrix& u = *us[i];
    if (u.rows() != p.A[i].rows() || u.cols() > u.rows())
      throw DimensionError("project: basis dimension mismatch");
    q.A[i] = u.adjoint() * p.A[i] * u;
    q.B[i] = u.adjoint() * p.B[i] * u;
    q.C[i] = u.adjoint() * p.C[i] * u;
    q.D[i] = u.adjoint() * p.D[i] * u;
  }
  return q;
}

ThreeParamProblem shift_substitute(const ThreeParamProblem& p, Complex eta_tar,
                                   Complex lambda_shift) {
  ThreeParamProblem q = p;
  for (int i = 0; i < 3; ++i)
    q.A[i] = p.A[i] + lambda_shift * p.B[i] - eta_tar * p.D[i];
  return q;
}

ThreeParamProblem precondition_inverse_A(const ThreeParamProblem& p,
                                         double cond_gate) {
  ThreeParamProblem q;
  for (int i = 0; i < 3; ++i) {
    Eigen::PartialPivLU<Matrix> lu(p.A[i]);
    const double rc = lu.rcond();
    if (!(rc > 0.0) || 1.0 / rc > cond_gate)
      throw SingularityError("precondition_inverse_A: A_j singular or ill-conditioned");
    q.A[i] = Matrix::Identity(p.A[i].rows(), p.A[i].cols());
    q.B[i] = lu.solve(p.B[i]);
    q.C[i] = lu.solve(p.C[i]);
    q.D[i] = lu.solve(p.D[i]);
  }
  return q;
}

std::array<Vector, 3> left_eigenvector(const ThreeParamProblem& p,
                                       const EigenTriple& value) {
  std::array<Vector, 3> y;
  for (int j = 0; j < 3; ++j) {
    const Matrix m = p.pencil(j, value.lambda, value.mu, value.eta);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin > 1e-4 * p.A[j].norm())
      throw MepError("left_eigenvector: value is not an eigenvalue");
    y[j] = svd.matrixU().col(sv.size() - 1);
  }
  return y;
}

}  // namespace mep
