#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "mep/discretize.hpp"
#include "mep/ortho.hpp"
#include "mep/problem.hpp"
#include "mep/tensor.hpp"
#include "test_util.hpp"

using namespace mep;
using testutil::random_matrix;
using testutil::random_problem;
using testutil::random_unit;

namespace {

// independent oracle: cofactor expansion of the 3x3 kron-determinant
Matrix delta_cofactor(const ThreeParamProblem& p, int which) {
  // columns of the determinant: replace column `which-1` of [B C D] by A
  std::array<const std::array<Matrix, 3>*, 3> cols = {&p.B, &p.C, &p.D};
  if (which > 0) cols[which - 1] = &p.A;
  auto m = [&](int row, int col) -> const Matrix& { return (*cols[col])[row]; };
  Matrix minor0 = kron(m(1, 1), m(2, 2)) - kron(m(1, 2), m(2, 1));
  Matrix minor1 = kron(m(1, 0), m(2, 2)) - kron(m(1, 2), m(2, 0));
  Matrix minor2 = kron(m(1, 0), m(2, 1)) - kron(m(1, 1), m(2, 0));
  return kron(m(0, 0), minor0) - kron(m(0, 1), minor1) + kron(m(0, 2), minor2);
}

std::array<Vector, 3> exact_right(const RandomDiagProblem& rd, int i1, int i2,
                                  int i3) {
  std::array<Vector, 3> x;
  const int idx[3] = {i1, i2, i3};
  for (int j = 0; j < 3; ++j) {
    Vector e = Vector::Zero(rd.V[j].rows());
    e(idx[j]) = 1.0;
    x[j] = rd.V[j].partialPivLu().solve(e);
    x[j] /= x[j].norm();
  }
  return x;
}

std::array<Vector, 3> exact_left(const RandomDiagProblem& rd, int i1, int i2,
                                 int i3) {
  std::array<Vector, 3> y;
  const int idx[3] = {i1, i2, i3};
  for (int j = 0; j < 3; ++j) {
    Vector e = Vector::Zero(rd.U[j].rows());
    e(idx[j]) = 1.0;
    y[j] = rd.U[j].adjoint().partialPivLu().solve(e);
    y[j] /= y[j].norm();
  }
  return y;
}

// greedy nearest matching; returns the largest match distance
double match_spectra(std::vector<EigenTriple> a, std::vector<EigenTriple> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& va : a) {
    double best = std::numeric_limits<double>::infinity();
    size_t at = 0;
    for (size_t i = 0; i < b.size(); ++i) {
      if (used[i]) continue;
      const double d = va.dist_max(b[i]);
      if (d < best) {
        best = d;
        at = i;
      }
    }
    used[at] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("build_deltas: identical columns give a zero Delta0") {
  ThreeParamProblem p;
  std::mt19937_64 rng(30);
  for (int i = 0; i < 3; ++i) {
    p.A[i] = random_matrix(2, 2, rng);
    p.B[i] = Matrix::Identity(2, 2);
    p.C[i] = Matrix::Identity(2, 2);
    p.D[i] = Matrix::Identity(2, 2);
  }
  CHECK(build_deltas(p).d0.norm() <= 1e-14);
}

TEST_CASE("build_deltas: scalar problem reduces to 3x3 determinants") {
  std::mt19937_64 rng(31);
  ThreeParamProblem p = random_problem(1, 1, 1, rng);
  DeltaSet ds = build_deltas(p);
  Eigen::Matrix3cd m;
  for (int r = 0; r < 3; ++r)
    m.row(r) << p.B[r](0, 0), p.C[r](0, 0), p.D[r](0, 0);
  CHECK(std::abs(ds.d0(0, 0) - m.determinant()) <= 1e-13);
  Eigen::Matrix3cd m1 = m;
  for (int r = 0; r < 3; ++r) m1(r, 0) = p.A[r](0, 0);
  CHECK(std::abs(ds.d1(0, 0) - m1.determinant()) <= 1e-13);
}

TEST_CASE("build_deltas matches the cofactor-expansion oracle") {
  std::mt19937_64 rng(32);
  ThreeParamProblem p = random_problem(2, 2, 2, rng);
  DeltaSet ds = build_deltas(p);
  for (int which = 0; which < 4; ++which) {
    Matrix oracle = delta_cofactor(p, which);
    CHECK((ds[which] - oracle).norm() <= 1e-12 * oracle.norm());
  }
}

TEST_CASE("decomposable_form: identical columns vanish") {
  ThreeParamProblem p;
  std::mt19937_64 rng(33);
  for (int i = 0; i < 3; ++i) {
    p.A[i] = random_matrix(2, 2, rng);
    p.B[i] = Matrix::Identity(2, 2);
    p.C[i] = Matrix::Identity(2, 2);
    p.D[i] = Matrix::Identity(2, 2);
  }
  std::array<Vector, 3> x = {random_unit(2, rng), random_unit(2, rng),
                             random_unit(2, rng)};
  CHECK(std::abs(decomposable_form(x, p, 0, x)) <= 1e-13);
}

TEST_CASE("decomposable_form on scalars is the literal determinant") {
  std::mt19937_64 rng(34);
  ThreeParamProblem p = random_problem(1, 1, 1, rng);
  std::array<Vector, 3> one;
  for (auto& v : one) {
    v = Vector::Ones(1);
  }
  Eigen::Matrix3cd m;
  for (int r = 0; r < 3; ++r)
    m.row(r) << p.B[r](0, 0), p.C[r](0, 0), p.D[r](0, 0);
  CHECK(std::abs(decomposable_form(one, p, 0, one) - m.determinant()) <=
        1e-13);
}

TEST_CASE("decomposable_form equals the explicit Delta bilinear form") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    ThreeParamProblem p = random_problem(2, 2, 2, rng);
    DeltaSet ds = build_deltas(p);
    std::array<Vector, 3> x = {random_unit(2, rng), random_unit(2, rng),
                               random_unit(2, rng)};
    std::array<Vector, 3> y = {random_unit(2, rng), random_unit(2, rng),
                               random_unit(2, rng)};
    Vector xk = kron3(x[0], x[1], x[2]);
    Vector yk = kron3(y[0], y[1], y[2]);
    for (int which = 0; which < 4; ++which) {
      const Complex fast = decomposable_form(y, p, which, x);
      const Complex ref = yk.dot(ds[which] * xk);
      CHECK(std::abs(fast - ref) <=
            1e-12 * std::max(1.0, ds[which].norm()));
    }
  }
}

TEST_CASE("rayleigh_triple recovers known eigenvalues exactly") {
  RandomDiagProblem rd = gen_random_diag(5, 40);
  EigenTriple truth = random_diag_eigenvalue(rd, 1, 3, 0);
  std::array<Vector, 3> x = exact_right(rd, 1, 3, 0);
  EigenTriple got = rayleigh_triple(rd.bvp.problem, x);
  CHECK(got.dist_max(truth) <= 1e-12);

  // perturbed eigenvector stays within first order of the exact value
  std::mt19937_64 rng(41);
  for (int j = 0; j < 3; ++j) {
    x[j] += 1e-8 * testutil::random_vector(5, rng);
    x[j] /= x[j].norm();
  }
  CHECK(rayleigh_triple(rd.bvp.problem, x).dist_max(truth) <= 1e-6);
}

TEST_CASE("rayleigh_triple on a scalar problem is its unique eigenvalue") {
  RandomDiagProblem rd = gen_random_diag(1, 42);
  std::array<Vector, 3> x;
  for (auto& v : x) v = Vector::Ones(1);
  CHECK(rayleigh_triple(rd.bvp.problem, x).dist_max(rd.oracle[0]) <= 1e-12);
}

TEST_CASE("residual vanishes at exact pairs and follows the definition") {
  RandomDiagProblem rd = gen_random_diag(4, 43);
  const ThreeParamProblem& p = rd.bvp.problem;
  EigenTriple truth = random_diag_eigenvalue(rd, 2, 0, 1);
  std::array<Vector, 3> x = exact_right(rd, 2, 0, 1);
  double scale = 0.0;
  for (int j = 0; j < 3; ++j) scale = std::max(scale, p.A[j].norm());
  CHECK(residual(p, truth, x).total <= 1e-12 * scale);

  // zero eigenvalue guess: residual is just ||A_j x_j||
  EigenTriple zero;
  auto rn = residual(p, zero, x);
  double expect = 0.0;
  for (int j = 0; j < 3; ++j) expect += (p.A[j] * x[j]).squaredNorm();
  CHECK(std::abs(rn.total - std::sqrt(expect)) <= 1e-12);

  // eigenvalue perturbation moves the residual by at most the coefficient norms
  EigenTriple pert = truth;
  pert.lambda += 1e-8;
  double bound = 1e-8 * (p.B[0].norm() + p.B[1].norm() + p.B[2].norm());
  CHECK(residual(p, pert, x).total <= 10.0 * bound);
}

TEST_CASE("selection_ratio: empty list, self, and cross eigenvectors") {
  RandomDiagProblem rd = gen_random_diag(4, 44);
  const ThreeParamProblem& p = rd.bvp.problem;

  std::array<Vector, 3> x1 = exact_right(rd, 0, 1, 2);
  CHECK(selection_ratio(x1, {}, p) == 0.0);

  EigenPair locked;
  locked.value = random_diag_eigenvalue(rd, 0, 1, 2);
  locked.right = x1;
  locked.left = exact_left(rd, 0, 1, 2);
  std::vector<EigenPair> lockedv = {locked};

  CHECK(std::abs(selection_ratio(x1, lockedv, p) - 1.0) <= 1e-10);

  std::array<Vector, 3> x2 = exact_right(rd, 3, 0, 1);
  CHECK(selection_ratio(x2, lockedv, p) <= 1e-8);
}

TEST_CASE("solve_direct: scalar problem solves the 3x3 system") {
  RandomDiagProblem rd = gen_random_diag(1, 45);
  auto pairs = solve_direct(rd.bvp.problem);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].value.dist_max(rd.oracle[0]) <= 1e-10);
}

TEST_CASE("solve_direct matches the known spectrum on random_diag n=5") {
  RandomDiagProblem rd = gen_random_diag(5, 46);
  auto pairs = solve_direct(rd.bvp.problem);
  REQUIRE(pairs.size() == 125);
  std::vector<EigenTriple> got;
  for (const auto& q : pairs) got.push_back(q.value);
  CHECK(match_spectra(got, rd.oracle) <= 1e-8);

  // eigenpair residuals stay at oracle grade
  double scale = 0.0;
  for (int j = 0; j < 3; ++j) scale = std::max(scale, rd.bvp.problem.A[j].norm());
  for (const auto& q : pairs)
    CHECK(residual(rd.bvp.problem, q.value, q.right).total <= 1e-8 * scale);
}

TEST_CASE("solve_direct: decoupled lambda equals a one-parameter spectrum") {
  std::mt19937_64 rng(47);
  ThreeParamProblem p;
  // equation 1 carries lambda only; equations 2 and 3 pin mu and eta
  p.A[0] = random_matrix(3, 3, rng);
  p.B[0] = Matrix::Identity(3, 3);
  p.C[0] = Matrix::Zero(3, 3);
  p.D[0] = Matrix::Zero(3, 3);
  for (int i = 1; i < 3; ++i) {
    p.A[i] = random_matrix(1, 1, rng);
    p.B[i] = Matrix::Zero(1, 1);
    p.C[i] = Matrix::Identity(1, 1) * (i == 1 ? 1.0 : 0.0);
    p.D[i] = Matrix::Identity(1, 1) * (i == 2 ? 1.0 : 0.0);
  }
  auto pairs = solve_direct(p);
  REQUIRE(pairs.size() == 3);
  Eigen::ComplexEigenSolver<Matrix> es(p.A[0]);
  std::vector<EigenTriple> got, expect;
  for (int i = 0; i < 3; ++i) {
    got.push_back(pairs[i].value);
    EigenTriple v;
    v.lambda = es.eigenvalues()(i);
    v.mu = p.A[1](0, 0);
    v.eta = p.A[2](0, 0);
    expect.push_back(v);
  }
  CHECK(match_spectra(got, expect) <= 1e-9);
}

TEST_CASE("project: identity bases are a no-op; eigenvectors reduce exactly") {
  RandomDiagProblem rd = gen_random_diag(3, 48);
  const ThreeParamProblem& p = rd.bvp.problem;
  ThreeParamProblem same =
      project(p, Matrix::Identity(3, 3), Matrix::Identity(3, 3),
              Matrix::Identity(3, 3));
  CHECK((same.A[0] - p.A[0]).norm() <= 1e-14);
  CHECK((same.D[2] - p.D[2]).norm() <= 1e-14);

  EigenTriple truth = random_diag_eigenvalue(rd, 1, 0, 2);
  std::array<Vector, 3> x = exact_right(rd, 1, 0, 2);
  ThreeParamProblem tiny = project(p, x[0], x[1], x[2]);
  std::array<Vector, 3> one;
  for (auto& v : one) v = Vector::Ones(1);
  CHECK(rayleigh_triple(tiny, one).dist_max(truth) <= 1e-10);
}

TEST_CASE("project is consistent with decomposable forms on lifted vectors") {
  std::mt19937_64 rng(49);
  ThreeParamProblem p = random_problem(4, 3, 4, rng);
  std::array<Matrix, 3> u = {orthonormalize(random_matrix(4, 2, rng)),
                             orthonormalize(random_matrix(3, 2, rng)),
                             orthonormalize(random_matrix(4, 2, rng))};
  ThreeParamProblem pp = project(p, u[0], u[1], u[2]);
  std::array<Vector, 3> s = {random_unit(2, rng), random_unit(2, rng),
                             random_unit(2, rng)};
  std::array<Vector, 3> t = {random_unit(2, rng), random_unit(2, rng),
                             random_unit(2, rng)};
  std::array<Vector, 3> ls, lt;
  for (int j = 0; j < 3; ++j) {
    ls[j] = u[j] * s[j];
    lt[j] = u[j] * t[j];
  }
  for (int which = 0; which < 4; ++which)
    CHECK(std::abs(decomposable_form(t, pp, which, s) -
                   decomposable_form(lt, p, which, ls)) <= 1e-11);
}

TEST_CASE("shift_substitute maps the spectrum affinely and exactly") {
  RandomDiagProblem rd = gen_random_diag(3, 50);
  const ThreeParamProblem& p = rd.bvp.problem;
  ThreeParamProblem same = shift_substitute(p, 0.0, 0.0);
  CHECK((same.A[1] - p.A[1]).norm() <= 1e-14);

  const Complex eta_tar = 0.7, shift = -1.3;
  ThreeParamProblem moved = shift_substitute(p, eta_tar, shift);
  auto orig = solve_direct(p);
  auto trans = solve_direct(moved);
  std::vector<EigenTriple> mapped, got;
  for (const auto& q : orig) {
    EigenTriple v = q.value;
    v.lambda += shift;
    v.eta -= eta_tar;
    mapped.push_back(v);
  }
  for (const auto& q : trans) got.push_back(q.value);
  CHECK(match_spectra(got, mapped) <= 1e-10);
}

TEST_CASE("precondition_inverse_A preserves the spectrum") {
  RandomDiagProblem rd = gen_random_diag(3, 51);
  const ThreeParamProblem& p = rd.bvp.problem;
  ThreeParamProblem pre = precondition_inverse_A(p);
  for (int j = 0; j < 3; ++j)
    CHECK((pre.A[j] - Matrix::Identity(3, 3)).norm() <= 1e-10);
  std::vector<EigenTriple> a, b;
  for (const auto& q : solve_direct(p)) a.push_back(q.value);
  for (const auto& q : solve_direct(pre)) b.push_back(q.value);
  CHECK(match_spectra(a, b) <= 1e-9);
}

TEST_CASE("precondition_inverse_A on diagonal A halves B, C, D") {
  std::mt19937_64 rng(52);
  ThreeParamProblem p = random_problem(2, 2, 2, rng);
  for (int j = 0; j < 3; ++j) p.A[j] = 2.0 * Matrix::Identity(2, 2);
  ThreeParamProblem pre = precondition_inverse_A(p);
  for (int j = 0; j < 3; ++j) {
    CHECK((pre.A[j] - Matrix::Identity(2, 2)).norm() <= 1e-14);
    CHECK((pre.B[j] - 0.5 * p.B[j]).norm() <= 1e-14);
    CHECK((pre.C[j] - 0.5 * p.C[j]).norm() <= 1e-14);
    CHECK((pre.D[j] - 0.5 * p.D[j]).norm() <= 1e-14);
  }
}

TEST_CASE("precondition_inverse_A is a no-op when A is the identity") {
  std::mt19937_64 rng(53);
  ThreeParamProblem p = random_problem(2, 2, 2, rng);
  for (int j = 0; j < 3; ++j) p.A[j] = Matrix::Identity(2, 2);
  ThreeParamProblem pre = precondition_inverse_A(p);
  for (int j = 0; j < 3; ++j) CHECK((pre.C[j] - p.C[j]).norm() <= 1e-14);
}

TEST_CASE("left_eigenvector annihilates the pencil from the left") {
  RandomDiagProblem rd = gen_random_diag(4, 54);
  const ThreeParamProblem& p = rd.bvp.problem;
  EigenTriple v = random_diag_eigenvalue(rd, 2, 3, 1);
  auto y = left_eigenvector(p, v);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(y[j].norm() - 1.0) <= 1e-12);
    CHECK((y[j].adjoint() * p.pencil(j, v.lambda, v.mu, v.eta)).norm() <=
          1e-8 * p.A[j].norm());
  }
}

TEST_CASE("left_eigenvector: scalar case and symmetric case") {
  RandomDiagProblem rd1 = gen_random_diag(1, 55);
  auto y1 = left_eigenvector(rd1.bvp.problem, rd1.oracle[0]);
  CHECK(std::abs(std::abs(y1[0](0)) - 1.0) <= 1e-12);

  // Hermitian problem with a real eigenvalue: left equals right
  std::mt19937_64 rng(56);
  ThreeParamProblem p;
  for (int j = 0; j < 3; ++j) {
    Matrix m = testutil::random_matrix(3, 3, rng);
    p.A[j] = m + m.adjoint();
    p.B[j] = Matrix::Identity(3, 3) * (j == 0 ? 1.0 : 0.0);
    p.C[j] = Matrix::Identity(3, 3) * (j == 1 ? 1.0 : 0.0);
    p.D[j] = Matrix::Identity(3, 3) * (j == 2 ? 1.0 : 0.0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es0(p.A[0]), es1(p.A[1]), es2(p.A[2]);
  EigenTriple v{es0.eigenvalues()(0), es1.eigenvalues()(0),
                es2.eigenvalues()(0)};
  auto y = left_eigenvector(p, v);
  std::array<Vector, 3> x = {es0.eigenvectors().col(0),
                             es1.eigenvectors().col(0),
                             es2.eigenvectors().col(0)};
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(std::abs(y[j].dot(x[j])) - 1.0) <= 1e-8);
}

TEST_CASE("left_eigenvector rejects a value far from the spectrum") {
  RandomDiagProblem rd = gen_random_diag(3, 57);
  EigenTriple bogus{1e6, -1e6, 1e6};
  CHECK_THROWS_AS(left_eigenvector(rd.bvp.problem, bogus), MepError);
}

TEST_CASE("Delta0-inverse Deltas commute") {
  std::mt19937_64 rng(58);
  for (int trial = 0; trial < 20; ++trial) {
    ThreeParamProblem p = random_problem(2, 2, 2, rng);
    DeltaSet ds = build_deltas(p);
    Eigen::PartialPivLU<Matrix> lu(ds.d0);
    const double rc = lu.rcond();
    if (!(rc > 0.0) || 1.0 / rc > 1e10) continue;  // skip near-singular draws
    Matrix g1 = lu.solve(ds.d1), g2 = lu.solve(ds.d2), g3 = lu.solve(ds.d3);
    const double scale =
        std::max({g1.norm() * g2.norm(), g1.norm() * g3.norm(),
                  g2.norm() * g3.norm(), 1.0});
    CHECK((g1 * g2 - g2 * g1).norm() <= 1e-8 * scale);
    CHECK((g1 * g3 - g3 * g1).norm() <= 1e-8 * scale);
    CHECK((g2 * g3 - g3 * g2).norm() <= 1e-8 * scale);
  }
}
