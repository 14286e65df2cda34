#include <doctest.h>

#include <algorithm>

#include "mep/discretize.hpp"
#include "mep/jd.hpp"
#include "test_util.hpp"

using namespace mep;

namespace {

// eta values of the known spectrum sorted by distance to tar
std::vector<EigenTriple> nearest_oracle(const RandomDiagProblem& rd,
                                        Complex tar, size_t k) {
  std::vector<EigenTriple> all = rd.oracle;
  std::sort(all.begin(), all.end(),
            [&](const EigenTriple& a, const EigenTriple& b) {
              return std::abs(a.eta - tar) < std::abs(b.eta - tar);
            });
  all.resize(k);
  return all;
}

}  // namespace

TEST_CASE("jd_solve on a scalar problem returns its unique eigenvalue") {
  RandomDiagProblem rd = gen_random_diag(1, 80);
  JdConfig cfg;
  cfg.ell = 1;
  cfg.max_dim = 1;
  cfg.want = 1;
  cfg.target = Target::eta_plane(rd.oracle[0].eta);
  SolveResult res = jd_solve(rd.bvp.problem, cfg, 7);
  REQUIRE(res.pairs.size() == 1);
  CHECK(res.pairs[0].value.dist_max(rd.oracle[0]) <= 1e-9);
}

TEST_CASE("correction_exact is orthogonal and solves the projected equation") {
  std::mt19937_64 rng(81);
  ThreeParamProblem p = testutil::random_problem(5, 4, 5, rng);
  std::array<Vector, 3> u = {testutil::random_unit(5, rng),
                             testutil::random_unit(4, rng),
                             testutil::random_unit(5, rng)};
  const Complex s(0.2, 0.1), t(-0.5, 0.3), e(1.0, -0.2);
  auto v = correction_exact(p, s, t, e, u);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(u[j].dot(v[j])) <= 1e-10 * std::max(1.0, v[j].norm()));
    // pencil * (u + v) is parallel to u, so its u-orthogonal part vanishes
    Vector w = p.pencil(j, s, t, e) * (u[j] + v[j]);
    Vector proj = w - u[j] * u[j].dot(w);
    CHECK(proj.norm() <= 1e-9 * std::max(1.0, w.norm()));
  }
}

TEST_CASE("correction_exact agrees with the closed form on a 2x2 block") {
  std::mt19937_64 rng(82);
  ThreeParamProblem p = testutil::random_problem(2, 2, 2, rng);
  std::array<Vector, 3> u = {testutil::random_unit(2, rng),
                             testutil::random_unit(2, rng),
                             testutil::random_unit(2, rng)};
  const Complex s(0.4, 0.0), t(0.0, 0.6), e(-0.3, 0.1);
  auto v = correction_exact(p, s, t, e, u);
  for (int j = 0; j < 3; ++j) {
    Vector z = p.pencil(j, s, t, e).partialPivLu().solve(u[j]);
    Vector expect = -u[j] + z / u[j].dot(z);
    CHECK((v[j] - expect).norm() <= 1e-10 * std::max(1.0, expect.norm()));
  }
}

TEST_CASE("correction_gmres with zero residual returns zero") {
  std::mt19937_64 rng(83);
  ThreeParamProblem p = testutil::random_problem(3, 3, 3, rng);
  std::array<Vector, 3> u = {testutil::random_unit(3, rng),
                             testutil::random_unit(3, rng),
                             testutil::random_unit(3, rng)};
  std::array<Vector, 3> r = {Vector::Zero(3), Vector::Zero(3), Vector::Zero(3)};
  auto v = correction_gmres(p, 0.1, 0.2, 0.3, u, r, 5, nullptr);
  for (int j = 0; j < 3; ++j) CHECK(v[j].norm() <= 1e-12);
}

TEST_CASE("correction_gmres at full steps solves the projected system") {
  std::mt19937_64 rng(84);
  ThreeParamProblem p = testutil::random_problem(4, 4, 4, rng);
  std::array<Vector, 3> u = {testutil::random_unit(4, rng),
                             testutil::random_unit(4, rng),
                             testutil::random_unit(4, rng)};
  const Complex s(0.3, 0.0), t(-0.2, 0.0), e(0.5, 0.0);
  std::array<Vector, 3> r;
  for (int j = 0; j < 3; ++j) {
    Vector w = p.pencil(j, s, t, e) * u[j];
    r[j] = w - u[j] * u[j].dot(w);  // a consistent right-hand side
  }
  auto v = correction_gmres(p, s, t, e, u, r, 8, nullptr);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(u[j].dot(v[j])) <= 1e-10);
    Vector w = p.pencil(j, s, t, e) * v[j];
    Vector lhs = w - u[j] * u[j].dot(w);
    CHECK((lhs + r[j]).norm() <= 1e-6 * std::max(1.0, r[j].norm()));
  }
}

TEST_CASE("correction_gmres preconditioning helps at few steps") {
  std::mt19937_64 rng(85);
  ThreeParamProblem p = testutil::random_problem(6, 6, 6, rng);
  std::array<Vector, 3> u = {testutil::random_unit(6, rng),
                             testutil::random_unit(6, rng),
                             testutil::random_unit(6, rng)};
  const Complex s(0.31, 0.0), t(-0.22, 0.0), e(0.53, 0.0);
  std::array<Vector, 3> r;
  for (int j = 0; j < 3; ++j) {
    Vector w = p.pencil(j, s, t, e) * u[j];
    r[j] = w - u[j] * u[j].dot(w);
  }
  EigenTriple near{s + 0.01, t - 0.01, e + 0.01};
  auto plain = correction_gmres(p, s, t, e, u, r, 2, nullptr);
  auto precd = correction_gmres(p, s, t, e, u, r, 2, &near);
  auto defect = [&](const std::array<Vector, 3>& v) {
    double d = 0.0;
    for (int j = 0; j < 3; ++j) {
      Vector w = p.pencil(j, s, t, e) * v[j];
      d += (w - u[j] * u[j].dot(w) + r[j]).squaredNorm();
    }
    return std::sqrt(d);
  };
  CHECK(defect(precd) <= defect(plain));
}

TEST_CASE("jd_solve recovers the eta-nearest part of a known spectrum") {
  RandomDiagProblem rd = gen_random_diag(8, 86);
  double eta_min = std::numeric_limits<double>::infinity();
  for (const auto& o : rd.oracle) eta_min = std::min(eta_min, o.eta.real());
  const Complex tar(eta_min - 0.05, 0.0);

  JdConfig cfg;
  cfg.target = Target::eta_plane(tar);
  cfg.want = 5;
  cfg.delta = 1e-6;
  cfg.eps = 1e-9;
  cfg.max_updates = 200;
  SolveResult res = jd_solve(rd.bvp.problem, cfg, 3);
  REQUIRE(res.pairs.size() == 5);

  auto expect = nearest_oracle(rd, tar, 5);
  for (const auto& q : res.pairs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : expect) best = std::min(best, q.value.dist_max(o));
    CHECK(best <= 1e-6);
    CHECK(residual(rd.bvp.problem, q.value, q.right).total <=
          1e-8 * rd.bvp.problem.A[0].norm());
  }

  // locked pairs are pairwise distinct
  for (size_t i = 0; i < res.pairs.size(); ++i)
    for (size_t j = i + 1; j < res.pairs.size(); ++j)
      CHECK(res.pairs[i].value.dist_max(res.pairs[j].value) > 1e-6);
}

TEST_CASE("jd_solve is deterministic for a fixed seed") {
  RandomDiagProblem rd = gen_random_diag(6, 87);
  JdConfig cfg;
  cfg.target = Target::eta_plane(0.0);
  cfg.want = 3;
  cfg.delta = 1e-6;
  SolveResult a = jd_solve(rd.bvp.problem, cfg, 42);
  SolveResult b = jd_solve(rd.bvp.problem, cfg, 42);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].value.dist_max(b.pairs[i].value) == 0.0);
    for (int j = 0; j < 3; ++j)
      CHECK((a.pairs[i].right[j] - b.pairs[i].right[j]).norm() == 0.0);
  }
}
