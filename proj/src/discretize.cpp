#include "mep/discretize.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <random>

namespace mep {

ChebGrid cheb_grid(int n, double a, double b) {
  if (n < 2) throw MepError("cheb_grid: need at least 2 points");
  if (!(a < b)) throw MepError("cheb_grid: degenerate interval");

  ChebGrid g;
  g.n = n;
  g.a = a;
  g.b = b;

  Eigen::VectorXd x(n);  // reference points on [-1,1], descending
  for (int j = 0; j < n; ++j) x(j) = std::cos(j * std::numbers::pi / (n - 1));
  g.points = ((a + b) / 2.0) + ((b - a) / 2.0) * x.array();

  Eigen::MatrixXd d(n, n);
  auto weight = [n](int i) { return (i == 0 || i == n - 1) ? 2.0 : 1.0; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = (weight(i) / weight(j)) * sign / (x(i) - x(j));
    }
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    d(i, i) = -d.row(i).sum();
  }
  g.D1 = (2.0 / (b - a)) * d;
  g.D2 = g.D1 * g.D1;
  return g;
}

EquationBlock assemble_equation(const ChebGrid& grid, const ScalarFn& p,
                                const ScalarFn& q, const ScalarFn& r,
                                const ScalarFn& s1, const ScalarFn& s2,
                                const ScalarFn& s3, const BcSpec& bc_left,
                                const BcSpec& bc_right) {
  const int n = grid.n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double t = grid.points(i);
    a.row(i) = p(t) * grid.D2.row(i) + q(t) * grid.D1.row(i);
    a(i, i) += r(t);
    b(i, i) = s1(t);
    c(i, i) = s2(t);
    d(i, i) = s3(t);
  }

  // points descend, so row 0 is the right endpoint and row n-1 the left
  auto apply = [&](const BcSpec& bc, int row) {
    if (bc.kind != BcSpec::Kind::EigenRobin) return;
    a.row(row) = bc.alpha * grid.D1.row(row);
    a(row, row) += bc.c0;
    b.row(row).setZero();
    b(row, row) = -bc.c1;
    c.row(row).setZero();
    c(row, row) = -bc.c2;
    d.row(row).setZero();
    d(row, row) = -bc.c3;
  };
  apply(bc_right, 0);
  apply(bc_left, n - 1);

  EquationBlock out;
  for (int i = 0; i < n; ++i) {
    if (i == 0 && bc_right.kind == BcSpec::Kind::Dirichlet) continue;
    if (i == n - 1 && bc_left.kind == BcSpec::Kind::Dirichlet) continue;
    out.kept.push_back(i);
  }
  const int m = static_cast<int>(out.kept.size());
  if (m < 2) throw MepError("assemble_equation: fewer than 2 unknowns left");

  out.A.resize(m, m);
  out.B.resize(m, m);
  out.C.resize(m, m);
  out.D.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      out.A(i, j) = a(out.kept[i], out.kept[j]);
      out.B(i, j) = b(out.kept[i], out.kept[j]);
      out.C(i, j) = c(out.kept[i], out.kept[j]);
      out.D(i, j) = d(out.kept[i], out.kept[j]);
    }
  return out;
}

namespace {

void install(BvpProblem& bvp, int j, const ChebGrid& grid, EquationBlock&& eq) {
  bvp.grids[j] = grid;
  bvp.kept[j] = std::move(eq.kept);
  bvp.problem.A[j] = std::move(eq.A);
  bvp.problem.B[j] = std::move(eq.B);
  bvp.problem.C[j] = std::move(eq.C);
  bvp.problem.D[j] = std::move(eq.D);
}

}  // namespace

BvpProblem gen_ellipsoidal(double x0, double y0, double z0, int rho, int sigma,
                           int tau, int n) {
  if (!(z0 > y0 && y0 > x0 && x0 > 0))
    throw MepError("gen_ellipsoidal: need z0 > y0 > x0 > 0");
  if ((rho != 0 && rho != 1) || (sigma != 0 && sigma != 1) ||
      (tau != 0 && tau != 1))
    throw MepError("gen_ellipsoidal: rho, sigma, tau must be 0 or 1");

  const double a2 = z0 * z0 - x0 * x0;  // semi-focal geometry
  const double b2 = z0 * z0 - y0 * y0;
  const double c = a2 / b2;
  const double l0 = 0.25 * ((rho + tau) * (rho + tau) +
                            (rho + sigma) * (rho + sigma) * c);
  const double m0 = 0.25 * (rho + sigma + tau) * (rho + sigma + tau + 1);
  const double k0 = (2 * rho + 1) * c;
  const double k1 = (1 + rho) * (1 + c) + tau + sigma * c;
  const double k2 = 2 * (rho + sigma + tau) + 3;

  ScalarFn p = [c](double t) { return t * (t - 1.0) * (t - c); };
  ScalarFn q = [k0, k1, k2](double t) {
    return 0.5 * (k2 * t * t - 2.0 * k1 * t + k0);
  };
  ScalarFn r = [l0, m0](double t) { return -l0 + m0 * t; };
  ScalarFn s1 = [](double) { return -1.0; };
  ScalarFn s2 = [](double t) { return -t; };
  ScalarFn s3 = [](double t) { return -t * t; };

  auto robin_at = [&](double t) {
    // boundedness at the singular point: the ODE evaluated at p(t) = 0
    return BcSpec::eigen_robin(0.5 * (k2 * t * t - 2.0 * k1 * t + k0),
                               -l0 + m0 * t, 1.0, t, t * t);
  };

  BvpProblem bvp;
  bvp.app = App::Ellipsoidal;
  bvp.params = {{"x0", x0},     {"y0", y0},
                {"z0", z0},     {"rho", double(rho)},
                {"sigma", double(sigma)}, {"tau", double(tau)},
                {"n", double(n)},         {"a", std::sqrt(a2)},
                {"b", std::sqrt(b2)},     {"c", c}};

  {
    ChebGrid g = cheb_grid(n, c, z0 * z0 / b2);
    install(bvp, 0,
            g, assemble_equation(g, p, q, r, s1, s2, s3, robin_at(c),
                                 BcSpec::dirichlet()));
  }
  {
    ChebGrid g = cheb_grid(n, 1.0, c);
    install(bvp, 1, g,
            assemble_equation(g, p, q, r, s1, s2, s3, robin_at(1.0),
                              robin_at(c)));
  }
  {
    ChebGrid g = cheb_grid(n, 0.0, 1.0);
    install(bvp, 2, g,
            assemble_equation(g, p, q, r, s1, s2, s3, robin_at(0.0),
                              robin_at(1.0)));
  }
  bvp.problem.validate();
  return bvp;
}

BvpProblem gen_baer(double gamma, double beta, double c, double b, int rho,
                    int sigma, int n) {
  if (!(gamma < c && c < b && b < beta))
    throw MepError("gen_baer: need gamma < c < b < beta");
  if ((rho != 0 && rho != 1) || (sigma != 0 && sigma != 1))
    throw MepError("gen_baer: rho, sigma must be 0 or 1");

  const double k1 = 2.0 * (1 + rho + sigma);
  const double k0 = (1 + 2 * sigma) * b + (1 + 2 * rho) * c;
  const double l0 = -0.25 * (rho + sigma + 2 * rho * sigma);

  ScalarFn p = [b, c](double t) { return (t - b) * (t - c); };
  ScalarFn q = [k0, k1](double t) { return 0.5 * (k1 * t - k0); };
  ScalarFn r = [l0](double) { return -l0; };
  ScalarFn s1 = [](double) { return -1.0; };
  ScalarFn s2 = [](double t) { return -t; };
  ScalarFn s3 = [](double t) { return -t * t; };

  auto robin_at = [&](double t) {
    return BcSpec::eigen_robin(0.5 * (k1 * t - k0), -l0, 1.0, t, t * t);
  };

  BvpProblem bvp;
  bvp.app = App::Baer;
  bvp.params = {{"gamma", gamma},       {"beta", beta},
                {"c", c},               {"b", b},
                {"rho", double(rho)},   {"sigma", double(sigma)},
                {"n", double(n)}};

  {
    ChebGrid g = cheb_grid(n, gamma, c);
    install(bvp, 0, g,
            assemble_equation(g, p, q, r, s1, s2, s3, BcSpec::dirichlet(),
                              robin_at(c)));
  }
  {
    ChebGrid g = cheb_grid(n, c, b);
    install(bvp, 1, g,
            assemble_equation(g, p, q, r, s1, s2, s3, robin_at(c),
                              robin_at(b)));
  }
  {
    ChebGrid g = cheb_grid(n, b, beta);
    install(bvp, 2, g,
            assemble_equation(g, p, q, r, s1, s2, s3, robin_at(b),
                              BcSpec::dirichlet()));
  }
  bvp.problem.validate();
  return bvp;
}

BvpProblem gen_four_point(int n) {
  if (n < 4) throw MepError("gen_four_point: need n >= 4");
  ScalarFn one = [](double) { return 1.0; };
  ScalarFn zero = [](double) { return 0.0; };
  ScalarFn s1 = [](double) { return -1.0; };
  ScalarFn s2 = [](double t) { return -2.0 * std::cos(t); };
  ScalarFn s3 = [](double t) { return -2.0 * std::cos(2.0 * t); };

  BvpProblem bvp;
  bvp.app = App::FourPoint;
  bvp.params = {{"n", double(n)}};
  for (int j = 0; j < 3; ++j) {
    ChebGrid g = cheb_grid(n, double(j), double(j + 1));
    install(bvp, j, g,
            assemble_equation(g, one, zero, zero, s1, s2, s3,
                              BcSpec::dirichlet(), BcSpec::dirichlet()));
  }
  bvp.problem.validate();
  return bvp;
}

RandomDiagProblem gen_random_diag(int n, uint64_t seed) {
  if (n < 1) throw MepError("gen_random_diag: need n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto sparse_near_identity = [&]() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (unif(rng) < 0.04) m(i, j) += 0.3 * unif(rng);
    return m;
  };
  auto shifted = [&](double shift) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = unif(rng) + shift;
    return v;
  };

  RandomDiagProblem rd;
  std::array<Eigen::MatrixXd, 3> u, v;
  for (int i = 0; i < 3; ++i) u[i] = sparse_near_identity();
  for (int i = 0; i < 3; ++i) v[i] = sparse_near_identity();

  const double sa[3] = {-0.5, -0.5, -0.5};
  const double sb[3] = {2.0, 0.0, -1.0};
  const double sc[3] = {0.0, 2.0, 0.0};
  const double sd[3] = {-1.0, 0.5, 2.0};
  for (int i = 0; i < 3; ++i) {
    rd.a[i] = shifted(sa[i]);
    rd.b[i] = shifted(sb[i]);
    rd.c[i] = shifted(sc[i]);
    rd.d[i] = shifted(sd[i]);
  }

  BvpProblem& bvp = rd.bvp;
  bvp.app = App::RandomDiag;
  bvp.params = {{"n", double(n)}, {"seed", double(seed)}};
  for (int i = 0; i < 3; ++i) {
    rd.U[i] = u[i].cast<Complex>();
    rd.V[i] = v[i].cast<Complex>();
    bvp.problem.A[i] = (u[i] * rd.a[i].asDiagonal() * v[i]).cast<Complex>();
    bvp.problem.B[i] = (u[i] * rd.b[i].asDiagonal() * v[i]).cast<Complex>();
    bvp.problem.C[i] = (u[i] * rd.c[i].asDiagonal() * v[i]).cast<Complex>();
    bvp.problem.D[i] = (u[i] * rd.d[i].asDiagonal() * v[i]).cast<Complex>();
    bvp.kept[i].resize(n);
    for (int k = 0; k < n; ++k) bvp.kept[i][k] = k;
  }
  bvp.problem.validate();

  rd.oracle.reserve(static_cast<size_t>(n) * n * n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        rd.oracle.push_back(random_diag_eigenvalue(rd, i1, i2, i3));
  return rd;
}

EigenTriple random_diag_eigenvalue(const RandomDiagProblem& rd, int i1, int i2,
                                   int i3) {
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  const int idx[3] = {i1, i2, i3};
  for (int t = 0; t < 3; ++t) {
    m(t, 0) = rd.b[t](idx[t]);
    m(t, 1) = rd.c[t](idx[t]);
    m(t, 2) = rd.d[t](idx[t]);
    rhs(t) = rd.a[t](idx[t]);
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  if (!lu.isInvertible())
    throw SingularityError("random_diag_eigenvalue: singular 3x3 system");
  const Eigen::Vector3d sol = lu.solve(rhs);
  EigenTriple val;
  val.lambda = sol(0);
  val.mu = sol(1);
  val.eta = sol(2);
  return val;
}

Eigen::VectorXd real_align(const Vector& v) {
  if (v.size() == 0) throw MepError("real_align: empty vector");
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = v(imax);
  if (std::abs(pivot) == 0.0) return v.real();
  const Vector w = v * (std::conj(pivot) / std::abs(pivot));
  if (w.imag().cwiseAbs().maxCoeff() > 1e-6 * v.norm())
    throw MepError("real_align: vector is not real up to a phase");
  return w.real();
}

int count_zeros(const Eigen::VectorXd& values) {
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  const double floor = 1e-8 * scale;
  int count = 0;
  double prev = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double x = values(i);
    if (std::abs(x) < floor) continue;
    if (prev != 0.0 && ((prev > 0) != (x > 0))) ++count;
    prev = x;
  }
  return count;
}

std::array<int, 3> index_triple(const BvpProblem& bvp,
                                const std::array<Vector, 3>& x) {
  std::array<int, 3> out{};
  for (int j = 0; j < 3; ++j) {
    if (bvp.grids[j].n == 0)
      throw MepError("index_triple: problem has no collocation grids");
    std::vector<double> interior;
    const Eigen::VectorXd real = real_align(x[j]);
    for (size_t pos = 0; pos < bvp.kept[j].size(); ++pos) {
      const int k = bvp.kept[j][pos];
      if (k == 0 || k == bvp.grids[j].n - 1) continue;  // endpoint values
      interior.push_back(real(static_cast<Eigen::Index>(pos)));
    }
    out[j] = count_zeros(Eigen::Map<const Eigen::VectorXd>(
        interior.data(), static_cast<Eigen::Index>(interior.size())));
  }
  return out;
}

double eigenfrequency(const BvpProblem& bvp, double eta) {
  switch (bvp.app) {
    case App::Ellipsoidal: {
      if (eta < 0) throw MepError("eigenfrequency: negative eta");
      return 2.0 * std::sqrt(eta) / bvp.params.at("b");
    }
    case App::Baer: {
      if (eta < 0) throw MepError("eigenfrequency: negative eta");
      return std::sqrt(eta);
    }
    default:
      throw MepError("eigenfrequency: not defined for this application");
  }
}

}  // namespace mep
