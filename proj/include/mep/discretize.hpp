#ifndef MEP_DISCRETIZE_HPP
#define MEP_DISCRETIZE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mep/problem.hpp"

namespace mep {

/// Chebyshev-Gauss-Lobatto collocation grid on [a,b]. Points are stored in
/// descending order (b first). D1 is the spectral differentiation matrix for
/// values at these points; D2 = D1^2.
struct ChebGrid {
  int n = 0;
  double a = 0.0, b = 0.0;
  Eigen::VectorXd points;
  Eigen::MatrixXd D1, D2;
};

ChebGrid cheb_grid(int n, double a, double b);

/// Boundary condition at one endpoint. EigenRobin encodes
///   alpha y'(x_b) + (c0 + c1 lambda + c2 mu + c3 eta) y(x_b) = 0,
/// realized as a row across all four matrices; Dirichlet endpoints are
/// eliminated (row and column removed).
struct BcSpec {
  enum class Kind { Dirichlet, EigenRobin };
  Kind kind = Kind::Dirichlet;
  double alpha = 0.0, c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;

  static BcSpec dirichlet() { return {}; }
  static BcSpec eigen_robin(double alpha, double c0, double c1, double c2,
                            double c3) {
    return {Kind::EigenRobin, alpha, c0, c1, c2, c3};
  }
};

using ScalarFn = std::function<double(double)>;

struct EquationBlock {
  Matrix A, B, C, D;
  std::vector<int> kept;  // surviving grid indices, grid (descending) order
};

/// One collocated equation p y'' + q y' + r y = lambda s1 y + mu s2 y +
/// eta s3 y with the given endpoint conditions. bc_left applies at the
/// endpoint a, bc_right at b.
EquationBlock assemble_equation(const ChebGrid& grid, const ScalarFn& p,
                                const ScalarFn& q, const ScalarFn& r,
                                const ScalarFn& s1, const ScalarFn& s2,
                                const ScalarFn& s3, const BcSpec& bc_left,
                                const BcSpec& bc_right);

enum class App { Ellipsoidal, Baer, FourPoint, RandomDiag };

struct BvpProblem {
  ThreeParamProblem problem;
  std::array<ChebGrid, 3> grids;
  std::array<std::vector<int>, 3> kept;
  App app = App::RandomDiag;
  std::map<std::string, double> params;
};

/// Ellipsoidal wave equation in ellipsoidal coordinates; semi-axes derived
/// from the intersection points (x0, y0, z0), rho/sigma/tau in {0,1}.
BvpProblem gen_ellipsoidal(double x0, double y0, double z0, int rho, int sigma,
                           int tau, int n);

/// Baer wave equations in paraboloidal coordinates on the region between the
/// paraboloids xi1 = gamma and xi3 = beta; gamma < c < b < beta.
BvpProblem gen_baer(double gamma, double beta, double c, double b, int rho,
                    int sigma, int n);

/// Four-point problem y'' + (lambda + 2 mu cos x + 2 eta cos 2x) y = 0 on
/// [0,1], [1,2], [2,3], Dirichlet ends.
BvpProblem gen_four_point(int n);

struct RandomDiagProblem {
  BvpProblem bvp;
  std::vector<EigenTriple> oracle;  // all n^3 eigenvalues
  std::array<Matrix, 3> U, V;       // A_i = U_i diag(a_i) V_i etc.
  std::array<Eigen::VectorXd, 3> a, b, c, d;
};

/// Synthetic dense problem with known spectrum: A_i = U_i diag(a_i) V_i with
/// U_i, V_i near-identity sparse perturbations; the spectrum solves the n^3
/// diagonal 3x3 linear systems.
RandomDiagProblem gen_random_diag(int n, uint64_t seed);

/// Exact eigenvalue of a random_diag problem for component indices
/// (i1,i2,i3), solving the corresponding 3x3 linear system.
EigenTriple random_diag_eigenvalue(const RandomDiagProblem& rd, int i1, int i2,
                                   int i3);

/// Strip the global phase (argument of the largest-modulus entry); throws if
/// the remaining imaginary part exceeds 1e-6 of the vector norm.
Eigen::VectorXd real_align(const Vector& v);

/// Strict sign changes across consecutive entries, ignoring entries below
/// 1e-8 * max |value|.
int count_zeros(const Eigen::VectorXd& values);

/// Interior-zero counts (j1, j2, j3) of the component eigenfunctions.
std::array<int, 3> index_triple(const BvpProblem& bvp,
                                const std::array<Vector, 3>& x);

/// eta -> omega map of the application (ellipsoidal: 2 sqrt(eta)/b;
/// Baer: sqrt(eta)); errors for the others.
double eigenfrequency(const BvpProblem& bvp, double eta);

}  // namespace mep

#endif
