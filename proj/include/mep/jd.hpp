#ifndef MEP_JD_HPP
#define MEP_JD_HPP

#include <cstdint>

#include "mep/problem.hpp"

namespace mep {

struct CorrectionPolicy {
  enum class Kind { Exact, Gmres };
  Kind kind = Kind::Exact;
  int gmres_steps = 10;
  bool use_precond = true;  // preconditioner (A - l0 B - m0 C - e0 D)^{-1}
};

struct JdConfig {
  int ell = 5;          // restart dimension
  int max_dim = 10;     // per-coordinate subspace cap
  double delta = 1e-1;  // TRQI candidacy gate
  double eps = 1e-8;    // convergence tolerance
  double xi1 = 1e-1;    // selection threshold before refinement
  double xi2 = 1e-4;    // selection threshold after refinement
  int trqi_steps = 4;
  Target target = Target::eta_plane(0.0);
  CorrectionPolicy correction;  // defaulted from target kind in jd_solve
  bool correction_set = false;  // when false, pick per target kind
  int max_updates = 300;
  int want = 1;

  void validate() const;
};

struct SolveStats {
  int subspace_updates = 0;
  int outer_iterations = 0;
  int restarts = 0;
  double seconds = 0.0;
};

struct SolveResult {
  std::vector<EigenPair> pairs;  // retrieval order
  SolveStats stats;
};

/// Algorithm: Jacobi-Davidson for the 3-parameter eigenvalue problem with
/// targeting, selection-criterion deflation, exact or preconditioned-GMRES
/// correction equations, TRQI refinement and restarts. Deterministic per
/// (problem, cfg, seed).
SolveResult jd_solve(const ThreeParamProblem& p, const JdConfig& cfg,
                     uint64_t seed);

/// Exact solution of the correction equation
/// (I - u u^H)(A - s B - t C - psi D) v = -r, v perp u, via
/// v_j = -u_j + (u_j^H z_j)^{-1} z_j with z_j the pencil solve of u_j.
std::array<Vector, 3> correction_exact(const ThreeParamProblem& p, Complex sigma,
                                       Complex tau, Complex psi,
                                       const std::array<Vector, 3>& u);

/// Approximate solution by `steps` of GMRES on the u-orthogonal projection of
/// the pencil, started from zero; the result is projected to be exactly
/// u-orthogonal. When `precond_at` is given, the inverse pencil at that point
/// is used as a (projected) preconditioner.
std::array<Vector, 3> correction_gmres(const ThreeParamProblem& p, Complex sigma,
                                       Complex tau, Complex psi,
                                       const std::array<Vector, 3>& u,
                                       const std::array<Vector, 3>& r, int steps,
                                       const EigenTriple* precond_at);

}  // namespace mep

#endif
