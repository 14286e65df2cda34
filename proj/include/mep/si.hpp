#ifndef MEP_SI_HPP
#define MEP_SI_HPP

#include <cstdint>

#include "mep/jd.hpp"  // SolveResult / SolveStats

namespace mep {

struct SiConfig {
  int ell = 6;               // restart dimension
  int arnoldi_r = 0;         // block Arnoldi steps
  double zeta = 1e-5;        // SVD cutoff
  int max_product_dim = 1000;  // cap on dim(Q1 (o) Q2 (o) Q3)
  int m = 100;               // Ritz values per iteration
  int pre_trqi_steps = 1;
  int post_trqi_steps = 3;
  double delta = 1e-2;
  double eps = 1e-8;
  double xi1 = 1e-1;
  double xi2 = 1e-4;
  int max_iters = 20;
  int want = 1;
  Complex eta_tar = 0.0;  // Ritz extraction orders by |psi - eta_tar|

  void validate() const;
};

/// Algorithm: subspace iteration with Arnoldi expansion, SVD-filtered block
/// Krylov search spaces, Ritz extraction by smallest |psi|, two-stage TRQI
/// refinement, selection-criterion deflation and Ritz-factor restarts.
/// Requires invertible A_j (the iteration applies A_j^{-1}); apply
/// shift_substitute first when needed. Deterministic per (problem, cfg, seed).
SolveResult si_solve(const ThreeParamProblem& p, const SiConfig& cfg,
                     uint64_t seed);

}  // namespace mep

#endif
