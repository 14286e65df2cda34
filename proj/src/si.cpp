#include "mep/si.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <random>

#include "mep/ortho.hpp"
#include "mep/trqi.hpp"

namespace mep {

void SiConfig::validate() const {
  if (!(eps < delta)) throw MepError("SiConfig: eps must be < delta");
  if (ell < 1 || ell > m) throw MepError("SiConfig: need 1 <= ell <= m");
  if (!(xi2 <= xi1 && xi1 < 1.0)) throw MepError("SiConfig: need xi2 <= xi1 < 1");
  const long lcube = static_cast<long>(ell) * ell * ell;
  if (max_product_dim < lcube)
    throw MepError("SiConfig: max_product_dim must be at least ell^3");
  if (want < 1) throw MepError("SiConfig: want must be positive");
}

namespace {

Matrix random_gauss(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

bool duplicate_of_locked(const EigenTriple& v, const std::vector<EigenPair>& locked,
                         double eps) {
  for (const auto& q : locked)
    if (v.dist_max(q.value) <= 10.0 * eps) return true;
  return false;
}

}  // namespace

SolveResult si_solve(const ThreeParamProblem& p, const SiConfig& cfg,
                     uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  p.validate();
  const auto n = p.sizes();

  // A_j^{-1} applications, factored once per solve
  std::array<Eigen::PartialPivLU<Matrix>, 3> alu;
  for (int j = 0; j < 3; ++j) {
    alu[j].compute(p.A[j]);
    const double rc = alu[j].rcond();
    if (!(rc > 0.0) || 1.0 / rc > 1e12)
      throw SingularityError("si_solve: A_j singular; shift the problem first");
  }

  std::mt19937_64 rng(seed);
  std::array<Matrix, 3> bases;
  for (int j = 0; j < 3; ++j)
    bases[j] = orthonormalize(random_gauss(n[j], std::min(cfg.ell, n[j]), rng));

  SolveResult result;
  std::vector<EigenPair>& locked = result.pairs;

  for (int iter = 0; iter < cfg.max_iters &&
                     static_cast<int>(locked.size()) < cfg.want;
       ++iter) {
    ++result.stats.outer_iterations;
    ++result.stats.subspace_updates;

    // expansion: generalized Krylov basis per coordinate
    std::array<Matrix, 3> q;
    for (int j = 0; j < 3; ++j) {
      auto apply_b = [&](const Matrix& w) -> Matrix { return alu[j].solve(p.B[j] * w); };
      auto apply_c = [&](const Matrix& w) -> Matrix { return alu[j].solve(p.C[j] * w); };
      Matrix f(n[j], 3 * bases[j].cols());
      f.leftCols(bases[j].cols()) = alu[j].solve(p.B[j] * bases[j]);
      f.middleCols(bases[j].cols(), bases[j].cols()) = alu[j].solve(p.C[j] * bases[j]);
      f.rightCols(bases[j].cols()) = alu[j].solve(p.D[j] * bases[j]);
      q[j] = block_arnoldi(apply_b, apply_c, f, cfg.arnoldi_r, cfg.zeta, n[j]);
    }

    // shrink: drop trailing columns of the largest basis until the product
    // dimension fits
    auto product = [&] {
      return static_cast<long>(q[0].cols()) * q[1].cols() * q[2].cols();
    };
    while (product() > cfg.max_product_dim) {
      int big = 0;
      for (int j = 1; j < 3; ++j)
        if (q[j].cols() > q[big].cols()) big = j;
      if (q[big].cols() <= 1)
        throw MepError("si_solve: cannot shrink search space below the cap");
      q[big] = Matrix(q[big].leftCols(q[big].cols() - 1));
    }

    // Ritz extraction ordered by |psi - eta_tar|
    std::vector<EigenPair> ritz = solve_direct(project(p, q[0], q[1], q[2]));
    std::vector<int> order(ritz.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = std::abs(ritz[a].value.eta - cfg.eta_tar);
      const double db = std::abs(ritz[b].value.eta - cfg.eta_tar);
      if (da != db) return da < db;
      const double sa = std::norm(ritz[a].value.lambda) + std::norm(ritz[a].value.mu);
      const double sb = std::norm(ritz[b].value.lambda) + std::norm(ritz[b].value.mu);
      return sa < sb;  // tie-break
    });
    const int m_take = std::min<int>(cfg.m, static_cast<int>(order.size()));

    // pre-refinement of the m extracted Ritz pairs
    struct Refined {
      EigenTriple value;
      std::array<Vector, 3> u;
      bool usable = false;
    };
    std::vector<Refined> cand(m_take);
    for (int i = 0; i < m_take; ++i) {
      const EigenPair& r = ritz[order[i]];
      std::array<Vector, 3> u;
      for (int j = 0; j < 3; ++j) {
        u[j] = q[j] * r.right[j];
        u[j] /= u[j].norm();
      }
      TrqiOutcome pre = trqi(p, u, cfg.pre_trqi_steps, cfg.eps);
      if (pre.pair.right[0].size() > 0 && pre.residual_history.size() > 0) {
        cand[i].value = pre.pair.value;
        cand[i].u = pre.pair.right;
        cand[i].usable = true;
      } else {
        cand[i].value = r.value;
        cand[i].u = u;
        cand[i].usable = true;
      }
    }

    // deflation walk: lock converged pairs, remember restart directions
    std::vector<int> restart_picks;
    for (int i = 0; i < m_take; ++i) {
      if (!cand[i].usable) continue;
      double ratio;
      try {
        ratio = selection_ratio(cand[i].u, locked, p);
      } catch (const SingularityError&) {
        continue;
      }
      if (ratio >= cfg.xi1) continue;

      bool locked_this = false;
      const double res = residual(p, cand[i].value, cand[i].u).total;
      if (res <= cfg.delta && static_cast<int>(locked.size()) < cfg.want) {
        TrqiOutcome post = trqi(p, cand[i].u, cfg.post_trqi_steps, cfg.eps);
        if (post.converged) {
          try {
            const double post_ratio = selection_ratio(post.pair.right, locked, p);
            if (post_ratio < cfg.xi2 &&
                !duplicate_of_locked(post.pair.value, locked, cfg.eps)) {
              EigenPair pair = post.pair;
              pair.left = left_eigenvector(p, pair.value);
              locked.push_back(std::move(pair));
              locked_this = true;
            }
          } catch (const MepError&) {
          }
        }
      }
      if (!locked_this && static_cast<int>(restart_picks.size()) < cfg.ell)
        restart_picks.push_back(i);
    }

    if (static_cast<int>(locked.size()) >= cfg.want) break;

    // restart: orthonormal bases of the selected Ritz components, padded with
    // seeded random directions when fewer than ell survive
    ++result.stats.restarts;
    for (int j = 0; j < 3; ++j) {
      Matrix z(n[j], restart_picks.size());
      for (size_t i = 0; i < restart_picks.size(); ++i)
        z.col(i) = cand[restart_picks[i]].u[j];
      Matrix u = z.size() > 0 ? orthonormalize(z) : Matrix(n[j], 0);
      while (u.cols() < std::min<Eigen::Index>(cfg.ell, n[j])) {
        Vector w = random_gauss(n[j], 1, rng).col(0);
        u = rgs_expand(u, w).basis;
      }
      if (u.cols() > cfg.ell) u = Matrix(u.leftCols(cfg.ell));
      bases[j] = u;
    }
  }

  result.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace mep
