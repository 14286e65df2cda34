#include "mep/jd.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <deque>
#include <random>

#include "mep/gmres.hpp"
#include "mep/ortho.hpp"
#include "mep/trqi.hpp"

namespace mep {

void JdConfig::validate() const {
  if (!(eps < delta)) throw MepError("JdConfig: eps must be < delta");
  if (ell < 1 || ell > max_dim) throw MepError("JdConfig: need 1 <= ell <= max_dim");
  if (!(xi2 <= xi1 && xi1 < 1.0)) throw MepError("JdConfig: need xi2 <= xi1 < 1");
  if (want < 1) throw MepError("JdConfig: want must be positive");
}

std::array<Vector, 3> correction_exact(const ThreeParamProblem& p, Complex sigma,
                                       Complex tau, Complex psi,
                                       const std::array<Vector, 3>& u) {
  std::array<Vector, 3> v;
  for (int attempt = 0;; ++attempt) {
    const Complex shift = attempt == 0 ? 0.0 : Complex(1e-10) * std::max(1.0, std::abs(psi));
    bool ok = true;
    for (int j = 0; j < 3; ++j) {
      const Matrix m = p.pencil(j, sigma, tau, psi + shift);
      Eigen::PartialPivLU<Matrix> lu(m);
      const double rc = lu.rcond();
      if (!(rc > 0.0) || 1.0 / rc > 1e14) {
        ok = false;
        break;
      }
      const Vector z = lu.solve(u[j]);
      const Complex uz = u[j].dot(z);
      if (std::abs(uz) == 0.0) {
        ok = false;
        break;
      }
      v[j] = -u[j] + z / uz;
    }
    if (ok) return v;
    if (attempt == 1)
      throw SingularityError("correction_exact: singular pencil at Ritz value");
  }
}

std::array<Vector, 3> correction_gmres(const ThreeParamProblem& p, Complex sigma,
                                       Complex tau, Complex psi,
                                       const std::array<Vector, 3>& u,
                                       const std::array<Vector, 3>& r, int steps,
                                       const EigenTriple* precond_at) {
  std::array<Vector, 3> v;
  for (int j = 0; j < 3; ++j) {
    if (r[j].norm() == 0.0) {
      v[j] = Vector::Zero(u[j].size());
      continue;
    }
    const Matrix m = p.pencil(j, sigma, tau, psi);
    const Vector uj = u[j];
    auto projected = [&](const Vector& x) -> Vector {
      Vector y = x - uj * uj.dot(x);
      y = m * y;
      return y - uj * uj.dot(y);
    };
    std::optional<VecOp> prec;
    std::optional<Eigen::PartialPivLU<Matrix>> plu;
    if (precond_at) {
      plu.emplace(p.pencil(j, precond_at->lambda, precond_at->mu, precond_at->eta));
      prec = [&plu, &uj](const Vector& x) -> Vector {
        Vector y = plu->solve(x - uj * uj.dot(x));
        return y - uj * uj.dot(y);
      };
    }
    Vector rhs = -r[j];
    rhs -= uj * uj.dot(rhs);
    if (rhs.norm() == 0.0) {
      v[j] = Vector::Zero(u[j].size());
      continue;
    }
    GmresResult g = gmres(projected, rhs, prec, steps, 1e-12);
    v[j] = g.x - uj * uj.dot(g.x);
  }
  return v;
}

namespace {

struct RitzCandidate {
  EigenTriple value;
  std::array<Vector, 3> u;  // lifted, unit components
  double dist = 0.0;
};

Matrix seeded_basis(Eigen::Index n, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix q = orthonormalize(m);
  while (q.cols() < cols) {  // rank-deficient draw, essentially never
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    q = rgs_expand(q, v).basis;
  }
  return q;
}

bool duplicate_of_locked(const EigenTriple& v, const std::vector<EigenPair>& locked,
                         double eps) {
  for (const auto& q : locked)
    if (v.dist_max(q.value) <= 10.0 * eps) return true;
  return false;
}

}  // namespace

SolveResult jd_solve(const ThreeParamProblem& p, const JdConfig& cfg_in,
                     uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  JdConfig cfg = cfg_in;
  cfg.validate();
  p.validate();
  if (!cfg.correction_set) {
    // exact solves for plane targets, preconditioned GMRES for point targets
    cfg.correction.kind = cfg.target.kind == Target::Kind::EtaPlane
                              ? CorrectionPolicy::Kind::Exact
                              : CorrectionPolicy::Kind::Gmres;
  }

  std::mt19937_64 rng(seed);
  const auto n = p.sizes();
  std::array<Matrix, 3> bases;
  for (int j = 0; j < 3; ++j)
    bases[j] = seeded_basis(n[j], std::min(cfg.ell, n[j]), rng);

  // restart history: newest first, entries are per-coordinate u+v sums
  std::deque<std::array<Vector, 3>> history;

  SolveResult result;
  std::vector<EigenPair>& locked = result.pairs;

  while (static_cast<int>(locked.size()) < cfg.want &&
         result.stats.subspace_updates < cfg.max_updates) {
    ++result.stats.outer_iterations;

    // projected problem; re-randomize the newest basis column once on failure
    std::vector<EigenPair> ritz;
    for (int attempt = 0;; ++attempt) {
      try {
        ritz = solve_direct(project(p, bases[0], bases[1], bases[2]));
        break;
      } catch (const MepError&) {
        if (attempt == 1) throw;
        for (int j = 0; j < 3; ++j) {
          std::normal_distribution<double> gauss(0.0, 1.0);
          Vector v(n[j]);
          for (Eigen::Index i = 0; i < n[j]; ++i)
            v(i) = Complex(gauss(rng), gauss(rng));
          Matrix head = bases[j].leftCols(bases[j].cols() - 1);
          bases[j] = rgs_expand(head, v).basis;
        }
      }
    }

    std::vector<int> order(ritz.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cfg.target.distance(ritz[a].value) <
             cfg.target.distance(ritz[b].value);
    });

    auto lift = [&](const EigenPair& r) {
      std::array<Vector, 3> u;
      for (int j = 0; j < 3; ++j) {
        u[j] = bases[j] * r.right[j];
        u[j] /= u[j].norm();
      }
      return u;
    };

    // walk candidates in target order; extract as many eigenpairs as the
    // subspace yields, then expand with the first non-converged candidate
    bool have_expander = false;
    RitzCandidate expander;
    double best_ratio = std::numeric_limits<double>::infinity();
    RitzCandidate best_ratio_cand;

    for (int idx : order) {
      if (static_cast<int>(locked.size()) >= cfg.want) break;
      RitzCandidate cand;
      cand.value = ritz[idx].value;
      cand.u = lift(ritz[idx]);
      cand.dist = cfg.target.distance(cand.value);

      double ratio;
      try {
        ratio = selection_ratio(cand.u, locked, p);
      } catch (const SingularityError&) {
        continue;
      }
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best_ratio_cand = cand;
      }
      if (ratio >= cfg.xi1) continue;

      const double res = residual(p, cand.value, cand.u).total;
      if (res > cfg.delta) {
        if (!have_expander) {
          have_expander = true;
          expander = cand;
        }
        break;  // remaining candidates are further from the target
      }

      // candidate: refine and try to lock
      TrqiOutcome ref = trqi(p, cand.u, cfg.trqi_steps, cfg.eps);
      bool accepted = false;
      if (ref.converged) {
        try {
          const double post_ratio = selection_ratio(ref.pair.right, locked, p);
          if (post_ratio < cfg.xi2 &&
              !duplicate_of_locked(ref.pair.value, locked, cfg.eps)) {
            EigenPair pair = ref.pair;
            pair.left = left_eigenvector(p, pair.value);
            locked.push_back(std::move(pair));
            accepted = true;
          }
        } catch (const MepError&) {
          accepted = false;
        }
      }
      if (!accepted && !have_expander) {
        have_expander = true;
        expander = cand;
      }
      // on acceptance keep scanning the same subspace for more eigenpairs
    }

    if (static_cast<int>(locked.size()) >= cfg.want) break;

    if (!have_expander) {
      if (best_ratio == std::numeric_limits<double>::infinity()) break;
      expander = best_ratio_cand;  // nothing passed selection: best-ratio
    }

    // correction equation
    std::array<Vector, 3> r;
    for (int j = 0; j < 3; ++j)
      r[j] = p.pencil(j, expander.value.lambda, expander.value.mu,
                      expander.value.eta) *
             expander.u[j];
    std::array<Vector, 3> v;
    try {
      if (cfg.correction.kind == CorrectionPolicy::Kind::Exact) {
        v = correction_exact(p, expander.value.lambda, expander.value.mu,
                             expander.value.eta, expander.u);
      } else {
        EigenTriple at = cfg.target.point;
        const EigenTriple* prec =
            (cfg.correction.use_precond && cfg.target.kind == Target::Kind::Point)
                ? &at
                : nullptr;
        v = correction_gmres(p, expander.value.lambda, expander.value.mu,
                             expander.value.eta, expander.u, r,
                             cfg.correction.gmres_steps, prec);
      }
    } catch (const SingularityError&) {
      // fall back to the approximate route without preconditioning
      v = correction_gmres(p, expander.value.lambda, expander.value.mu,
                           expander.value.eta, expander.u, r,
                           std::max(cfg.correction.gmres_steps, 5), nullptr);
    }

    std::array<Vector, 3> sum;
    for (int j = 0; j < 3; ++j) sum[j] = expander.u[j] + v[j];
    history.push_front(sum);
    while (static_cast<int>(history.size()) > cfg.ell) history.pop_back();

    bool grew = false;
    for (int j = 0; j < 3; ++j) {
      if (v[j].norm() == 0.0) continue;
      auto ex = rgs_expand(bases[j], v[j]);
      bases[j] = ex.basis;
      grew = grew || ex.expanded;
    }
    ++result.stats.subspace_updates;

    int maxdim = 0;
    for (int j = 0; j < 3; ++j)
      maxdim = std::max(maxdim, static_cast<int>(bases[j].cols()));
    if (maxdim > cfg.max_dim || !grew) {
      // restart from the last ell eigenvector approximations; the current
      // Ritz vector is kept in the span exactly
      ++result.stats.restarts;
      for (int j = 0; j < 3; ++j) {
        Matrix cand(n[j], 1 + history.size());
        cand.col(0) = expander.u[j];
        for (size_t q = 0; q < history.size(); ++q) cand.col(1 + q) = history[q][j];
        Matrix q = orthonormalize(cand);
        if (q.cols() > cfg.ell) q = Matrix(q.leftCols(cfg.ell));
        while (q.cols() < std::min<Eigen::Index>(cfg.ell, n[j])) {
          std::normal_distribution<double> gauss(0.0, 1.0);
          Vector w(n[j]);
          for (Eigen::Index i = 0; i < n[j]; ++i)
            w(i) = Complex(gauss(rng), gauss(rng));
          q = rgs_expand(q, w).basis;
        }
        bases[j] = q;
      }
    }
  }

  result.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace mep
