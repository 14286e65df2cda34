#ifndef MEP_GMRES_HPP
#define MEP_GMRES_HPP

#include <functional>
#include <optional>

#include "mep/types.hpp"

namespace mep {

using VecOp = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  double rel_residual = 0.0;  // achieved ||b - Ax|| / ||b|| (preconditioned system)
  int steps = 0;
  bool breakdown = false;
};

/// Full (unrestarted) GMRES for a square operator, started from zero.
/// When a preconditioner M^{-1} is given it is applied from the left.
/// Stops at relative residual <= tol or after max_steps, whichever first.
/// On breakdown (zero Krylov vector) the best iterate so far is returned
/// with the breakdown flag set.
GmresResult gmres(const VecOp& apply, const Vector& rhs,
                  const std::optional<VecOp>& precond, int max_steps,
                  double tol);

}  // namespace mep

#endif
