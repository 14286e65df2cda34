#ifndef MEP_TRQI_HPP
#define MEP_TRQI_HPP

#include "mep/problem.hpp"

namespace mep {

struct TrqiOutcome {
  EigenPair pair;
  int steps_taken = 0;
  bool converged = false;
  std::vector<double> residual_history;  // length steps_taken + 1
};

/// One Newton step on the residual-plus-normalization system, anchored at the
/// current unit iterates. Returns the renormalized updated components and the
/// Rayleigh triple *at the input* (the value linearized around).
/// Throws SingularityError on a singular Jacobian.
std::array<Vector, 3> trqi_step(const ThreeParamProblem& p,
                                const std::array<Vector, 3>& x,
                                EigenTriple* value_at_input = nullptr);

/// Tensor Rayleigh quotient iteration: trqi_step until the total residual of
/// the current Rayleigh pair drops to tol, or max_steps. Never throws on
/// stagnation; a singular Jacobian or a vanishing Delta_0 form mid-iteration
/// yields converged=false.
TrqiOutcome trqi(const ThreeParamProblem& p, const std::array<Vector, 3>& x0,
                 int max_steps, double tol);

/// Jacobian of the Newton system at (x, value); exposed for testing.
Matrix trqi_jacobian(const ThreeParamProblem& p, const std::array<Vector, 3>& x,
                     const EigenTriple& value,
                     const std::array<Vector, 3>& anchors);

/// The function F whose zeros are eigenpairs; exposed for testing.
Vector trqi_function(const ThreeParamProblem& p, const std::array<Vector, 3>& x,
                     const EigenTriple& value,
                     const std::array<Vector, 3>& anchors);

}  // namespace mep

#endif
