#pragma once

#include "simsr/mdp.hpp"
#include "simsr/types.hpp"

namespace simsr {

// Which behavioral-metric operator to iterate. DeterministicBisim is only
// valid when every policy-marginal transition row is one-hot.
enum class OperatorKind {
    DeterministicBisim,
    WassersteinBisim,
    IndependentCoupling,
};

const char* to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

struct FixedPointReport {
    DistanceMatrix distances;
    int iterations = 0;
    double final_residual = 0.0;  // sup-norm of the last update
};

// One application of F U(x,y) = |r_x - r_y| + gamma * (coupled expectation
// of U over successors). The expectation is the independent product for
// IndependentCoupling, the exact 1-Wasserstein cost with ground U for
// WassersteinBisim, and a successor lookup for DeterministicBisim. Output
// is symmetrized to absorb floating-point drift.
DistanceMatrix operator_step(const DistanceMatrix& U, const FiniteMDP& mdp, const Policy& policy,
                             OperatorKind kind);

// Iterates operator_step to a fixed point. max_iter == 0 derives the cap
// from the gamma-contraction bound with a 2x safety factor. Throws
// ConvergenceError (carrying the last residual) if the cap is exceeded.
FixedPointReport solve_fixed_point(const FiniteMDP& mdp, const Policy& policy, OperatorKind kind,
                                   double tol = 1e-8, int max_iter = 0,
                                   const DistanceMatrix* init = nullptr);

struct ValueBoundReport {
    bool ok = true;
    int x = -1;  // worst violating pair, -1/-1 when the bound holds everywhere
    int y = -1;
    double violation = 0.0;  // max over pairs of |V(x) - V(y)| - U(x,y)
    double slack = 0.0;      // tolerance the bound was checked against
};

// Checks |V^pi(x) - V^pi(y)| <= U(x,y) pairwise, where U is a converged
// IndependentCoupling fixed point with residual <= tol. The bound is
// asserted with slack tol*(1+gamma)/(1-gamma) to cover solver error in
// both U and V.
ValueBoundReport value_bound_check(const FiniteMDP& mdp, const Policy& policy,
                                   const DistanceMatrix& U, double tol);

}  // namespace simsr
