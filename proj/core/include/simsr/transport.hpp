#pragma once

#include "simsr/types.hpp"

#include <cstdint>

namespace simsr {

// Solution of a discrete optimal-transport problem between two finite
// distributions under a given ground cost.
struct TransportResult {
    double cost = 0.0;   // optimal objective <plan, ground>
    Matrix plan;         // n x m coupling; row sums = p, col sums = q
    Vector u;            // row duals (potential on p)
    Vector v;            // column duals (potential on q)
    std::int64_t pivots = 0;
};

// Exact 1-Wasserstein distance between p and q under `ground` (n x m cost
// matrix), solved with the transportation simplex. Both distributions must
// be nonnegative and sum to 1 within 1e-9. Throws ValidationError on bad
// input and ConvergenceError if the pivot cap is exceeded (which would
// indicate a cycling bug, not a property of the input).
TransportResult solve_transport(const Vector& p, const Vector& q, const Matrix& ground);

double w1_exact(const Vector& p, const Vector& q, const Matrix& ground);

// Optimality certificate: primal feasibility (marginals match within tol),
// dual feasibility (u_i + v_j <= ground_ij + tol), and duality gap
// |cost - (p.u + q.v)| <= tol. Used by tests and by debug builds.
bool certify_transport(const Vector& p, const Vector& q, const Matrix& ground,
                       const TransportResult& result, double tol = 1e-7);

}  // namespace simsr
