#include "simsr/metric.hpp"

#include "simsr/errors.hpp"
#include "simsr/transport.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace simsr {
namespace {

// Successor index for a one-hot transition row, or -1 if the row is not
// one-hot within tolerance.
int one_hot_successor(const Vector& row, double tol = 1e-9) {
    int hit = -1;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (row(j) > 1.0 - tol) {
            if (hit >= 0) return -1;
            hit = static_cast<int>(j);
        } else if (row(j) > tol) {
            return -1;
        }
    }
    return hit;
}

Matrix reward_gap(const Vector& r) {
    const auto n = r.size();
    Matrix d(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = 0; y < n; ++y) d(x, y) = std::abs(r(x) - r(y));
    return d;
}

}  // namespace

const char* to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::DeterministicBisim: return "deterministic";
        case OperatorKind::WassersteinBisim: return "wasserstein";
        case OperatorKind::IndependentCoupling: return "independent";
    }
    throw Error("unknown OperatorKind");
}

OperatorKind operator_kind_from_string(const std::string& name) {
    if (name == "deterministic") return OperatorKind::DeterministicBisim;
    if (name == "wasserstein") return OperatorKind::WassersteinBisim;
    if (name == "independent") return OperatorKind::IndependentCoupling;
    throw ValidationError("unknown operator kind '" + name +
                          "' (expected deterministic, wasserstein, or independent)");
}

DistanceMatrix operator_step(const DistanceMatrix& U, const FiniteMDP& mdp, const Policy& policy,
                             OperatorKind kind) {
    require_valid(mdp, policy);
    if (U.rows() != mdp.n_states || U.cols() != mdp.n_states)
        throw DimensionError("operator_step: distance matrix does not match state count");
    check_distance_matrix(U);

    const Vector r = policy_reward(mdp, policy);
    const Matrix P = policy_transition(mdp, policy);
    const int n = mdp.n_states;
    DistanceMatrix out = reward_gap(r);

    switch (kind) {
        case OperatorKind::IndependentCoupling: {
            out.noalias() += mdp.gamma * P * U * P.transpose();
            break;
        }
        case OperatorKind::DeterministicBisim: {
            std::vector<int> succ(n);
            for (int x = 0; x < n; ++x) {
                succ[x] = one_hot_successor(P.row(x));
                if (succ[x] < 0)
                    throw ValidationError(
                        "operator_step: DeterministicBisim requires one-hot policy transitions "
                        "(row " +
                        std::to_string(x) + " is stochastic)");
            }
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) out(x, y) += mdp.gamma * U(succ[x], succ[y]);
            break;
        }
        case OperatorKind::WassersteinBisim: {
            // W1 is symmetric in (p, q) for symmetric ground, so only the
            // upper triangle (diagonal included: the ground may be diffuse)
            // is solved.
            for (int x = 0; x < n; ++x) {
                for (int y = x; y < n; ++y) {
                    const double w = w1_exact(P.row(x).transpose(), P.row(y).transpose(), U);
                    out(x, y) += mdp.gamma * w;
                    if (y != x) out(y, x) += mdp.gamma * w;
                }
            }
            break;
        }
    }

    out = ((out + out.transpose()) / 2.0).eval();
    return out.cwiseMax(0.0);
}

FixedPointReport solve_fixed_point(const FiniteMDP& mdp, const Policy& policy, OperatorKind kind,
                                   double tol, int max_iter, const DistanceMatrix* init) {
    require_valid(mdp, policy);
    if (tol <= 0.0) throw ValidationError("solve_fixed_point: tol must be positive");

    DistanceMatrix U = init ? *init : DistanceMatrix::Zero(mdp.n_states, mdp.n_states);
    if (init) {
        if (U.rows() != mdp.n_states || U.cols() != mdp.n_states)
            throw DimensionError("solve_fixed_point: init does not match state count");
        check_distance_matrix(U);
    }

    DistanceMatrix next = operator_step(U, mdp, policy, kind);
    double residual = (next - U).cwiseAbs().maxCoeff();

    if (max_iter <= 0) {
        // Contraction gives residual_k <= gamma^k * residual_0, so
        // k = log(tol / residual_0) / log(gamma) iterations suffice;
        // doubled for safety.
        if (mdp.gamma <= 0.0 || residual <= tol) {
            max_iter = 2;
        } else {
            const double needed = std::log(tol / residual) / std::log(mdp.gamma);
            max_iter = 2 * static_cast<int>(std::ceil(needed)) + 16;
        }
    }

    int iterations = 1;
    while (residual > tol) {
        if (iterations >= max_iter)
            throw ConvergenceError("solve_fixed_point: max_iter exceeded", residual, iterations);
        U = next;
        next = operator_step(U, mdp, policy, kind);
        residual = (next - U).cwiseAbs().maxCoeff();
        ++iterations;
    }

    FixedPointReport report;
    report.distances = next;
    report.iterations = iterations;
    report.final_residual = residual;
    return report;
}

ValueBoundReport value_bound_check(const FiniteMDP& mdp, const Policy& policy,
                                   const DistanceMatrix& U, double tol) {
    require_valid(mdp, policy);
    if (U.rows() != mdp.n_states || U.cols() != mdp.n_states)
        throw DimensionError("value_bound_check: distance matrix does not match state count");
    if (tol <= 0.0) throw ValidationError("value_bound_check: tol must be positive");

    // V is solved two orders tighter than U so the shared slack below is
    // dominated by U's solver error.
    const Vector V = policy_value(mdp, policy, tol * 1e-2);

    ValueBoundReport report;
    report.slack = tol * (1.0 + mdp.gamma) / (1.0 - mdp.gamma);
    double worst = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < mdp.n_states; ++x) {
        for (int y = 0; y < mdp.n_states; ++y) {
            const double gap = std::abs(V(x) - V(y)) - U(x, y);
            if (gap > worst) {
                worst = gap;
                report.x = x;
                report.y = y;
            }
        }
    }
    report.violation = worst;
    report.ok = worst <= report.slack;
    if (report.ok) {
        report.x = -1;
        report.y = -1;
    }
    return report;
}

}  // namespace simsr
