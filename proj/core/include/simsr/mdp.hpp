#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "simsr/types.hpp"

namespace simsr {

/// Finite MDP with dense transition tensor and reward table.
/// transition[a](s, s') is the probability of landing in s' after taking
/// action a in state s; every (s, a) row sums to one.
struct FiniteMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<Matrix> transition;  // indexed by action, each n_states x n_states
    Matrix reward;                   // n_states x n_actions
    double gamma = 0.99;
};

/// Stochastic policy: probs(s, a), rows sum to one.
struct Policy {
    Matrix probs;
};

/// Symmetric nonnegative |S| x |S| matrix of behavioral distances.
/// The diagonal is NOT required to be zero: independent-coupling fixed
/// points are diffuse on stochastic MDPs.
using DistanceMatrix = Matrix;

struct MdpViolation {
    std::string message;
};

/// Reports every invariant violation (row sums, negativity, non-finite
/// entries, discount range) with the offending indices.
std::vector<MdpViolation> validate_mdp(const FiniteMDP& mdp);

/// Throws ValidationError listing all violations; no-op on a valid MDP.
void require_valid(const FiniteMDP& mdp);

void require_valid(const FiniteMDP& mdp, const Policy& policy);

/// Symmetry within 1e-9, nonnegative, finite. Throws ValidationError.
void check_distance_matrix(const DistanceMatrix& U);

/// r^pi(s) = sum_a pi(a|s) r(s, a)
Vector policy_reward(const FiniteMDP& mdp, const Policy& policy);

/// P^pi(s'|s) = sum_a pi(a|s) P(s'|s, a); rows sum to one.
Matrix policy_transition(const FiniteMDP& mdp, const Policy& policy);

/// Value of the policy by fixed-point iteration from V = 0.
/// Stops when the Bellman residual ||V - (r + gamma P V)||_inf <= tol.
Vector policy_value(const FiniteMDP& mdp, const Policy& policy, double tol);

/// Greedy-optimal deterministic policy from exact value iteration,
/// lowest-index tie-breaking on actions.
Policy optimal_policy(const FiniteMDP& mdp, double tol = 1e-12);

Policy uniform_policy(int n_states, int n_actions);

/// Random row-stochastic MDP (flat Dirichlet rows, rewards in [0,1]).
/// deterministic = true draws one-hot transition rows instead.
FiniteMDP random_mdp(int n_states, int n_actions, uint64_t seed,
                     double gamma_lo = 0.5, double gamma_hi = 0.95,
                     bool deterministic = false);

Policy random_policy(int n_states, int n_actions, uint64_t seed);

/// Plain-text serialization; format documented in docs/file-formats.md.
void save_mdp(const FiniteMDP& mdp, const std::filesystem::path& path);
FiniteMDP load_mdp(const std::filesystem::path& path);

}  // namespace simsr
