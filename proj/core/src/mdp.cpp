#include "simsr/mdp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "simsr/errors.hpp"
#include "simsr/rng.hpp"

namespace simsr {

namespace {

constexpr double kRowSumTol = 1e-9;

std::string fmt_idx(const char* what, int s, int a, int sp = -1) {
    std::ostringstream os;
    os << what << " at (s=" << s << ", a=" << a;
    if (sp >= 0) os << ", s'=" << sp;
    os << ")";
    return os.str();
}

}  // namespace

std::vector<MdpViolation> validate_mdp(const FiniteMDP& mdp) {
    std::vector<MdpViolation> out;
    if (mdp.n_states <= 0) out.push_back({"n_states must be positive"});
    if (mdp.n_actions <= 0) out.push_back({"n_actions must be positive"});
    if (!(mdp.gamma > 0.0 && mdp.gamma < 1.0))
        out.push_back({"gamma must lie in (0,1), got " + std::to_string(mdp.gamma)});
    if (static_cast<int>(mdp.transition.size()) != mdp.n_actions) {
        out.push_back({"transition tensor has wrong action count"});
        return out;
    }
    if (mdp.reward.rows() != mdp.n_states || mdp.reward.cols() != mdp.n_actions) {
        out.push_back({"reward table has wrong shape"});
        return out;
    }
    for (int a = 0; a < mdp.n_actions; ++a) {
        const Matrix& P = mdp.transition[a];
        if (P.rows() != mdp.n_states || P.cols() != mdp.n_states) {
            out.push_back({"transition matrix for action " + std::to_string(a) +
                           " has wrong shape"});
            continue;
        }
        for (int s = 0; s < mdp.n_states; ++s) {
            double sum = 0.0;
            for (int sp = 0; sp < mdp.n_states; ++sp) {
                const double p = P(s, sp);
                if (!std::isfinite(p)) out.push_back({fmt_idx("non-finite probability", s, a, sp)});
                else if (p < 0.0) out.push_back({fmt_idx("negative probability", s, a, sp)});
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTol)
                out.push_back({fmt_idx("transition row does not sum to 1", s, a) +
                               ", sum=" + std::to_string(sum)});
        }
    }
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            if (!std::isfinite(mdp.reward(s, a)))
                out.push_back({fmt_idx("non-finite reward", s, a)});
    return out;
}

void require_valid(const FiniteMDP& mdp) {
    const auto violations = validate_mdp(mdp);
    if (violations.empty()) return;
    std::string msg = "invalid MDP:";
    for (const auto& v : violations) msg += "\n  " + v.message;
    throw ValidationError(msg);
}

void require_valid(const FiniteMDP& mdp, const Policy& policy) {
    require_valid(mdp);
    if (policy.probs.rows() != mdp.n_states || policy.probs.cols() != mdp.n_actions)
        throw DimensionError("policy shape does not match MDP");
    for (int s = 0; s < mdp.n_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double p = policy.probs(s, a);
            if (!std::isfinite(p) || p < 0.0)
                throw ValidationError("policy has invalid probability at s=" +
                                      std::to_string(s) + ", a=" + std::to_string(a));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw ValidationError("policy row " + std::to_string(s) + " sums to " +
                                  std::to_string(sum));
    }
}

void check_distance_matrix(const DistanceMatrix& U) {
    if (U.rows() != U.cols()) throw DimensionError("distance matrix must be square");
    for (int i = 0; i < U.rows(); ++i)
        for (int j = 0; j < U.cols(); ++j) {
            const double u = U(i, j);
            if (!std::isfinite(u)) throw ValidationError("distance matrix has non-finite entry");
            if (u < 0.0) throw ValidationError("distance matrix has negative entry");
            if (std::abs(u - U(j, i)) > 1e-9)
                throw ValidationError("distance matrix is not symmetric");
        }
}

Vector policy_reward(const FiniteMDP& mdp, const Policy& policy) {
    if (policy.probs.rows() != mdp.reward.rows() || policy.probs.cols() != mdp.reward.cols())
        throw DimensionError("policy/reward shape mismatch");
    return (policy.probs.array() * mdp.reward.array()).rowwise().sum();
}

Matrix policy_transition(const FiniteMDP& mdp, const Policy& policy) {
    if (policy.probs.rows() != mdp.n_states ||
        policy.probs.cols() != static_cast<int>(mdp.transition.size()))
        throw DimensionError("policy/transition shape mismatch");
    Matrix P = Matrix::Zero(mdp.n_states, mdp.n_states);
    for (int a = 0; a < mdp.n_actions; ++a)
        P += policy.probs.col(a).asDiagonal() * mdp.transition[a];
    return P;
}

Vector policy_value(const FiniteMDP& mdp, const Policy& policy, double tol) {
    if (tol <= 0.0) throw ValidationError("tol must be positive");
    const Vector r = policy_reward(mdp, policy);
    const Matrix P = policy_transition(mdp, policy);
    const double r_max = r.cwiseAbs().maxCoeff();
    Vector v = Vector::Zero(mdp.n_states);
    if (r_max == 0.0) return v;

    const double g = mdp.gamma;
    const int bound =
        static_cast<int>(std::ceil(std::log(tol * (1.0 - g) / r_max) / std::log(g))) + 1;
    const int cap = std::max(bound, 1) + 8;
    for (int it = 0; it < cap; ++it) {
        Vector next = r + g * (P * v);
        const double residual = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (residual <= tol) return v;
    }
    throw ConvergenceError("policy_value failed to converge within the contraction bound",
                           (v - (r + g * (P * v))).cwiseAbs().maxCoeff(), cap);
}

Policy optimal_policy(const FiniteMDP& mdp, double tol) {
    require_valid(mdp);
    const int S = mdp.n_states, A = mdp.n_actions;
    Vector v = Vector::Zero(S);
    // Value iteration; the residual bound mirrors policy_value.
    const double r_max = std::max(mdp.reward.cwiseAbs().maxCoeff(), 1e-300);
    const int bound = static_cast<int>(
        std::ceil(std::log(tol * (1.0 - mdp.gamma) / r_max) / std::log(mdp.gamma))) + 1;
    for (int it = 0; it < std::max(bound, 1) + 8; ++it) {
        Vector next(S);
        for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a)
                best = std::max(best, mdp.reward(s, a) + mdp.gamma * mdp.transition[a].row(s).dot(v));
            next(s) = best;
        }
        const double residual = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (residual <= tol) break;
    }
    Policy pi{Matrix::Zero(S, A)};
    for (int s = 0; s < S; ++s) {
        int best_a = 0;
        double best_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a) {
            const double q = mdp.reward(s, a) + mdp.gamma * mdp.transition[a].row(s).dot(v);
            if (q > best_q + 1e-12) {
                best_q = q;
                best_a = a;
            }
        }
        pi.probs(s, best_a) = 1.0;
    }
    return pi;
}

Policy uniform_policy(int n_states, int n_actions) {
    return {Matrix::Constant(n_states, n_actions, 1.0 / n_actions)};
}

FiniteMDP random_mdp(int n_states, int n_actions, uint64_t seed, double gamma_lo,
                     double gamma_hi, bool deterministic) {
    Rng rng(derive_seed(seed, 0x4d4450ULL));  // "MDP"
    FiniteMDP m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.gamma = rng.uniform(gamma_lo, gamma_hi);
    m.reward = Matrix::Zero(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) m.reward(s, a) = rng.uniform();
    m.transition.assign(n_actions, Matrix::Zero(n_states, n_states));
    for (int a = 0; a < n_actions; ++a)
        for (int s = 0; s < n_states; ++s) {
            if (deterministic) {
                m.transition[a](s, rng.uniform_int(n_states)) = 1.0;
                continue;
            }
            // flat Dirichlet row via normalized exponentials
            double sum = 0.0;
            for (int sp = 0; sp < n_states; ++sp) {
                const double e = -std::log(1.0 - rng.uniform());
                m.transition[a](s, sp) = e;
                sum += e;
            }
            m.transition[a].row(s) /= sum;
        }
    return m;
}

Policy random_policy(int n_states, int n_actions, uint64_t seed) {
    Rng rng(derive_seed(seed, 0x504f4cULL));  // "POL"
    Matrix probs(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < n_actions; ++a) {
            const double e = -std::log(1.0 - rng.uniform());
            probs(s, a) = e;
            sum += e;
        }
        probs.row(s) /= sum;
    }
    return {probs};
}

namespace {

void write_double(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf;
}

}  // namespace

void save_mdp(const FiniteMDP& mdp, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "simsr-mdp 1\n";
    f << mdp.n_states << " " << mdp.n_actions << " ";
    write_double(f, mdp.gamma);
    f << "\n";
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (a) f << " ";
            write_double(f, mdp.reward(s, a));
        }
        f << "\n";
    }
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            for (int sp = 0; sp < mdp.n_states; ++sp) {
                if (sp) f << " ";
                write_double(f, mdp.transition[a](s, sp));
            }
            f << "\n";
        }
    if (!f) throw IoError("write failed for " + path.string());
}

FiniteMDP load_mdp(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string magic;
    int version = 0;
    f >> magic >> version;
    if (magic != "simsr-mdp" || version != 1)
        throw IoError("not a simsr-mdp v1 file: " + path.string());
    FiniteMDP m;
    f >> m.n_states >> m.n_actions >> m.gamma;
    if (!f || m.n_states <= 0 || m.n_actions <= 0)
        throw IoError("malformed MDP header in " + path.string());
    m.reward = Matrix::Zero(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) f >> m.reward(s, a);
    m.transition.assign(m.n_actions, Matrix::Zero(m.n_states, m.n_states));
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a)
            for (int sp = 0; sp < m.n_states; ++sp) f >> m.transition[a](s, sp);
    if (!f) throw IoError("truncated MDP file: " + path.string());
    return m;
}

}  // namespace simsr
