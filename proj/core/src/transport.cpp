#include "simsr/transport.hpp"

#include "simsr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace simsr {
namespace {

constexpr double kReducedCostTol = 1e-10;

void check_inputs(const Vector& p, const Vector& q, const Matrix& ground) {
    if (p.size() == 0 || q.size() == 0) throw ValidationError("transport: empty distribution");
    if (ground.rows() != p.size() || ground.cols() != q.size())
        throw DimensionError("transport: ground cost shape does not match distributions");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p(i)) || p(i) < -1e-12)
            throw ValidationError("transport: p has a negative or non-finite entry");
    }
    for (Eigen::Index j = 0; j < q.size(); ++j) {
        if (!std::isfinite(q(j)) || q(j) < -1e-12)
            throw ValidationError("transport: q has a negative or non-finite entry");
    }
    if (!ground.allFinite()) throw ValidationError("transport: ground cost has non-finite entries");
    if (std::abs(p.sum() - 1.0) > 1e-9) throw ValidationError("transport: p does not sum to 1");
    if (std::abs(q.sum() - 1.0) > 1e-9) throw ValidationError("transport: q does not sum to 1");
}

// Basic cell of the transportation tableau. The basis always forms a
// spanning tree of the bipartite supply/demand graph with n + m - 1 cells.
struct Cell {
    int i;
    int j;
    double flow;
};

struct Tableau {
    int n = 0;
    int m = 0;
    std::vector<Cell> basis;

    int find(int i, int j) const {
        for (int k = 0; k < static_cast<int>(basis.size()); ++k)
            if (basis[k].i == i && basis[k].j == j) return k;
        return -1;
    }
};

// Northwest-corner initialization. Advancing exactly one index per step
// (even on ties) yields exactly n + m - 1 basic cells, some possibly with
// zero flow; that degeneracy is handled by the pivot rule.
Tableau northwest_corner(const Vector& supply, const Vector& demand) {
    Tableau t;
    t.n = static_cast<int>(supply.size());
    t.m = static_cast<int>(demand.size());
    std::vector<double> s(supply.data(), supply.data() + supply.size());
    std::vector<double> d(demand.data(), demand.data() + demand.size());
    int i = 0, j = 0;
    while (static_cast<int>(t.basis.size()) < t.n + t.m - 1) {
        const double f = std::min(s[i], d[j]);
        t.basis.push_back({i, j, f});
        s[i] -= f;
        d[j] -= f;
        if (i == t.n - 1 && j == t.m - 1) break;
        if (j == t.m - 1) {
            ++i;
        } else if (i == t.n - 1) {
            ++j;
        } else if (s[i] <= d[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return t;
}

// Duals from the spanning-tree structure: fix u_0 = 0, then propagate
// u_i + v_j = c_ij across basic cells.
void compute_duals(const Tableau& t, const Matrix& cost, Vector& u, Vector& v) {
    u.setConstant(t.n, std::numeric_limits<double>::quiet_NaN());
    v.setConstant(t.m, std::numeric_limits<double>::quiet_NaN());
    u(0) = 0.0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (const Cell& c : t.basis) {
            const bool ku = !std::isnan(u(c.i));
            const bool kv = !std::isnan(v(c.j));
            if (ku && !kv) {
                v(c.j) = cost(c.i, c.j) - u(c.i);
                progress = true;
            } else if (!ku && kv) {
                u(c.i) = cost(c.i, c.j) - v(c.j);
                progress = true;
            }
        }
    }
    // The basis of a balanced problem spans all rows and columns, so every
    // dual is determined once u_0 is pinned.
    for (int i = 0; i < t.n; ++i)
        if (std::isnan(u(i))) throw Error("transport: basis does not span all rows");
    for (int j = 0; j < t.m; ++j)
        if (std::isnan(v(j))) throw Error("transport: basis does not span all columns");
}

// Unique cycle created by adding (ei, ej) to the basis tree, found by BFS
// over the bipartite adjacency of basic cells. Returned as an alternating
// sequence of basis indices starting with the cell that shares row ei.
std::vector<int> find_cycle(const Tableau& t, int ei, int ej) {
    const int nb = static_cast<int>(t.basis.size());
    // Path in the tree from row node ei to column node ej; appending the
    // entering cell closes the cycle. Nodes: rows 0..n-1, cols n..n+m-1.
    const int nn = t.n + t.m;
    std::vector<int> parent_node(nn, -1);
    std::vector<int> parent_edge(nn, -1);
    std::vector<char> seen(nn, 0);
    std::vector<int> queue;
    queue.push_back(ei);
    seen[ei] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        const int node = queue[h];
        for (int k = 0; k < nb; ++k) {
            const int a = t.basis[k].i;
            const int b = t.n + t.basis[k].j;
            int other = -1;
            if (a == node)
                other = b;
            else if (b == node)
                other = a;
            else
                continue;
            if (seen[other]) continue;
            seen[other] = 1;
            parent_node[other] = node;
            parent_edge[other] = k;
            queue.push_back(other);
        }
    }
    const int target = t.n + ej;
    if (!seen[target]) throw Error("transport: basis tree is disconnected");
    std::vector<int> path;
    for (int node = target; node != ei; node = parent_node[node]) path.push_back(parent_edge[node]);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

TransportResult solve_transport(const Vector& p, const Vector& q, const Matrix& ground) {
    check_inputs(p, q, ground);

    // Zero-mass rows and columns carry no flow and only add degenerate
    // basic cells, so the solver runs on the positive-mass submatrix.
    std::vector<int> rows, cols;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) rows.push_back(static_cast<int>(i));
    for (Eigen::Index j = 0; j < q.size(); ++j)
        if (q(j) > 0.0) cols.push_back(static_cast<int>(j));
    if (rows.empty() || cols.empty()) throw ValidationError("transport: a distribution has no mass");

    const int n = static_cast<int>(rows.size());
    const int m = static_cast<int>(cols.size());
    Vector supply(n), demand(m);
    Matrix cost(n, m);
    for (int i = 0; i < n; ++i) supply(i) = p(rows[i]);
    for (int j = 0; j < m; ++j) demand(j) = q(cols[j]);
    // Absorb rounding drift so the reduced problem is exactly balanced.
    supply(n - 1) += 1.0 - supply.sum();
    demand(m - 1) += 1.0 - demand.sum();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cost(i, j) = ground(rows[i], cols[j]);

    Tableau t = northwest_corner(supply, demand);
    Vector u(n), v(m);

    // Pivot cap: the simplex visits each basis at most once under the
    // deterministic lowest-index tie-breaks below; n*m*(n+m) is a loose
    // practical ceiling for the sizes this library targets.
    const std::int64_t max_pivots = static_cast<std::int64_t>(n) * m * (n + m) + 64;
    std::int64_t pivots = 0;
    while (true) {
        compute_duals(t, cost, u, v);

        // Entering variable: most negative reduced cost, lowest (i, j) on
        // ties, so reruns of the same problem pivot identically.
        int ei = -1, ej = -1;
        double best = -kReducedCostTol;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                const double rc = cost(i, j) - u(i) - v(j);
                if (rc < best) {
                    best = rc;
                    ei = i;
                    ej = j;
                }
            }
        }
        if (ei < 0) break;  // optimal

        if (++pivots > max_pivots)
            throw ConvergenceError("transport: pivot cap exceeded", -best, pivots);

        // Walk the cycle; odd positions (0-based) lose flow.
        const std::vector<int> cycle = find_cycle(t, ei, ej);
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (std::size_t k = 0; k < cycle.size(); k += 2) {
            const double f = t.basis[cycle[k]].flow;
            if (f < theta) theta = f;
        }
        // Leaving variable: among cells hitting zero, lowest (i, j) wins,
        // keeping the pivot sequence deterministic under degeneracy.
        for (std::size_t k = 0; k < cycle.size(); k += 2) {
            const Cell& c = t.basis[cycle[k]];
            if (c.flow <= theta + 1e-15) {
                if (leave < 0) {
                    leave = cycle[k];
                } else {
                    const Cell& best_c = t.basis[leave];
                    if (c.i < best_c.i || (c.i == best_c.i && c.j < best_c.j)) leave = cycle[k];
                }
            }
        }

        for (std::size_t k = 0; k < cycle.size(); ++k) {
            Cell& c = t.basis[cycle[k]];
            c.flow += (k % 2 == 0) ? -theta : theta;
            if (c.flow < 0.0) c.flow = 0.0;  // clip roundoff
        }
        Cell& out = t.basis[leave];
        out.i = ei;
        out.j = ej;
        out.flow = theta;
    }

    TransportResult result;
    result.plan = Matrix::Zero(p.size(), q.size());
    for (const Cell& c : t.basis) result.plan(rows[c.i], cols[c.j]) += c.flow;
    result.u = Vector::Zero(p.size());
    result.v = Vector::Zero(q.size());
    for (int i = 0; i < n; ++i) result.u(rows[i]) = u(i);
    for (int j = 0; j < m; ++j) result.v(cols[j]) = v(j);
    result.cost = (result.plan.array() * ground.array()).sum();
    result.pivots = pivots;

#ifndef NDEBUG
    if (!certify_transport(p, q, ground, result))
        throw Error("transport: optimality certificate failed");
#endif
    return result;
}

double w1_exact(const Vector& p, const Vector& q, const Matrix& ground) {
    return solve_transport(p, q, ground).cost;
}

bool certify_transport(const Vector& p, const Vector& q, const Matrix& ground,
                       const TransportResult& result, double tol) {
    if (result.plan.rows() != p.size() || result.plan.cols() != q.size()) return false;
    if (result.plan.minCoeff() < -tol) return false;
    if (((result.plan.rowwise().sum() - p).cwiseAbs().maxCoeff()) > tol) return false;
    if (((result.plan.colwise().sum().transpose() - q).cwiseAbs().maxCoeff()) > tol) return false;
    // Dual feasibility only binds where mass exists; zero-mass rows and
    // columns keep their placeholder duals of 0.
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) <= 0.0) continue;
        for (Eigen::Index j = 0; j < q.size(); ++j) {
            if (q(j) <= 0.0) continue;
            if (result.u(i) + result.v(j) > ground(i, j) + tol) return false;
        }
    }
    double dual_obj = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) dual_obj += p(i) * result.u(i);
    for (Eigen::Index j = 0; j < q.size(); ++j) dual_obj += q(j) * result.v(j);
    return std::abs(result.cost - dual_obj) <= tol;
}

}  // namespace simsr
