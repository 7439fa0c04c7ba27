#include "simsr/stats.hpp"

#include "simsr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simsr {

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("spearman_rho: size mismatch");
    if (x.size() < 2) throw ValidationError("spearman_rho: need at least 2 points");
    const std::vector<double> rx = midranks(x);
    const std::vector<double> ry = midranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;  // constant input has no ranking
    return sxy / std::sqrt(sxx * syy);
}

double auc_trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ValidationError("auc: size mismatch");
    if (xs.size() < 2) throw ValidationError("auc: need at least 2 points");
    double area = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double dx = xs[i] - xs[i - 1];
        if (dx <= 0.0) throw ValidationError("auc: xs must be strictly increasing");
        area += 0.5 * dx * (ys[i] + ys[i - 1]);
    }
    return area;
}

}  // namespace simsr
