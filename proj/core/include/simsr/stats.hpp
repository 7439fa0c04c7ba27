#pragma once

#include "simsr/types.hpp"

#include <vector>

namespace simsr {

// Spearman rank correlation with midranks for ties. Throws ValidationError
// on size mismatch or fewer than 2 points; returns 0 when either input is
// constant (rank variance zero).
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Trapezoidal area under a curve sampled at strictly increasing xs.
double auc_trapezoid(const std::vector<double>& xs, const std::vector<double>& ys);

// Midranks (1-based, ties averaged).
std::vector<double> midranks(const std::vector<double>& v);

}  // namespace simsr
