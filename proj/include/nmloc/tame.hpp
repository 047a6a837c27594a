#pragma once

#include <span>
#include <vector>

#include "nmloc/operator.hpp"

namespace nmloc {

// sum_{k in Z^d} <k>^{-2 alpha0}, summed shell by shell up to |k|_inf = cutoff
// with an Euler-Maclaurin correction for the rest.
struct LatticeSum {
    double value = 0.0;
    double partial = 0.0;
    double tail = 0.0;
    // Bound on |value - exact| from the first neglected correction term.
    double error_bound = 0.0;
    long cutoff = 0;
    double relative_error() const { return error_bound / value; }
};

LatticeSum lattice_sum(int d, double alpha0, long cutoff = 0);

struct TameConstants {
    int d = 1;
    double alpha0 = 0.0;
    LatticeSum sum;
    double K0 = 0.0;
    double C0 = 0.0;

    double K1(double s) const;
};

TameConstants make_tame_constants(int d, double alpha0);

// K0 |X|_{a0} |Y|_s + K1(s) |X|_s |Y|_{a0} - |XY|_s
double tame_bound_check(const LatticeOperator& x, const LatticeOperator& y, double s,
                        const TameConstants& tc);

// Same margin for every s in grid, with XY formed once.
std::vector<double> tame_bound_margins(const LatticeOperator& x, const LatticeOperator& y,
                                       std::span<const double> grid, const TameConstants& tc);

}  // namespace nmloc
