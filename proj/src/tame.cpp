#include "nmloc/tame.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "nmloc/error.hpp"

namespace nmloc {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Shell size (2r+1)^d - (2r-1)^d written as sum_j c_j r^j.
std::vector<std::pair<double, int>> shell_terms(int d) {
    std::vector<std::pair<double, int>> out;
    for (int j = 0; j < d; ++j)
        if ((d - j) % 2 == 1) out.push_back({2.0 * binom(d, j) * std::pow(2.0, j), j});
    return out;
}

}  // namespace

LatticeSum lattice_sum(int d, double alpha0, long cutoff) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
    if (!(2.0 * alpha0 > d)) throw Error(ErrorKind::InvalidArgument, "alpha0 must exceed d/2");
    if (cutoff <= 0) cutoff = d == 1 ? 1000000 : 2000;

    const auto terms = shell_terms(d);
    auto f = [&](double r) {
        double v = 0.0;
        for (auto [c, j] : terms) v += c * std::pow(r, j - 2.0 * alpha0);
        return v;
    };

    // Smallest terms first so the long tail of the partial sum is not lost.
    double partial = 0.0, comp = 0.0;
    for (long r = cutoff; r >= 1; --r) {
        const double y = f(static_cast<double>(r)) - comp;
        const double t = partial + y;
        comp = (t - partial) - y;
        partial = t;
    }
    partial += 1.0;

    // sum_{r>R} c r^{-p} = c [R^{1-p}/(p-1) - R^{-p}/2 + p R^{-p-1}/12
    //                        - p(p+1)(p+2) R^{-p-3}/720 + ...]
    const double R = static_cast<double>(cutoff);
    double tail = 0.0, err = 0.0;
    for (auto [c, j] : terms) {
        const double p = 2.0 * alpha0 - j;
        tail += c * (std::pow(R, 1.0 - p) / (p - 1.0) - 0.5 * std::pow(R, -p) + p * std::pow(R, -p - 1.0) / 12.0 -
                     p * (p + 1.0) * (p + 2.0) * std::pow(R, -p - 3.0) / 720.0);
        err += std::abs(c) * p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * std::pow(R, -p - 5.0) / 30240.0;
    }
    // Rounding of the compensated sum.
    err += 4.0 * std::numeric_limits<double>::epsilon() * partial;

    LatticeSum out;
    out.partial = partial;
    out.tail = tail;
    out.value = partial + tail;
    out.error_bound = err;
    out.cutoff = cutoff;
    return out;
}

TameConstants make_tame_constants(int d, double alpha0) {
    TameConstants tc;
    tc.d = d;
    tc.alpha0 = alpha0;
    tc.sum = lattice_sum(d, alpha0);
    tc.K0 = std::sqrt(20.0 * tc.sum.value);
    tc.C0 = tc.K0 + tc.K1(alpha0);
    return tc;
}

double TameConstants::K1(double s) const {
    if (s <= 0.0) throw Error(ErrorKind::TameRange, "K1 needs s > 0");
    return std::pow(1.0 - std::pow(10.0, -1.0 / (2.0 * s)), -s) * std::sqrt(2.0 * sum.value);
}

double tame_bound_check(const LatticeOperator& x, const LatticeOperator& y, double s, const TameConstants& tc) {
    if (s < tc.alpha0) throw Error(ErrorKind::TameRange, "tame range: s < alpha0");
    const double grid[2] = {tc.alpha0, s};
    const auto nx = sobolev_norms(x, grid);
    const auto ny = sobolev_norms(y, grid);
    const double lhs = sobolev_norm(multiply(x, y), s);
    return tc.K0 * nx[0] * ny[1] + tc.K1(s) * nx[1] * ny[0] - lhs;
}

std::vector<double> tame_bound_margins(const LatticeOperator& x, const LatticeOperator& y,
                                       std::span<const double> grid, const TameConstants& tc) {
    std::vector<double> g = {tc.alpha0};
    for (double s : grid) {
        if (s < tc.alpha0) throw Error(ErrorKind::TameRange, "tame range: s < alpha0");
        g.push_back(s);
    }
    const auto nx = sobolev_norms(x, g);
    const auto ny = sobolev_norms(y, g);
    const auto nxy = sobolev_norms(multiply(x, y), g);
    std::vector<double> out;
    for (std::size_t i = 1; i < g.size(); ++i)
        out.push_back(tc.K0 * nx[0] * ny[i] + tc.K1(g[i]) * nx[i] * ny[0] - nxy[i]);
    return out;
}

}  // namespace nmloc
