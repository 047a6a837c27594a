#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nmloc/error.hpp"

namespace nmloc::fixtures {

cplx random_unit_disk(Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        const cplx z(u(rng), u(rng));
        if (std::abs(z) <= 1.0) return z;
    }
}

LatticeOperator random_sparse_operator(const LatticeBox& box, Rng& rng, int diagonals, double amp, double decay) {
    const int n = box.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    std::uniform_int_distribution<int> pick(0, box.offset_count() - 1);
    std::vector<int> codes;
    for (int t = 0; t < diagonals; ++t) codes.push_back(pick(rng));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int c = box.offset_code(i, j);
            if (std::find(codes.begin(), codes.end(), c) == codes.end()) continue;
            const Site k = box.decode_offset(c);
            m(i, j) = amp * std::pow(bracket(k), -decay) * random_unit_disk(rng);
        }
    return LatticeOperator(box, std::move(m));
}

LatticeOperator random_dense_offdiag(const LatticeBox& box, Rng& rng, double amp, double decay) {
    const int n = box.size();
    const int d = box.dimension();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    Site k(d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            auto si = box.site(i);
            auto sj = box.site(j);
            for (int u = 0; u < d; ++u) k[u] = si[u] - sj[u];
            m(i, j) = amp * std::pow(bracket(k), -decay) * random_unit_disk(rng);
        }
    return LatticeOperator(box, std::move(m));
}

LatticeOperator scaled_to(const LatticeOperator& x, double s, double target) {
    const double nrm = sobolev_norm(x, s);
    if (nrm == 0.0) return x;
    return cplx(target / nrm) * x;
}

namespace {

std::string describe(const std::string& what, double lhs, double rhs) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": " << lhs << " vs " << rhs;
    return os.str();
}

}  // namespace

SuiteResult tame_suite(const LatticeBox& box, int pairs, std::uint64_t seed) {
    const int d = box.dimension();
    const double alpha0 = d == 1 ? 0.6 : 1.1;
    const TameConstants tc = make_tame_constants(d, alpha0);
    const std::vector<double> grid = {alpha0, 1.5, 3.25, 6.55};
    Rng rng(seed);
    std::uniform_int_distribution<int> ndiag(1, 6);
    std::uniform_real_distribution<double> decay(0.0, 4.0), amp(0.1, 2.0);
    auto draw = [&] { return random_sparse_operator(box, rng, ndiag(rng), amp(rng), decay(rng)); };

    SuiteResult res;
    res.worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < pairs; ++t) {
        const LatticeOperator X = draw(), Y = draw();
        const auto margins = tame_bound_margins(X, Y, grid, tc);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            res.worst = std::min(res.worst, margins[g]);
            if (margins[g] < 0.0)
                res.fail(describe("tame margin at s=" + std::to_string(grid[g]), margins[g], 0.0));
        }
        ++res.instances;

        // Chains of length 2..4 reuse the pair and add fresh factors.
        // Norms on {alpha0} + grid, index 0 being alpha0.
        std::vector<double> full = {alpha0};
        full.insert(full.end(), grid.begin(), grid.end());
        std::vector<std::vector<double>> norms = {sobolev_norms(X, full), sobolev_norms(Y, full)};
        LatticeOperator prod = multiply(X, Y);
        for (int n = 2; n <= 4; ++n) {
            if (n > 2) {
                const LatticeOperator Z = draw();
                norms.push_back(sobolev_norms(Z, full));
                prod = multiply(prod, Z);
            }
            const auto pn = sobolev_norms(prod, full);
            double low_prod = 1.0;
            for (int i = 0; i < n; ++i) low_prod *= norms[i][0];
            const double rhs0 = std::pow(tc.C0, n - 1) * low_prod;
            if (pn[0] > rhs0) res.fail(describe("low-norm chain n=" + std::to_string(n), pn[0], rhs0));
            for (std::size_t g = 1; g < full.size(); ++g) {
                double sum = 0.0;
                for (int i = 0; i < n; ++i) {
                    double others = 1.0;
                    for (int j = 0; j < n; ++j)
                        if (j != i) others *= norms[j][0];
                    sum += others * norms[i][g];
                }
                const double rhs = n * std::pow(tc.C0, n) * tc.K1(full[g]) * sum;
                if (pn[g] > rhs) res.fail(describe("high-norm chain n=" + std::to_string(n), pn[g], rhs));
            }
        }
    }
    return res;
}

SuiteResult smoothing_suite(const LatticeBox& box) {
    const int d = box.dimension();
    const int N = box.radius();
    const std::vector<double> sgrid = {0.0, 0.6, 1.0, 2.5, 4.0};
    SuiteResult res;
    res.worst = 0.0;
    Rng rng(7);
    const LatticeOperator X = random_dense_offdiag(box, rng, 1.0, 1.0) + LatticeOperator::identity(box);

    for (int m = 1; m < 2 * N; ++m) {
        const double theta = m;
        const LatticeOperator SX = smooth(X, theta);
        const LatticeOperator RX = X - SX;
        // Single diagonal at |k| = theta, and one just beyond it.
        Site k(d, 0), k1(d, 0);
        k[0] = m;
        k1[0] = m + 1;
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(box.size(), box.size());
        Eigen::MatrixXcd b = a;
        for (int i = 0; i < box.size(); ++i)
            for (int j = 0; j < box.size(); ++j) {
                const Site off = box.decode_offset(box.offset_code(i, j));
                if (off == k) a(i, j) = 0.5;
                if (off == k1) b(i, j) = 0.5;
            }
        const LatticeOperator Wa(box, a), Wb(box, b);
        const double theta_below = (m + 1) * (1.0 - 1e-12);

        for (double s : sgrid)
            for (double sp : sgrid) {
                ++res.instances;
                const double f = std::pow(theta, s - sp);
                if (s >= sp) {
                    const double lhs = sobolev_norm(SX, s), rhs = f * sobolev_norm(X, sp);
                    if (lhs > rhs * (1.0 + 1e-14)) res.fail(describe("S_theta bound", lhs, rhs));
                    const double wl = sobolev_norm(smooth(Wa, theta), s), wr = f * sobolev_norm(Wa, sp);
                    const double gap = std::abs(wl - wr) / wr;
                    res.worst = std::max(res.worst, gap);
                    if (gap > 1e-12) res.fail(describe("S_theta witness not tight", wl, wr));
                }
                if (s <= sp) {
                    const double lhs = sobolev_norm(RX, s), rhs = f * sobolev_norm(X, sp);
                    if (lhs > rhs * (1.0 + 1e-14)) res.fail(describe("(I-S_theta) bound", lhs, rhs));
                    const double fb = std::pow(theta_below, s - sp);
                    const LatticeOperator rb = Wb - smooth(Wb, theta_below);
                    const double wl = sobolev_norm(rb, s), wr = fb * sobolev_norm(Wb, sp);
                    if (wl > wr * (1.0 + 1e-14)) res.fail(describe("(I-S_theta) witness bound", wl, wr));
                    const double gap = std::abs(wl - wr) / wr;
                    res.worst = std::max(res.worst, gap);
                    if (gap > 1e-9) res.fail(describe("(I-S_theta) witness not tight", wl, wr));
                }
            }
    }
    return res;
}

Model make_model(PotentialKind kind, int d, int N, double s, double epsilon, int M) {
    const LatticeBox box(d, N, M < 0 ? std::max(1, N / 2) : M);
    PotentialSpec ps;
    ps.kind = kind;
    const double om[3] = {golden_mean(), std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0};
    ps.omega.assign(om, om + d);
    HoppingSpec hs;
    hs.s_exponent = s;
    hs.epsilon = epsilon;
    return {build_hopping(hs, box), build_potential(ps, box)};
}

SchemeParams empirical_params(int d, double s, double epsilon, double gamma, Mode mode) {
    SchemeParams p;
    p.alpha0 = d == 1 ? 0.6 : 1.1;
    p.s_hopping = s;
    p.epsilon = epsilon;
    p.derive_alphas(d);
    p.gamma = gamma;
    p.mode = mode;
    if (d > 1) p.tau = 2.5;
    return p;
}

SuiteResult homological_suite(int N, int instances, std::uint64_t seed) {
    const Model m = make_model(PotentialKind::Maryland, 1, N, 4.0, 0.1, N);
    const LatticeBox& box = m.D.box;
    const double tau = 1.0;
    const double gamma = distal_margin(m.D.diag, tau, 1.0, 2 * N).best_gamma;
    const SchemeParams p = empirical_params(1, 4.0, 0.1, gamma);
    const std::vector<double> grid = {p.alpha0, p.alpha, p.alpha1 - tau};

    Rng rng(seed);
    std::uniform_real_distribution<double> decay(0.0, 3.0), theta(1.0, 2.0 * N);
    SuiteResult res;
    for (int t = 0; t < instances; ++t) {
        const LatticeOperator G = random_dense_offdiag(box, rng, 1.0, decay(rng));
        const double th = theta(rng);
        const HomologicalSolution hs = solve_generator(m.D, G, th, tau, gamma, grid);
        ++res.instances;

        Eigen::MatrixXcd resid = commutator_with_diagonal(m.D.values(), hs.W.a) + smooth(box, G.a, th);
        resid.diagonal().setZero();
        const double r = resid.cwiseAbs().maxCoeff();
        res.worst = std::max(res.worst, r);
        if (r > 1e-10) res.fail(describe("homological residual", r, 1e-10));
        if (hs.W.a.diagonal().cwiseAbs().maxCoeff() != 0.0) res.fail("generator diagonal is not exactly zero");
        for (std::size_t q = 0; q < grid.size(); ++q) {
            const double lhs = sobolev_norm(hs.W, grid[q]);
            const double rhs = sobolev_norm(smooth(G, th), grid[q] + tau) / gamma;
            if (lhs > rhs) res.fail(describe("generator bound at s=" + std::to_string(grid[q]), lhs, rhs));
        }
    }
    return res;
}

SuiteResult fixed_point_suite(int N, int instances, std::uint64_t seed) {
    const LatticeBox box(1, N, N);
    const int n = box.size();
    const TameConstants tc = make_tame_constants(1, 0.6);
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0), decay(1.0, 4.0);
    FixedPointOptions fo;
    fo.allow_direct_fallback = false;

    SuiteResult res;
    for (int t = 0; t < instances; ++t) {
        LatticeOperator E = random_dense_offdiag(box, rng, 1.0, decay(rng));
        E = E + LatticeOperator::diagonal(box, Eigen::VectorXcd::Random(n));
        // Target C0 |Q - I| well inside 1/10 so the inverse also qualifies.
        E = scaled_to(E, tc.alpha0, 0.07 * u(rng) / tc.C0);
        const LatticeOperator Q = LatticeOperator::identity(box) + E;
        const LatticeOperator Qinv(box, Q.a.inverse());
        const LatticeOperator P = scaled_to(random_dense_offdiag(box, rng, 1.0, decay(rng)) +
                                                LatticeOperator::diagonal(box, Eigen::VectorXcd::Random(n)),
                                            tc.alpha0, u(rng));
        const LatticeOperator Pp = scaled_to(random_dense_offdiag(box, rng, 1.0, decay(rng)), tc.alpha0, u(rng));

        const FixedPointSolution fp = solve_diagonal_correction(Q, Qinv, P, Pp, tc, fo);
        ++res.instances;
        if (!fp.contraction_holds || !fp.used_fixed_point) {
            res.fail("contraction condition unexpectedly fails");
            continue;
        }
        const Eigen::VectorXcd xd = solve_diagonal_correction_direct(Q.a, Qinv.a, P.a, Pp.a);
        const double gap = (fp.X - xd).cwiseAbs().maxCoeff();
        res.worst = std::max(res.worst, gap);
        if (gap > 1e-10) res.fail(describe("fixed point vs direct", gap, 1e-10));

        const double xn = fp.X.cwiseAbs().maxCoeff();
        const double bound = 2.0 * (sobolev_norm(multiply(Qinv, multiply(P, Q)), tc.alpha0) +
                                    sobolev_norm(Pp, tc.alpha0));
        if (xn > bound) res.fail(describe("fixed point size bound", xn, bound));
    }
    return res;
}

SuiteResult neumann_suite(int N, int instances, std::uint64_t seed) {
    const LatticeBox box(1, N, N);
    const TameConstants tc = make_tame_constants(1, 0.6);
    const std::vector<double> grid = {0.6, 1.5, 3.25, 6.55};
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.01, 1.0), decay(0.5, 4.0);

    SuiteResult res;
    for (int t = 0; t < instances; ++t) {
        const double target = u(rng) * 0.5 / (4.0 * tc.C0 * tc.C0);
        const LatticeOperator W = scaled_to(random_dense_offdiag(box, rng, 1.0, decay(rng)), tc.alpha0, target);
        const NeumannResult nr = neumann_invert(W, tc, grid, NeumannPolicy::Theory);
        ++res.instances;
        if (!nr.precondition_holds || !nr.used_series) res.fail("smallness condition unexpectedly fails");
        res.worst = std::max(res.worst, nr.inverse_residual);
        if (nr.inverse_residual > 1e-12) res.fail(describe("inverse residual", nr.inverse_residual, 1e-12));
        for (std::size_t q = 0; q < grid.size(); ++q)
            if (nr.bound_margin[q] < 0.0) res.fail(describe("Neumann bound margin", nr.bound_margin[q], 0.0));
        if (nr.vinv_alpha0 > 2.0) res.fail(describe("|V^-1|_a0", nr.vinv_alpha0, 2.0));
    }
    return res;
}

}  // namespace nmloc::fixtures
