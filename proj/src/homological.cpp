#include "nmloc/homological.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nmloc/error.hpp"

namespace nmloc {

namespace {

int site_distance(const LatticeBox& box, int i, int j) {
    auto si = box.site(i);
    auto sj = box.site(j);
    int m = 0;
    for (int u = 0; u < box.dimension(); ++u) m = std::max(m, std::abs(si[u] - sj[u]));
    return m;
}

double sup_abs(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

HomologicalSolution solve_generator(const Eigen::VectorXcd& d, const LatticeOperator& G, double theta, double tau,
                                    double gamma, const std::vector<double>& s_grid, const GeneratorOptions& opt) {
    const LatticeBox& box = G.box;
    const int n = box.size();
    if (d.size() != n) throw Error(ErrorKind::BoxMismatch, "divisor length does not match box");
    if (gamma <= 0.0) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");

    const double scale = 1.0 + max_entry(G);
    const double diag_max = sup_abs(G.a.diagonal());
    if (diag_max > opt.diag_tol * scale) {
        std::ostringstream os;
        os << "unreduced diagonal: max |G_ii| = " << diag_max;
        throw Error(ErrorKind::UnreducedDiagonal, os.str());
    }

    Eigen::MatrixXcd sg = smooth(box, G.a, theta);
    sg.diagonal().setZero();

    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
    double resid = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j || site_distance(box, i, j) > theta) continue;
            const cplx den = d[j] - d[i];
            if (std::abs(den) < opt.divisor_floor) {
                std::ostringstream os;
                os << "distal violation at (i=" << i << ", j=" << j << "): |d_i - d_j| = " << std::abs(den);
                throw Error(ErrorKind::DistalViolation, os.str());
            }
            w(i, j) = sg(i, j) / den;
            resid = std::max(resid, std::abs((d[i] - d[j]) * w(i, j) + sg(i, j)));
        }

    HomologicalSolution sol{LatticeOperator(box, std::move(w), G.policy), resid, theta, s_grid, {}};
    if (!s_grid.empty()) {
        const LatticeOperator sgop(box, std::move(sg), G.policy);
        const OffsetNorms wn = offset_norms(sol.W);
        const OffsetNorms gn = offset_norms(sgop);
        for (double s : s_grid) sol.bound_margin.push_back(gn.evaluate(s + tau) / gamma - wn.evaluate(s));
    }
    return sol;
}

HomologicalSolution solve_generator(const DiagonalOperator& D, const LatticeOperator& G, double theta, double tau,
                                    double gamma, const std::vector<double>& s_grid, const GeneratorOptions& opt) {
    require_same_box(D.box, G.box);
    return solve_generator(D.values(), G, theta, tau, gamma, s_grid, opt);
}

namespace {

struct AffineDiag {
    Eigen::MatrixXcd M;
    Eigen::VectorXcd b;
};

AffineDiag assemble(const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& Qinv, const Eigen::MatrixXcd& P,
                    const Eigen::MatrixXcd& Pprime) {
    AffineDiag sys;
    sys.M = Qinv.cwiseProduct(Q.transpose());
    const Eigen::MatrixXcd qp = Qinv * P;
    sys.b = qp.cwiseProduct(Q.transpose()).rowwise().sum() + Pprime.diagonal();
    return sys;
}

}  // namespace

Eigen::VectorXcd solve_diagonal_correction_direct(const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& Qinv,
                                                  const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Pprime) {
    const AffineDiag sys = assemble(Q, Qinv, P, Pprime);
    return sys.M.partialPivLu().solve(-sys.b);
}

FixedPointSolution solve_diagonal_correction(const LatticeOperator& Q, const LatticeOperator& Qinv,
                                             const LatticeOperator& P, const LatticeOperator& Pprime,
                                             const TameConstants& tc, const FixedPointOptions& opt) {
    require_same_box(Q.box, Qinv.box);
    require_same_box(Q.box, P.box);
    require_same_box(Q.box, Pprime.box);
    const LatticeBox& box = Q.box;
    const LatticeOperator I = LatticeOperator::identity(box, Q.policy);

    FixedPointSolution sol;
    sol.contraction_q = tc.C0 * sobolev_norm(Q - I, tc.alpha0);
    sol.contraction_qinv = tc.C0 * sobolev_norm(Qinv - I, tc.alpha0);
    sol.contraction_holds = sol.contraction_q <= 0.1 && sol.contraction_qinv <= 0.1;

    const AffineDiag sys = assemble(Q.a, Qinv.a, P.a, Pprime.a);
    const Eigen::VectorXcd direct = sys.M.partialPivLu().solve(-sys.b);
    const double target = opt.tol * std::max(1.0, sup_abs(sys.b));

    if (sol.contraction_holds) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(box.size());
        double defect = sup_abs(sys.b);
        int it = 0;
        while (defect > target) {
            if (it == opt.max_iter) {
                std::ostringstream os;
                os << "fixed point stalled after " << it << " iterations, defect " << defect;
                throw Error(ErrorKind::FixedPointStalled, os.str());
            }
            x -= sys.M * x + sys.b;
            defect = sup_abs(sys.M * x + sys.b);
            ++it;
        }
        sol.X = std::move(x);
        sol.iterations = it;
        sol.used_fixed_point = true;
        sol.direct_gap = sup_abs(sol.X - direct);
    } else {
        if (!opt.allow_direct_fallback)
            throw Error(ErrorKind::FixedPointStalled, "contraction condition fails and direct fallback is disabled");
        std::ostringstream os;
        os << "contraction condition fails (C0|Q-I| = " << sol.contraction_q << ", C0|Q^-1-I| = "
           << sol.contraction_qinv << "); using direct solve";
        sol.warning = os.str();
        sol.X = direct;
    }
    sol.final_defect = sup_abs(sys.M * sol.X + sys.b);
    return sol;
}

NeumannResult neumann_invert(const LatticeOperator& W, const TameConstants& tc, const std::vector<double>& s_grid,
                             NeumannPolicy policy) {
    const LatticeBox& box = W.box;
    const int n = box.size();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd V = I + W.a;

    NeumannResult res;
    res.s_grid = s_grid;
    res.smallness = 4.0 * tc.C0 * tc.C0 * sobolev_norm(W, tc.alpha0);
    res.precondition_holds = res.smallness <= 0.5;

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
    res.rcond = lu.rcond();

    Eigen::MatrixXcd vinv;
    if (res.precondition_holds) {
        vinv = I;
        Eigen::MatrixXcd term = I;
        const int max_terms = 500;
        int t = 0;
        while (t < max_terms) {
            term = -(term * W.a).eval();
            vinv += term;
            ++t;
            if (term.cwiseAbs().maxCoeff() < 1e-14) break;
        }
        res.terms = t;
        res.used_series = true;
    } else if (policy == NeumannPolicy::Theory) {
        std::ostringstream os;
        os << "Neumann smallness failed: 4 C0^2 |W|_a0 = " << res.smallness << " > 1/2";
        throw Error(ErrorKind::NeumannSmallness, os.str());
    } else {
        std::ostringstream os;
        os << "Neumann smallness fails (4 C0^2 |W|_a0 = " << res.smallness << "); direct inverse, rcond "
           << res.rcond;
        res.warning = os.str();
        vinv = lu.inverse();
    }

    res.Vinv = LatticeOperator(box, std::move(vinv), W.policy);
    res.inverse_residual = sobolev_norm(LatticeOperator(box, V * res.Vinv.a - I, W.policy), 0.0);

    if (!s_grid.empty()) {
        const OffsetNorms wn = offset_norms(W);
        const OffsetNorms vn = offset_norms(LatticeOperator(box, res.Vinv.a - I, W.policy));
        for (double s : s_grid) res.bound_margin.push_back(2.0 * tc.K1(s) * wn.evaluate(s) - vn.evaluate(s));
    }
    res.vinv_alpha0 = sobolev_norm(res.Vinv, tc.alpha0);
    return res;
}

}  // namespace nmloc
