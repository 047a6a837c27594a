#include "nmloc/iteration.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nmloc/error.hpp"
#include "nmloc/theory.hpp"

namespace nmloc {

double SchemeParams::theta(int l) const { return theta0 * std::pow(Theta, l); }

std::vector<double> SchemeParams::grid() const {
    if (!s_grid.empty()) return s_grid;
    return {alpha0, alpha, alpha1};
}

void SchemeParams::derive_alphas(int d) {
    alpha = s_hopping - 0.5 * d - 5.0 * delta;
    alpha1 = 2.0 * alpha + delta;
}

const LedgerEntry* LedgerRow::find(const std::string& label, double s) const {
    for (const auto& e : entries)
        if (e.label == label && e.s == s) return &e;
    return nullptr;
}

const LedgerEntry* LedgerRow::find(const std::string& label) const {
    for (const auto& e : entries)
        if (e.label == label) return &e;
    return nullptr;
}

LatticeOperator hopping_slice(const LatticeOperator& T, int k, const SchemeParams& params) {
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "slice index must be nonnegative");
    if (k == 0) return smooth(T, params.theta(0));
    return LatticeOperator(T.box, smooth(T.box, T.a, params.theta(k)) - smooth(T.box, T.a, params.theta(k - 1)),
                           T.policy);
}

IterationState initial_state(const SchemeContext& ctx) {
    const LatticeBox& box = ctx.T.box;
    IterationState st;
    st.k = 0;
    st.Q = LatticeOperator::identity(box, ctx.T.policy);
    st.Qinv = st.Q;
    st.R = LatticeOperator::zero(box, ctx.T.policy);
    st.H = LatticeOperator::diagonal(box, ctx.D.values(), ctx.T.policy);
    st.dsum = Eigen::VectorXcd::Zero(box.size());
    return st;
}

namespace {

double norm0(const LatticeBox& box, const Eigen::MatrixXcd& m, const NormPolicy& policy) {
    return sobolev_norm(LatticeOperator(box, m, policy), 0.0);
}

double sup_abs(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string fmt_s(double s) {
    std::ostringstream os;
    os << s;
    return os.str();
}

void check_theory_row(const LedgerRow& row) {
    for (const auto& e : row.entries)
        if (e.tag != "stop_tol" && e.margin() < 0.0) {
            std::ostringstream os;
            os << "bound violated at step " << row.k << ": |" << e.label << "|_" << fmt_s(e.s) << " = " << e.norm
               << " exceeds " << e.tag << " = " << e.bound;
            throw Error(ErrorKind::BoundViolation, os.str());
        }
}

}  // namespace

LedgerRow iterate_step(IterationState& st, const SchemeContext& ctx) {
    const SchemeParams& p = ctx.params;
    const TameConstants& tc = ctx.tc;
    const LatticeBox& box = ctx.T.box;
    const NormPolicy& pol = ctx.T.policy;
    const int n = box.size();
    const int k = st.k;
    const int l = k + 1;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::VectorXcd& d = ctx.D.values();
    const bool inverse = p.mode == Mode::Inverse;

    LedgerRow row;
    row.k = l;
    row.theta_k = p.theta(l);

    const LatticeOperator Tk = hopping_slice(ctx.T, k, p);
    const Eigen::VectorXcd ddiv = inverse ? d : Eigen::VectorXcd(d + st.dsum);
    const Eigen::MatrixXcd QT = st.Qinv.a * (Tk.a * st.Q.a);

    Eigen::VectorXcd Dk = Eigen::VectorXcd::Zero(n);
    if (inverse && k > 0) {
        FixedPointOptions fo = p.fixed_point;
        fo.allow_direct_fallback = fo.allow_direct_fallback && !p.theory_checks;
        const FixedPointSolution fp = solve_diagonal_correction(st.Q, st.Qinv, Tk, st.R, tc, fo);
        Dk = fp.X;
        if (!fp.warning.empty()) row.warnings.push_back(fp.warning);
    }
    Eigen::MatrixXcd P = QT;
    if (inverse) {
        P += st.Qinv.a * (Dk.asDiagonal() * st.Q.a);
    } else {
        Dk = (QT + st.R.a).diagonal();
    }
    const Eigen::MatrixXcd QDQ = st.Qinv.a * (Dk.asDiagonal() * st.Q.a);

    Eigen::MatrixXcd G = P + st.R.a;
    const double diag_defect = sup_abs(G.diagonal());
    if (!inverse) G.diagonal().setZero();
    const LatticeOperator Gop(box, G, pol);
    const double g_scale = max_entry(Gop);

    const double theta_smooth = k == 0 ? std::numeric_limits<double>::infinity() : p.theta(k + 1);
    const std::vector<double> grid = p.grid();
    const HomologicalSolution hs = solve_generator(ddiv, Gop, theta_smooth, p.tau, p.gamma, grid, p.generator);
    const Eigen::MatrixXcd& W = hs.W.a;

    const NeumannResult nr =
        neumann_invert(hs.W, tc, grid, p.theory_checks ? NeumannPolicy::Theory : NeumannPolicy::Empirical);
    if (!nr.warning.empty()) row.warnings.push_back(nr.warning);
    const Eigen::MatrixXcd& Vinv = nr.Vinv.a;

    const Eigen::MatrixXcd Qn = st.Q.a + st.Q.a * W;
    const Eigen::MatrixXcd Qinvn = Vinv * st.Qinv.a;

    Eigen::MatrixXcd Hn = st.H.a + Tk.a;
    st.dsum += Dk;
    Eigen::VectorXcd target = d;
    if (inverse) {
        Hn.diagonal() += Dk;
    } else {
        target = d + st.dsum;
    }
    // R = Q^{-1}([D,Q] + (H-D)Q - Q(target-D)), the cancellation-free form of
    // Q^{-1}HQ - target.
    Eigen::MatrixXcd HmD = Hn;
    HmD.diagonal() -= d;
    Eigen::MatrixXcd F = commutator_with_diagonal(d, Qn) + HmD * Qn;
    if (!inverse) F -= Qn * (target - d).asDiagonal();
    const Eigen::MatrixXcd Rn = Qinvn * F;

    const double h0 = norm0(box, Hn, pol);
    const Eigen::MatrixXcd naive = Qinvn * Hn * Qn;
    Eigen::MatrixXcd conj = naive - Rn;
    conj.diagonal() -= target;
    const double conj_res = norm0(box, conj, pol);

    // R_{l} = (I - S)G + R(1) + R(2)
    const Eigen::MatrixXcd Em = Vinv - I;
    const Eigen::MatrixXcd Cw = commutator_with_diagonal(ddiv, W);
    const Eigen::MatrixXcd& Rk = st.R.a;
    const Eigen::MatrixXcd EmR = Em * Rk;
    const Eigen::MatrixXcd EmP = Em * P;
    const Eigen::MatrixXcd r_prime = G - smooth(box, G, theta_smooth);
    const Eigen::MatrixXcd r1 = Em * Cw + EmR * W + EmR + Rk * W;
    const Eigen::MatrixXcd r2 = EmP * W + EmP + P * W;
    const double decomp = norm0(box, Rn - r_prime - r1 - r2, pol);

    const double health = norm0(box, Qn * Qinvn - I, pol);

    const LatticeOperator Rop(box, Rn, pol);
    const OffsetNorms wn = offset_norms(hs.W);
    const OffsetNorms vn = offset_norms(LatticeOperator(box, Em, pol));
    const OffsetNorms rn = offset_norms(Rop);
    const OffsetNorms qn = offset_norms(LatticeOperator(box, Qn - I, pol));
    const OffsetNorms qtn = offset_norms(LatticeOperator(box, QT, pol));
    const OffsetNorms qdn = offset_norms(LatticeOperator(box, QDQ, pol));
    const OffsetNorms sgn = offset_norms(LatticeOperator(box, smooth(box, G, theta_smooth), pol));

    const double a = p.alpha, a0 = p.alpha0, tau = p.tau, dl = p.delta;
    const double th_prev = p.theta(k);
    const double th_l = p.theta(l);
    auto add = [&](std::string label, double s, double norm, double bound, std::string tag) {
        row.entries.push_back({std::move(label), s, norm, bound, std::move(tag)});
    };

    for (double s : grid) {
        if (l == 1)
            add("W", s, wn.evaluate(s), std::pow(p.theta0, s - a + tau + dl), "theta_0^(s-alpha+tau+delta)");
        else
            add("W", s, wn.evaluate(s), std::pow(th_prev, s - a + tau + 4 * dl), "theta_(l-1)^(s-alpha+tau+4delta)");
    }
    for (double s : grid) {
        if (l == 1)
            add("Vinv-I", s, vn.evaluate(s), std::pow(p.theta0, s - a + tau + 2 * dl),
                "theta_0^(s-alpha+tau+2delta)");
        else
            add("Vinv-I", s, vn.evaluate(s), 2.0 * tc.K1(s) * std::pow(th_prev, s - a + tau + 4 * dl),
                "2K1(s)theta_(l-1)^(s-alpha+tau+4delta)");
    }
    for (double s : grid) add("R", s, rn.evaluate(s), std::pow(th_l, s - a), "theta_l^(s-alpha)");
    add("R", 0.0, rn.evaluate(0.0), p.stop_tol, "stop_tol");
    add("D", 0.0, sup_abs(Dk), 3.0 * std::pow(th_prev, a0 - a), "3theta_(l-1)^(alpha0-alpha)");
    for (double s : grid) {
        double b = 0.0;
        for (int m = 1; m <= l; ++m) b += std::pow(p.theta(m - 1), s - a + tau + 6 * dl);
        add("Q-I", s, qn.evaluate(s), b, "sum_(m<=l)theta_(m-1)^(s-alpha+tau+6delta)");
    }
    for (double s : grid) add("QinvTQ", s, qtn.evaluate(s), std::pow(th_prev, s - a), "theta_(l-1)^(s-alpha)");
    for (double s : grid) {
        if (s < a - tau - 4 * dl)
            add("QinvDQ", s, qdn.evaluate(s), std::pow(th_prev, a0 - a + 3 * dl), "theta_(l-1)^(alpha0-alpha+3delta)");
        else
            add("QinvDQ", s, qdn.evaluate(s), std::pow(th_prev, s - a), "theta_(l-1)^(s-alpha)");
    }
    for (double s : grid)
        add("W_generator", s, wn.evaluate(s), sgn.evaluate(s + tau) / p.gamma, "gamma^-1|S_theta G|_(s+tau)");
    for (double s : grid)
        add("Vinv-I_neumann", s, vn.evaluate(s), 2.0 * tc.K1(s) * wn.evaluate(s), "2K1(s)|W|_s");
    add("conj_residual", 0.0, conj_res, 1e-9 * (1.0 + h0), "1e-9(1+|H_l|_0)");
    add("decomp_residual", 0.0, decomp, 1e-9, "1e-9");
    add("diag_defect", 0.0, diag_defect, 1e-9 * (1.0 + g_scale), "1e-9(1+max|G|)");
    add("generator_residual", 0.0, hs.residual_offdiag, 1e-10 * (1.0 + g_scale), "1e-10(1+max|G|)");
    add("qqinv_health", 0.0, health, 1e-8, "1e-8");
    if (k == 0) {
        const Eigen::MatrixXcd closed = Vinv * Tk.a * W;
        add("R1_closed_form", 0.0, norm0(box, Rn - closed, pol), 1e-9 * (1.0 + norm0(box, Tk.a, pol)),
            "1e-9(1+|T_0|_0)");
    }

    if (p.theory_checks) check_theory_row(row);

    st.Q = LatticeOperator(box, Qn, pol);
    st.Qinv = LatticeOperator(box, Qinvn, pol);
    st.R = Rop;
    st.H = LatticeOperator(box, std::move(Hn), pol);
    st.k = l;
    return row;
}

InitialStepResult initial_step(const LatticeOperator& T0, const DiagonalOperator& D, const SchemeParams& params) {
    require_same_box(T0.box, D.box);
    SchemeContext ctx{T0, D, params, make_tame_constants(T0.box.dimension(), params.alpha0)};
    IterationState st = initial_state(ctx);
    LedgerRow row = iterate_step(st, ctx);
    return {st.Q, st.Qinv, st.R, std::move(row)};
}

bool is_real_symmetric(const LatticeOperator& x, double tol) {
    if (x.a.size() == 0) return true;
    if (x.a.imag().cwiseAbs().maxCoeff() > tol) return false;
    return (x.a - x.a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

SchemeResult run(const LatticeOperator& T, const DiagonalOperator& D, const SchemeParams& params,
                 const StepObserver& observer) {
    require_same_box(T.box, D.box);
    if (!(params.gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    if (!(params.theta0 > 0.0) || !(params.Theta > 1.0))
        throw Error(ErrorKind::InvalidArgument, "need theta0 > 0 and Theta > 1");
    const LatticeBox& box = T.box;
    const int n = box.size();
    const NormPolicy& pol = T.policy;

    SchemeContext ctx{T, D, params, make_tame_constants(box.dimension(), params.alpha0)};

    if (params.theory_checks) {
        const TheoryReport rep = check_theory_conditions(params, theory_inputs(T, params), ctx.tc);
        for (const auto& c : rep.conditions)
            if (!c.holds && !c.non_effective)
                throw Error(ErrorKind::BoundViolation, "theory condition fails: " + c.name + " (" + c.expression + ")");
        const DistalReport dr = distal_margin(D.diag, params.tau, params.gamma, 2 * box.radius());
        if (!dr.pass()) throw Error(ErrorKind::DistalViolation, "distal margin negative for the configured gamma");
    }

    SchemeResult res;
    res.mode = params.mode;
    IterationState st = initial_state(ctx);
    const double span = 2.0 * box.radius();
    while (st.k < params.max_steps) {
        LedgerRow row = iterate_step(st, ctx);
        for (const auto& w : row.warnings) res.warnings.push_back("step " + std::to_string(row.k) + ": " + w);
        if (observer) observer(st, row);
        const double r0 = row.find("R", 0.0)->norm;
        res.ledger.push_back(std::move(row));
        if (params.theta(st.k - 1) >= span && r0 <= params.stop_tol) {
            res.converged = true;
            break;
        }
    }
    res.steps = st.k;
    res.Qplus = st.Q;
    res.Qplus_inv = st.Qinv;
    res.Dplus = st.dsum;
    res.final_residual = st.R;
    res.d = D.values();

    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd hp = T.a;
    hp.diagonal() += res.d;
    if (params.mode == Mode::Inverse) {
        hp.diagonal() += res.Dplus;
        res.lambda = res.d;
    } else {
        res.lambda = res.d + res.Dplus;
    }
    res.Hprime = LatticeOperator(box, hp, pol);

    Eigen::MatrixXcd m = res.Qplus_inv.a * hp * res.Qplus.a;
    m.diagonal() -= res.lambda;
    res.master_residual = norm0(box, m, pol);
    res.master_identity_defect = norm0(box, m - res.final_residual.a, pol);

    Eigen::MatrixXcd tel = st.H.a - T.a;
    tel.diagonal() -= res.d;
    if (params.mode == Mode::Inverse) tel.diagonal() -= res.Dplus;
    res.telescoping_defect = norm0(box, tel, pol);
    res.qqinv_health = norm0(box, res.Qplus.a * res.Qplus_inv.a - I, pol);

    res.qplus_diag_s = std::max(0.0, params.alpha - params.tau - 7.0 * params.delta);
    res.qplus_minus_identity = sobolev_norm(LatticeOperator(box, res.Qplus.a - I, pol), res.qplus_diag_s);
    const double tn = sobolev_norm(T, params.alpha + 4.0 * params.delta);
    if (tn > 0.0)
        res.qplus_scaling_ratio =
            res.qplus_minus_identity / std::pow(tn, params.delta / (params.alpha - params.alpha0));

    res.real_symmetric = is_real_symmetric(T) && D.values().imag().cwiseAbs().maxCoeff() == 0.0;
    if (res.real_symmetric && res.converged) {
        try {
            res.U = unitarize(res).U;
        } catch (const Error& e) {
            res.warnings.push_back(std::string("unitarization skipped: ") + e.what());
        }
    }
    return res;
}

UnitarizeReport unitarize(const SchemeResult& result, double symmetry_tol, double unitary_tol) {
    const LatticeBox& box = result.Qplus.box;
    const NormPolicy& pol = result.Qplus.policy;
    const int n = box.size();
    const Eigen::MatrixXcd& Q = result.Qplus.a;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);

    UnitarizeReport rep;
    const Eigen::MatrixXcd qtq = Q.transpose() * Q;
    Eigen::MatrixXcd off = qtq;
    off.diagonal().setZero();
    rep.qtq_offdiag = norm0(box, off, pol);
    if (rep.qtq_offdiag > symmetry_tol) {
        std::ostringstream os;
        os << "symmetry defect: |Q+^t Q+ - diag|_0 = " << rep.qtq_offdiag;
        throw Error(ErrorKind::SymmetryDefect, os.str());
    }
    Eigen::VectorXcd c(n);
    for (int i = 0; i < n; ++i) c[i] = 1.0 / std::sqrt(qtq(i, i));
    rep.U = LatticeOperator(box, Q * c.asDiagonal(), pol);
    rep.utu_defect = norm0(box, rep.U.a.transpose() * rep.U.a - I, pol);
    if (rep.utu_defect > unitary_tol) {
        std::ostringstream os;
        os << "unitarity defect: |U^t U - I|_0 = " << rep.utu_defect;
        throw Error(ErrorKind::BoundViolation, os.str());
    }
    if (result.Hprime.size() == n) {
        Eigen::MatrixXcd rp = rep.U.a.transpose() * result.Hprime.a * rep.U.a;
        rp.diagonal() -= result.lambda;
        rep.replay_defect = norm0(box, rp, pol);
    }
    return rep;
}

}  // namespace nmloc
