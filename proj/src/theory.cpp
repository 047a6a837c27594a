#include "nmloc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nmloc/error.hpp"

namespace nmloc {

bool TheoryReport::all_hold() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const TheoryCondition& c) { return c.holds; });
}

const TheoryCondition* TheoryReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

double safe_log10(double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log10(x);
}

}  // namespace

TheoryInputs theory_inputs(const LatticeOperator& T, const SchemeParams& p) {
    const double grid[2] = {p.alpha + 3.0 * p.delta, p.alpha + 4.0 * p.delta};
    const auto nrm = sobolev_norms(T, grid);
    return {T.box.dimension(), safe_log10(nrm[0]), safe_log10(nrm[1])};
}

TheoryInputs theory_inputs_log_epsilon(const LatticeOperator& T_unit, const SchemeParams& p, double log10_epsilon) {
    TheoryInputs in = theory_inputs(T_unit, p);
    in.log10_T_alpha3 += log10_epsilon;
    in.log10_T_alpha4 += log10_epsilon;
    return in;
}

ThetaRequirement theta_requirement(const SchemeParams& p, const TameConstants& tc) {
    ThetaRequirement req;
    req.candidates = {
        {"8^(2/delta)C0^(4/delta)", (2.0 / p.delta) * std::log10(8.0) + (4.0 / p.delta) * std::log10(tc.C0)},
        {"10^(1/delta)", 1.0 / p.delta},
        {"10^(1/alpha0)", 1.0 / p.alpha0},
    };
    auto best = std::max_element(req.candidates.begin(), req.candidates.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    req.log10_required = best->second;
    req.binding = best->first;
    return req;
}

TheoryReport check_theory_conditions(const SchemeParams& p, const TheoryInputs& in, const TameConstants& tc) {
    TheoryReport rep;
    rep.C0 = tc.C0;
    rep.theta = theta_requirement(p, tc);

    const double a = p.alpha, a0 = p.alpha0, a1 = p.alpha1, tau = p.tau, dl = p.delta;
    const double lT = safe_log10(p.Theta);
    const double lt0 = safe_log10(p.theta0);
    const double kappa1 = a0 - a + tau + 7.0 * dl;

    auto strict = [&](std::string name, std::string expr, double margin) {
        rep.conditions.push_back({std::move(name), std::move(expr), margin > 0.0, margin, false, false});
    };
    auto weak = [&](std::string name, std::string expr, double margin, bool logm, bool non_eff = false) {
        rep.conditions.push_back({std::move(name), std::move(expr), margin >= 0.0, margin, logm, non_eff});
    };

    // Each linear margin subtracts the right-hand side summed left to right,
    // so a parameter built the same way lands on exactly zero.
    strict("alpha0_dimension", "alpha0 > d/2", a0 - 0.5 * in.d);
    weak("theta_scale_product", "Theta^(delta/2) >= 8 C0^2", 0.5 * dl * lT - std::log10(8.0 * tc.C0 * tc.C0), true);
    strict("alpha_Q_estimate", "alpha > alpha0 + tau + 5delta", a - (a0 + tau + 5.0 * dl));
    weak("hopping_unit_bound", "|T|_(alpha+4delta) <= 1", -in.log10_T_alpha4, true);
    weak("theta0_slice_decay", "theta0 >= Theta^((alpha+4delta-alpha0)/delta)",
         lt0 - (a + 4.0 * dl - a0) / dl * lT, true);
    strict("kappa_negative", "-alpha + alpha0 + tau + 6delta < 0", a - (a0 + tau + 6.0 * dl));
    weak("theta0_diagonal_correction", "theta0^delta >= Theta^(alpha+4delta-alpha0)",
         dl * lt0 - (a + 4.0 * dl - a0) * lT, true);
    strict("kappa1_negative", "alpha0 - alpha + tau + 7delta < 0", a - (a0 + tau + 7.0 * dl));
    weak("theta0_small_divisor", "theta0^delta >= 3 gamma^-1 Theta^tau",
         dl * lt0 - (safe_log10(3.0 / p.gamma) + tau * lT), true);
    weak("alpha1_high_norm", "alpha1 >= 2alpha + delta", a1 - (2.0 * a + dl), false);
    weak("theta_smoothing_gain", "max(Theta^-alpha0, Theta^-delta) <= 1/10", std::min(a0, dl) * lT - 1.0, true);
    weak("theta0_newton_error", "theta0^(-kappa1) >= C Theta^(alpha-alpha0-kappa1), C = 1",
         -kappa1 * lt0 - (a - a0 - kappa1) * lT, true, true);
    strict("alpha_initial_step", "-alpha + alpha0 + tau + 3delta < 0", a - (a0 + tau + 3.0 * dl));
    weak("hopping_initial_smallness", "|T|_(alpha+3delta) <= theta0^(alpha0-alpha) <= 1",
         std::min((a0 - a) * lt0 - in.log10_T_alpha3, -(a0 - a) * lt0), true);
    weak("theta0_initial_step", "theta0^delta >= C Theta^(alpha-alpha0+delta), C = 1",
         dl * lt0 - (a - a0 + dl) * lT, true, true);
    weak("theta_choice", "Theta >= max(8^(2/delta)C0^(4/delta), 10^(1/delta), 10^(1/alpha0))",
         lT - rep.theta.log10_required, true);
    strict("alpha_gap", "alpha > alpha0 + tau + 7delta", a - (a0 + tau + 7.0 * dl));
    weak("hopping_smallness", "|T|_(alpha+4delta) <= theta0^(alpha0-alpha) <= 1",
         std::min((a0 - a) * lt0 - in.log10_T_alpha4, -(a0 - a) * lt0), true);
    return rep;
}

}  // namespace nmloc
