#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmloc/homological.hpp"
#include "nmloc/operator.hpp"
#include "nmloc/tame.hpp"

namespace nmloc {

enum class Mode { Inverse, Direct };

struct SchemeParams {
    double tau = 1.0;
    double gamma = 0.0;
    double delta = 0.05;
    double alpha0 = 0.6;
    double alpha = 3.25;
    double alpha1 = 6.55;
    double theta0 = 2.0;
    double Theta = 2.0;
    double s_hopping = 4.0;
    double epsilon = 0.1;
    Mode mode = Mode::Inverse;
    bool theory_checks = false;
    double stop_tol = 1e-10;
    int max_steps = 40;
    // Empty means {alpha0, alpha, alpha1}.
    std::vector<double> s_grid;
    FixedPointOptions fixed_point;
    GeneratorOptions generator;

    double theta(int l) const;
    std::vector<double> grid() const;

    // alpha = s - d/2 - 5 delta and alpha1 = 2 alpha + delta.
    void derive_alphas(int d);
};

struct LedgerEntry {
    std::string label;
    double s = 0.0;
    double norm = 0.0;
    double bound = 0.0;
    std::string tag;
    double margin() const { return bound - norm; }
};

// Row l records theta_l, W_l, V_l, R_l, Q_l and the correction D_{l-1}.
struct LedgerRow {
    int k = 0;
    double theta_k = 0.0;
    std::vector<LedgerEntry> entries;
    std::vector<std::string> warnings;

    const LedgerEntry* find(const std::string& label, double s) const;
    const LedgerEntry* find(const std::string& label) const;
};

struct IterationState {
    int k = 0;
    LatticeOperator Q, Qinv, R, H;
    // Sum of the diagonal corrections applied so far.
    Eigen::VectorXcd dsum;
};

struct SchemeContext {
    LatticeOperator T;
    DiagonalOperator D;
    SchemeParams params;
    TameConstants tc;
};

// T_0 = S_{theta_0} T, T_k = (S_{theta_k} - S_{theta_{k-1}}) T
LatticeOperator hopping_slice(const LatticeOperator& T, int k, const SchemeParams& params);

IterationState initial_state(const SchemeContext& ctx);

// Absorbs slice T_k into the state and returns the ledger row k+1.
LedgerRow iterate_step(IterationState& state, const SchemeContext& ctx);

struct InitialStepResult {
    LatticeOperator V1, V1inv, R1;
    LedgerRow row;
};

InitialStepResult initial_step(const LatticeOperator& T0, const DiagonalOperator& D, const SchemeParams& params);

struct SchemeResult {
    LatticeOperator Qplus, Qplus_inv;
    Eigen::VectorXcd Dplus;
    LatticeOperator final_residual;
    std::vector<LedgerRow> ledger;
    bool converged = false;
    int steps = 0;
    Mode mode = Mode::Inverse;

    // H' = T + D + D+ (inverse) or T + D (direct) and its target diagonal.
    LatticeOperator Hprime;
    Eigen::VectorXcd lambda;
    Eigen::VectorXcd d;

    // |Q+^{-1} H' Q+ - diag(lambda)|_0 and the same minus R_final.
    double master_residual = 0.0;
    double master_identity_defect = 0.0;
    double telescoping_defect = 0.0;
    double qqinv_health = 0.0;
    double qplus_diag_s = 0.0;
    double qplus_minus_identity = 0.0;
    double qplus_scaling_ratio = 0.0;
    bool real_symmetric = false;
    std::optional<LatticeOperator> U;
    std::vector<std::string> warnings;
};

using StepObserver = std::function<void(const IterationState&, const LedgerRow&)>;

SchemeResult run(const LatticeOperator& T, const DiagonalOperator& D, const SchemeParams& params,
                 const StepObserver& observer = {});

struct UnitarizeReport {
    LatticeOperator U;
    double qtq_offdiag = 0.0;
    double utu_defect = 0.0;
    double replay_defect = 0.0;
};

// U = Q+ diag((Q+^t Q+)_ii^{-1/2})
UnitarizeReport unitarize(const SchemeResult& result, double symmetry_tol = 1e-8, double unitary_tol = 1e-9);

bool is_real_symmetric(const LatticeOperator& x, double tol = 0.0);

}  // namespace nmloc
