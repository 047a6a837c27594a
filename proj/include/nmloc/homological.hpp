#pragma once

#include <string>
#include <vector>

#include "nmloc/operator.hpp"
#include "nmloc/tame.hpp"

namespace nmloc {

struct GeneratorOptions {
    double divisor_floor = 1e-14;
    // diag(G) must stay below diag_tol * (1 + max|G_ij|).
    double diag_tol = 1e-9;
};

struct HomologicalSolution {
    LatticeOperator W;
    double residual_offdiag = 0.0;
    double smoothing_theta = 0.0;
    // gamma^{-1} |S_theta G|_{s+tau} - |W|_s for each requested s.
    std::vector<double> s_grid;
    std::vector<double> bound_margin;
};

// W_ij = (S_theta G)_ij / (d_j - d_i) for i != j, zero diagonal.
HomologicalSolution solve_generator(const Eigen::VectorXcd& d, const LatticeOperator& G, double theta,
                                    double tau, double gamma, const std::vector<double>& s_grid = {},
                                    const GeneratorOptions& opt = {});
HomologicalSolution solve_generator(const DiagonalOperator& D, const LatticeOperator& G, double theta,
                                    double tau, double gamma, const std::vector<double>& s_grid = {},
                                    const GeneratorOptions& opt = {});

struct FixedPointOptions {
    double tol = 1e-12;
    int max_iter = 200;
    // When false, a failed contraction check is an error instead of a fallback.
    bool allow_direct_fallback = true;
};

struct FixedPointSolution {
    Eigen::VectorXcd X;
    int iterations = 0;
    double final_defect = 0.0;
    bool contraction_holds = false;
    bool used_fixed_point = false;
    // |X_fixed_point - X_direct|_0 when both were computed.
    double direct_gap = 0.0;
    // C0 |Q - I|_{a0} and C0 |Q^{-1} - I|_{a0}
    double contraction_q = 0.0;
    double contraction_qinv = 0.0;
    std::string warning;
};

// Solves diag(Q^{-1}(X + P)Q + P') = 0 for diagonal X. The map is affine in X:
// the i-th entry is sum_j Qinv_ij Q_ji x_j + b_i.
FixedPointSolution solve_diagonal_correction(const LatticeOperator& Q, const LatticeOperator& Qinv,
                                             const LatticeOperator& P, const LatticeOperator& Pprime,
                                             const TameConstants& tc, const FixedPointOptions& opt = {});

// Ground truth for the above: LU solve of the assembled affine system.
Eigen::VectorXcd solve_diagonal_correction_direct(const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& Qinv,
                                                  const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Pprime);

enum class NeumannPolicy { Theory, Empirical };

struct NeumannResult {
    LatticeOperator Vinv;
    bool precondition_holds = false;
    bool used_series = false;
    int terms = 0;
    double smallness = 0.0;  // 4 C0^2 |W|_{a0}
    double inverse_residual = 0.0;  // |(I+W)V^{-1} - I|_0
    double rcond = 1.0;
    std::vector<double> s_grid;
    // 2 K1(s) |W|_s - |V^{-1} - I|_s
    std::vector<double> bound_margin;
    double vinv_alpha0 = 0.0;
    std::string warning;
};

NeumannResult neumann_invert(const LatticeOperator& W, const TameConstants& tc, const std::vector<double>& s_grid,
                             NeumannPolicy policy = NeumannPolicy::Empirical);

}  // namespace nmloc
