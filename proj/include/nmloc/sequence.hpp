#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nmloc/lattice.hpp"

namespace nmloc {

using cplx = std::complex<double>;

enum class NormKind { Sup, SampledBV };

// SampledBV orders sites by the phase frac(i.omega) and adds the cyclic total
// variation of the values along that order to the sup norm.
struct NormPolicy {
    NormKind kind = NormKind::Sup;
    std::vector<double> omega;
};

double phase_of(std::span<const int> site, const std::vector<double>& omega);

// Exact evaluator i -> a_i, used by formula-backed sequences so that
// translations never read outside the stored window.
using SiteFormula = std::function<cplx(std::span<const int>)>;

struct Sequence {
    LatticeBox box;
    Eigen::VectorXcd values;
    std::vector<char> valid;
    NormPolicy policy;
    SiteFormula formula;

    static Sequence constant(const LatticeBox& box, cplx c, NormPolicy policy = {});
    static Sequence from_values(const LatticeBox& box, Eigen::VectorXcd values, NormPolicy policy = {});
    static Sequence from_formula(const LatticeBox& box, SiteFormula f, NormPolicy policy = {});

    int valid_count() const;
};

// Norm of the entries listed in `sites` (box indices) with values `vals`.
double policy_norm(const LatticeBox& box, const NormPolicy& policy,
                   std::span<const int> sites, std::span<const cplx> vals);

double algebra_norm(const Sequence& a);
double sup_entry(const Sequence& a);

Sequence translate(const Sequence& a, std::span<const int> j);
Sequence pointwise_product(const Sequence& a, const Sequence& b);

struct DistalReport {
    double tau = 0.0;
    double gamma = 0.0;
    Site worst_offset;
    double empirical_margin = 0.0;
    // Largest gamma for which every tested offset passes.
    double best_gamma = 0.0;
    int offsets_tested = 0;
    bool pass() const { return empirical_margin >= 0.0; }
};

// Measures ||(p - sigma_k p)^{-1}|| over the interior window for every
// 0 < |k|_inf <= max_offset.
DistalReport distal_margin(const Sequence& p, double tau, double gamma, int max_offset);

}  // namespace nmloc
