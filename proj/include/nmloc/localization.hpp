#pragma once

#include <vector>

#include "nmloc/iteration.hpp"

namespace nmloc {

struct EigenReport {
    int center = 0;
    Site center_site;
    cplx eigenvalue;
    // min_i 2<i-k>^{-p} - |(e_k)_i|
    double decay_envelope_margin = 0.0;
    // smallest C with |(e_k)_i| <= C <i-k>^{-p} for all i
    double envelope_constant = 0.0;
    double eigen_residual = 0.0;
    // |Q+|_op |R_final delta_k|_2 / |e_k|_2
    double residual_bound = 0.0;
    bool interior = false;
};

// p = s - tau - d/2 - 12 delta
double decay_exponent(const SchemeParams& params, int d);

struct EigenSummary {
    std::vector<EigenReport> reports;
    double qplus_op = 0.0;
    double rfinal_op = 0.0;
    // Floating-point error of forming the residual: 8 eps |Q+|_op (1 + |H' - diag d|_op).
    double rounding_allowance = 0.0;
    double max_interior_residual = 0.0;
    double min_interior_envelope_margin = 0.0;
    double max_interior_envelope_constant = 0.0;
    double exponent = 0.0;
};

EigenSummary eigenfunctions(const SchemeResult& result, const SchemeParams& params);

struct CompletenessReport {
    double min_singular_value = 0.0;
    double qtq_offdiag = 0.0;
    // Only for real symmetric runs.
    bool has_gram = false;
    double utu_offdiag = 0.0;
    double utu_defect = 0.0;
};

CompletenessReport completeness_check(const SchemeResult& result);

struct SpectrumReport {
    double hausdorff_interior = 0.0;
    int eigenvalue_count = 0;
};

// One-sided Hausdorff distance from {lambda_k : k interior} to the spectrum of
// the truncated H'. Requires a real symmetric H'.
SpectrumReport spectrum_compare(const SchemeResult& result);

}  // namespace nmloc
