#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "nmloc/error.hpp"
#include "nmloc/localization.hpp"
#include "support.hpp"

using namespace nmloc;
using fixtures::empirical_params;
using fixtures::make_model;

namespace {

SchemeResult run_model(PotentialKind kind, int N, double eps, SchemeParams* out = nullptr) {
    const auto m = make_model(kind, 1, N, 4.0, eps);
    const double gamma = distal_margin(m.D.diag, 1.0, 1.0, 2 * N).best_gamma;
    const SchemeParams p = empirical_params(1, 4.0, eps, gamma);
    if (out) *out = p;
    return run(m.T, m.D, p);
}

}  // namespace

TEST(Eigenfunctions, ZeroHoppingIsExact) {
    SchemeParams p;
    const SchemeResult r = run_model(PotentialKind::Maryland, 16, 0.0, &p);
    const EigenSummary e = eigenfunctions(r, p);
    for (const auto& rep : e.reports) {
        EXPECT_EQ(rep.eigen_residual, 0.0);
        EXPECT_GT(rep.decay_envelope_margin, 0.0);
        EXPECT_EQ(rep.envelope_constant, 1.0);
        EXPECT_EQ(rep.eigenvalue, r.d[rep.center]);
    }
    const CompletenessReport c = completeness_check(r);
    EXPECT_EQ(c.min_singular_value, 1.0);
    // The reference spectrum comes from a dense eigensolver.
    EXPECT_LE(spectrum_compare(r).hausdorff_interior, 1e-14);
}

TEST(Eigenfunctions, ExponentFromParameters) {
    SchemeParams p;
    p.s_hopping = 5.0;
    p.tau = 1.5;
    p.delta = 0.02;
    EXPECT_DOUBLE_EQ(decay_exponent(p, 2), 5.0 - 1.5 - 1.0 - 0.24);
}

TEST(Eigenfunctions, ResidualIdentityPerColumn) {
    SchemeParams p;
    const SchemeResult r = run_model(PotentialKind::Maryland, 32, 0.1, &p);
    ASSERT_TRUE(r.converged);
    const EigenSummary e = eigenfunctions(r, p);
    for (const auto& rep : e.reports) {
        if (!rep.interior) continue;
        EXPECT_LE(rep.eigen_residual, rep.residual_bound + e.rounding_allowance);
        EXPECT_GE(rep.decay_envelope_margin, 0.0);
    }
}

TEST(Completeness, PerturbationLowerBound) {
    SchemeParams p;
    const SchemeResult r = run_model(PotentialKind::Maryland, 32, 0.1, &p);
    const CompletenessReport c = completeness_check(r);
    const int n = r.Qplus.size();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(r.Qplus.a - Eigen::MatrixXcd::Identity(n, n));
    const double gap = svd.singularValues()(0);
    ASSERT_LT(gap, 1.0);
    EXPECT_GE(c.min_singular_value, 1.0 - gap - 1e-14);
    EXPECT_TRUE(c.has_gram);
    EXPECT_LE(c.utu_defect, 1e-9);
}

TEST(Spectrum, RejectsNonSymmetric) {
    SchemeParams p;
    const SchemeResult r = run_model(PotentialKind::Sarnak, 16, 0.05, &p);
    try {
        spectrum_compare(r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SpectrumSymmetry);
    }
    EXPECT_FALSE(r.U.has_value());
}

TEST(Spectrum, DistanceShrinksWithCoupling) {
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.3, 0.1, 0.03}) {
        SchemeParams p;
        const SchemeResult r = run_model(PotentialKind::Maryland, 32, eps, &p);
        ASSERT_TRUE(r.converged) << eps;
        const SpectrumReport s = spectrum_compare(r);
        const EigenSummary e = eigenfunctions(r, p);
        EXPECT_LE(s.hausdorff_interior, e.max_interior_residual + 1e-10);
        EXPECT_LT(s.hausdorff_interior, prev) << eps;
        prev = s.hausdorff_interior;
    }
    EXPECT_LT(prev, 1e-10);
}
