#include "nmloc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nmloc/error.hpp"

namespace nmloc {

double decay_exponent(const SchemeParams& p, int d) {
    return p.s_hopping - p.tau - 0.5 * d - 12.0 * p.delta;
}

namespace {

double op_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

EigenSummary eigenfunctions(const SchemeResult& res, const SchemeParams& params) {
    const LatticeBox& box = res.Qplus.box;
    const int n = box.size();
    const int d = box.dimension();
    const Eigen::MatrixXcd& Q = res.Qplus.a;

    EigenSummary out;
    out.exponent = decay_exponent(params, d);
    out.qplus_op = op_norm(Q);
    out.rfinal_op = op_norm(res.final_residual.a);
    out.max_interior_residual = 0.0;
    out.min_interior_envelope_margin = std::numeric_limits<double>::infinity();

    // H'e_k - lambda_k e_k = [D,Q]e_k + (H'-D)Q e_k - (lambda_k - d_k) e_k,
    // formed without cancelling the large diagonal against itself.
    Eigen::MatrixXcd HmD = res.Hprime.a;
    HmD.diagonal() -= res.d;
    out.rounding_allowance = 8.0 * std::numeric_limits<double>::epsilon() * out.qplus_op * (1.0 + op_norm(HmD));
    Eigen::MatrixXcd F = commutator_with_diagonal(res.d, Q) + HmD * Q;
    F -= Q * (res.lambda - res.d).asDiagonal();

    Site diff(d);
    for (int k = 0; k < n; ++k) {
        EigenReport r;
        r.center = k;
        auto sk = box.site(k);
        r.center_site.assign(sk.begin(), sk.end());
        r.eigenvalue = res.lambda[k];
        r.interior = box.is_interior(k);
        const double ek = Q.col(k).norm();
        r.eigen_residual = F.col(k).norm() / ek;
        r.residual_bound = out.qplus_op * res.final_residual.a.col(k).norm() / ek;

        double margin = std::numeric_limits<double>::infinity();
        double cfit = 0.0;
        for (int i = 0; i < n; ++i) {
            auto si = box.site(i);
            for (int u = 0; u < d; ++u) diff[u] = si[u] - sk[u];
            const double w = std::pow(bracket(diff), -out.exponent);
            const double v = std::abs(Q(i, k));
            margin = std::min(margin, 2.0 * w - v);
            cfit = std::max(cfit, v / w);
        }
        r.decay_envelope_margin = margin;
        r.envelope_constant = cfit;
        if (r.interior) {
            out.max_interior_residual = std::max(out.max_interior_residual, r.eigen_residual);
            out.min_interior_envelope_margin = std::min(out.min_interior_envelope_margin, margin);
            out.max_interior_envelope_constant = std::max(out.max_interior_envelope_constant, cfit);
        }
        out.reports.push_back(std::move(r));
    }
    return out;
}

CompletenessReport completeness_check(const SchemeResult& res) {
    const LatticeBox& box = res.Qplus.box;
    const int n = box.size();
    const Eigen::MatrixXcd& Q = res.Qplus.a;
    CompletenessReport rep;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Q);
    rep.min_singular_value = svd.singularValues()(n - 1);

    Eigen::MatrixXcd qtq = Q.transpose() * Q;
    qtq.diagonal().setZero();
    rep.qtq_offdiag = sobolev_norm(LatticeOperator(box, qtq, res.Qplus.policy), 0.0);

    if (res.real_symmetric) {
        try {
            const UnitarizeReport u = unitarize(res, std::numeric_limits<double>::infinity(),
                                                std::numeric_limits<double>::infinity());
            Eigen::MatrixXcd utu = u.U.a.transpose() * u.U.a;
            rep.utu_defect = u.utu_defect;
            utu.diagonal().setZero();
            rep.utu_offdiag = utu.cwiseAbs().maxCoeff();
            rep.has_gram = true;
        } catch (const Error&) {
            rep.has_gram = false;
        }
    }
    return rep;
}

SpectrumReport spectrum_compare(const SchemeResult& res) {
    const LatticeBox& box = res.Hprime.box;
    const int n = box.size();
    const Eigen::MatrixXcd& H = res.Hprime.a;
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    if (!is_real_symmetric(res.Hprime, 1e-14 * scale) || res.lambda.imag().cwiseAbs().maxCoeff() > 1e-14 * scale)
        throw Error(ErrorKind::SpectrumSymmetry, "spectrum comparison requires symmetry");

    Eigen::MatrixXd hr = H.real();
    hr = 0.5 * (hr + hr.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hr, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();

    SpectrumReport rep;
    rep.eigenvalue_count = static_cast<int>(ev.size());
    double dist = 0.0;
    for (int k = 0; k < n; ++k) {
        if (!box.is_interior(k)) continue;
        const double lam = res.lambda[k].real();
        const double* it = std::lower_bound(ev.data(), ev.data() + ev.size(), lam);
        double best = std::numeric_limits<double>::infinity();
        if (it != ev.data() + ev.size()) best = std::min(best, *it - lam);
        if (it != ev.data()) best = std::min(best, lam - *(it - 1));
        dist = std::max(dist, best);
    }
    rep.hausdorff_interior = dist;
    return rep;
}

}  // namespace nmloc
