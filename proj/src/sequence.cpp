#include "nmloc/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nmloc/error.hpp"

namespace nmloc {

double phase_of(std::span<const int> site, const std::vector<double>& omega) {
    if (omega.size() != site.size())
        throw Error(ErrorKind::InvalidArgument, "SampledBV policy needs one frequency per dimension");
    long double x = 0.0L;
    for (std::size_t u = 0; u < site.size(); ++u) x += static_cast<long double>(site[u]) * omega[u];
    long double f = x - std::floor(x);
    return static_cast<double>(f);
}

Sequence Sequence::constant(const LatticeBox& box, cplx c, NormPolicy policy) {
    Sequence s;
    s.box = box;
    s.values = Eigen::VectorXcd::Constant(box.size(), c);
    s.valid.assign(box.size(), 1);
    s.policy = std::move(policy);
    s.formula = [c](std::span<const int>) { return c; };
    return s;
}

Sequence Sequence::from_values(const LatticeBox& box, Eigen::VectorXcd values, NormPolicy policy) {
    if (values.size() != box.size()) throw Error(ErrorKind::BoxMismatch, "value count does not match box");
    Sequence s;
    s.box = box;
    s.values = std::move(values);
    s.valid.assign(box.size(), 1);
    s.policy = std::move(policy);
    return s;
}

Sequence Sequence::from_formula(const LatticeBox& box, SiteFormula f, NormPolicy policy) {
    Sequence s;
    s.box = box;
    s.values.resize(box.size());
    for (int i = 0; i < box.size(); ++i) s.values[i] = f(box.site(i));
    s.valid.assign(box.size(), 1);
    s.policy = std::move(policy);
    s.formula = std::move(f);
    return s;
}

int Sequence::valid_count() const {
    return static_cast<int>(std::count(valid.begin(), valid.end(), char{1}));
}

double policy_norm(const LatticeBox& box, const NormPolicy& policy,
                   std::span<const int> sites, std::span<const cplx> vals) {
    if (sites.empty()) throw Error(ErrorKind::DegenerateSequence, "degenerate sequence");
    double sup = 0.0;
    for (const cplx& v : vals) sup = std::max(sup, std::abs(v));
    if (policy.kind == NormKind::Sup) return sup;

    std::vector<std::pair<double, int>> order(sites.size());
    for (std::size_t m = 0; m < sites.size(); ++m)
        order[m] = {phase_of(box.site(sites[m]), policy.omega), static_cast<int>(m)};
    std::sort(order.begin(), order.end());
    double tv = 0.0;
    for (std::size_t m = 0; m < order.size(); ++m) {
        const cplx& a = vals[order[m].second];
        const cplx& b = vals[order[(m + 1) % order.size()].second];
        tv += std::abs(b - a);
    }
    return sup + tv;
}

namespace {

void collect(const Sequence& a, std::vector<int>& sites, std::vector<cplx>& vals) {
    sites.clear();
    vals.clear();
    for (int i = 0; i < a.box.size(); ++i) {
        if (!a.valid[i]) continue;
        sites.push_back(i);
        vals.push_back(a.values[i]);
    }
}

}  // namespace

double algebra_norm(const Sequence& a) {
    std::vector<int> sites;
    std::vector<cplx> vals;
    collect(a, sites, vals);
    return policy_norm(a.box, a.policy, sites, vals);
}

double sup_entry(const Sequence& a) {
    double m = 0.0;
    bool any = false;
    for (int i = 0; i < a.box.size(); ++i) {
        if (!a.valid[i]) continue;
        any = true;
        m = std::max(m, std::abs(a.values[i]));
    }
    if (!any) throw Error(ErrorKind::DegenerateSequence, "degenerate sequence");
    return m;
}

Sequence translate(const Sequence& a, std::span<const int> j) {
    const LatticeBox& box = a.box;
    if (static_cast<int>(j.size()) != box.dimension())
        throw Error(ErrorKind::InvalidArgument, "translation dimension mismatch");
    if (sup_norm(j) > 2 * box.radius())
        throw Error(ErrorKind::InvalidArgument, "translation exceeds 2N");

    Sequence out;
    out.box = box;
    out.policy = a.policy;
    out.values = Eigen::VectorXcd::Zero(box.size());
    out.valid.assign(box.size(), 0);
    Site shift(j.begin(), j.end());
    Site pre(box.dimension());
    for (int i = 0; i < box.size(); ++i) {
        auto s = box.site(i);
        for (int u = 0; u < box.dimension(); ++u) pre[u] = s[u] - shift[u];
        if (a.formula) {
            out.values[i] = a.formula(pre);
            out.valid[i] = 1;
        } else if (auto src = box.index_of(pre); src && a.valid[*src]) {
            out.values[i] = a.values[*src];
            out.valid[i] = 1;
        }
    }
    if (a.formula) {
        SiteFormula f = a.formula;
        out.formula = [f, shift](std::span<const int> s) {
            Site q(s.begin(), s.end());
            for (std::size_t u = 0; u < q.size(); ++u) q[u] -= shift[u];
            return f(q);
        };
    }
    return out;
}

Sequence pointwise_product(const Sequence& a, const Sequence& b) {
    require_same_box(a.box, b.box);
    Sequence out;
    out.box = a.box;
    out.policy = a.policy;
    out.values = a.values.cwiseProduct(b.values);
    out.valid.resize(a.box.size());
    for (int i = 0; i < a.box.size(); ++i) out.valid[i] = a.valid[i] && b.valid[i];
    if (a.formula && b.formula) {
        SiteFormula fa = a.formula, fb = b.formula;
        out.formula = [fa, fb](std::span<const int> s) { return fa(s) * fb(s); };
    }
    return out;
}

DistalReport distal_margin(const Sequence& p, double tau, double gamma, int max_offset) {
    const LatticeBox& box = p.box;
    if (tau <= 0.0 || gamma <= 0.0) throw Error(ErrorKind::InvalidArgument, "tau and gamma must be positive");
    if (max_offset < 1 || max_offset > 2 * box.radius())
        throw Error(ErrorKind::InvalidArgument, "max_offset must lie in [1, 2N]");

    DistalReport rep;
    rep.tau = tau;
    rep.gamma = gamma;
    rep.empirical_margin = std::numeric_limits<double>::infinity();
    rep.best_gamma = std::numeric_limits<double>::infinity();

    std::vector<int> interior;
    for (int i = 0; i < box.size(); ++i)
        if (box.is_interior(i) && p.valid[i]) interior.push_back(i);

    const int d = box.dimension();
    const int w = 2 * max_offset + 1;
    int total = 1;
    for (int u = 0; u < d; ++u) total *= w;

    std::vector<int> sites;
    std::vector<cplx> inv;
    Site k(d), pre(d);
    for (int code = 0; code < total; ++code) {
        int rem = code;
        for (int u = d - 1; u >= 0; --u) {
            k[u] = rem % w - max_offset;
            rem /= w;
        }
        const int kn = sup_norm(k);
        if (kn == 0) continue;

        sites.clear();
        inv.clear();
        for (int i : interior) {
            auto s = box.site(i);
            for (int u = 0; u < d; ++u) pre[u] = s[u] - k[u];
            cplx shifted;
            if (p.formula) {
                shifted = p.formula(pre);
            } else if (auto src = box.index_of(pre); src && p.valid[*src]) {
                shifted = p.values[*src];
            } else {
                continue;
            }
            const cplx diff = p.values[i] - shifted;
            if (diff == cplx(0.0, 0.0)) {
                std::ostringstream os;
                os << "distal violation at (i=" << i << ", |k|=" << kn << ")";
                throw Error(ErrorKind::DistalViolation, os.str());
            }
            sites.push_back(i);
            inv.push_back(1.0 / diff);
        }
        if (sites.empty()) continue;
        const double nrm = policy_norm(box, p.policy, sites, inv);
        const double allowance = std::pow(static_cast<double>(kn), tau);
        const double margin = allowance / gamma - nrm;
        ++rep.offsets_tested;
        if (margin < rep.empirical_margin) {
            rep.empirical_margin = margin;
            rep.worst_offset = k;
        }
        rep.best_gamma = std::min(rep.best_gamma, allowance / nrm);
    }
    if (rep.offsets_tested == 0) throw Error(ErrorKind::DegenerateSequence, "degenerate sequence");
    return rep;
}

}  // namespace nmloc
