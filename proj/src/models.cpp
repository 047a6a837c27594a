#include "nmloc/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nmloc/error.hpp"

namespace nmloc {

PotentialKind potential_kind_from_string(const std::string& s) {
    if (s == "maryland") return PotentialKind::Maryland;
    if (s == "sarnak") return PotentialKind::Sarnak;
    if (s == "craig_mod1") return PotentialKind::CraigMod1;
    if (s == "limit_periodic_binary") return PotentialKind::LimitPeriodicBinary;
    if (s == "limit_periodic_ternary") return PotentialKind::LimitPeriodicTernary;
    if (s == "custom") return PotentialKind::Custom;
    throw ConfigError("unknown potential kind '" + s + "'");
}

std::string to_string(PotentialKind k) {
    switch (k) {
    case PotentialKind::Maryland: return "maryland";
    case PotentialKind::Sarnak: return "sarnak";
    case PotentialKind::CraigMod1: return "craig_mod1";
    case PotentialKind::LimitPeriodicBinary: return "limit_periodic_binary";
    case PotentialKind::LimitPeriodicTernary: return "limit_periodic_ternary";
    case PotentialKind::Custom: return "custom";
    }
    return "custom";
}

double golden_mean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

namespace {

long double dot(std::span<const int> site, const std::vector<double>& omega) {
    long double x = 0.0L;
    for (std::size_t u = 0; u < site.size(); ++u) x += static_cast<long double>(site[u]) * omega[u];
    return x;
}

// x - round(x), in [-1/2, 1/2]
long double centered_frac(long double x) { return x - std::nearbyint(x); }

void need_omega(const PotentialSpec& spec, int d) {
    if (static_cast<int>(spec.omega.size()) != d)
        throw Error(ErrorKind::InvalidArgument, "potential needs one frequency per dimension");
}

}  // namespace

double limit_periodic_value(std::span<const int> site, double base) {
    const int d = static_cast<int>(site.size());
    // 2^{-60} is below double resolution relative to the leading terms.
    const int vmax = 60;
    double acc = 0.0;
    for (int v = 1; v <= vmax; ++v) {
        const std::int64_t period = std::int64_t{1} << v;
        const std::int64_t half = period / 2;
        for (int u = 1; u <= d; ++u) {
            std::int64_t m = site[u - 1] % period;
            if (m < 0) m += period;
            const bool chi = (v % 2 == 0) ? (m < half) : (m >= half);
            if (chi) acc += std::pow(base, -static_cast<double>((v - 1) * d + u));
        }
    }
    return acc;
}

SiteFormula potential_formula(const PotentialSpec& spec, int d) {
    switch (spec.kind) {
    case PotentialKind::Maryland: {
        need_omega(spec, d);
        const auto omega = spec.omega;
        return [omega](std::span<const int> s) {
            const long double r = centered_frac(dot(s, omega));
            return cplx(static_cast<double>(std::tan(std::numbers::pi_v<long double> * r)), 0.0);
        };
    }
    case PotentialKind::Sarnak: {
        need_omega(spec, d);
        const auto omega = spec.omega;
        return [omega](std::span<const int> s) {
            const long double r = centered_frac(dot(s, omega));
            const long double a = 2.0L * std::numbers::pi_v<long double> * r;
            return cplx(static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a)));
        };
    }
    case PotentialKind::CraigMod1: {
        need_omega(spec, d);
        const auto omega = spec.omega;
        return [omega](std::span<const int> s) {
            const long double x = dot(s, omega);
            return cplx(static_cast<double>(x - std::floor(x)), 0.0);
        };
    }
    case PotentialKind::LimitPeriodicBinary:
        return [](std::span<const int> s) { return cplx(limit_periodic_value(s, 2.0), 0.0); };
    case PotentialKind::LimitPeriodicTernary:
        return [](std::span<const int> s) { return cplx(2.0 * limit_periodic_value(s, 3.0), 0.0); };
    case PotentialKind::Custom:
        break;
    }
    throw Error(ErrorKind::InvalidArgument, "custom potentials have no site formula");
}

DiagonalOperator build_potential(const PotentialSpec& spec, const LatticeBox& box, NormPolicy policy) {
    if (spec.kind == PotentialKind::Custom) {
        if (!spec.custom_values) throw Error(ErrorKind::InvalidArgument, "custom potential needs values");
        return DiagonalOperator::from_values(box, *spec.custom_values, std::move(policy));
    }
    if (spec.kind == PotentialKind::Maryland) {
        need_omega(spec, box.dimension());
        for (int i = 0; i < box.size(); ++i) {
            const long double r = centered_frac(dot(box.site(i), spec.omega));
            if (std::abs(std::abs(r) - 0.5L) < kPoleGuard) {
                std::ostringstream os;
                os << "pole proximity at site index " << i << ": i.omega within " << kPoleGuard << " of Z + 1/2";
                throw Error(ErrorKind::PoleProximity, os.str());
            }
        }
    }
    return {box, Sequence::from_formula(box, potential_formula(spec, box.dimension()), std::move(policy))};
}

LatticeOperator build_hopping(const HoppingSpec& spec, const LatticeBox& box, NormPolicy policy) {
    if (!(spec.s_exponent > 0.0)) throw Error(ErrorKind::InvalidArgument, "hopping exponent must be positive");
    if (spec.epsilon < 0.0) throw Error(ErrorKind::InvalidArgument, "epsilon must be nonnegative");
    if (spec.profile == HoppingProfile::Custom && !spec.custom_phi)
        throw Error(ErrorKind::InvalidArgument, "custom hopping needs a profile function");

    const int m = box.offset_count();
    std::vector<double> phi(m, 0.0);
    for (int c = 0; c < m; ++c) {
        const Site k = box.decode_offset(c);
        const int kn = sup_norm(k);
        if (kn == 0) continue;
        const double envelope = std::pow(static_cast<double>(kn), -spec.s_exponent);
        if (spec.profile == HoppingProfile::PowerLaw) {
            phi[c] = envelope;
        } else {
            phi[c] = spec.custom_phi(k);
            if (std::abs(phi[c]) > envelope * (1.0 + 1e-15))
                throw Error(ErrorKind::InvalidArgument, "custom hopping exceeds |k|^{-s}");
        }
    }
    const int n = box.size();
    Eigen::MatrixXcd t(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) t(i, j) = spec.epsilon * phi[box.offset_code(i, j)];
    return {box, std::move(t), std::move(policy)};
}

DiophantineReport check_diophantine(const std::vector<double>& omega, double tau, int max_k) {
    if (max_k < 1) throw Error(ErrorKind::InvalidArgument, "max_k must be at least 1");
    if (omega.empty()) throw Error(ErrorKind::InvalidArgument, "empty frequency vector");
    const int d = static_cast<int>(omega.size());
    const int w = 2 * max_k + 1;
    long total = 1;
    for (int u = 0; u < d; ++u) total *= w;

    DiophantineReport rep;
    rep.gamma_best = std::numeric_limits<double>::infinity();
    Site k(d);
    for (long code = 0; code < total; ++code) {
        long rem = code;
        for (int u = d - 1; u >= 0; --u) {
            k[u] = static_cast<int>(rem % w) - max_k;
            rem /= w;
        }
        const int kn = sup_norm(k);
        if (kn == 0) continue;
        const double dist = static_cast<double>(std::abs(centered_frac(dot(k, omega))));
        if (dist < 1e-12) {
            std::ostringstream os;
            os << "rational frequency: |k.omega| mod 1 vanishes at |k| = " << kn;
            throw Error(ErrorKind::RationalFrequency, os.str());
        }
        const double g = dist * std::pow(static_cast<double>(kn), tau);
        if (g < rep.gamma_best) {
            rep.gamma_best = g;
            rep.worst_k = k;
        }
    }
    return rep;
}

}  // namespace nmloc
