#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmloc/operator.hpp"

namespace nmloc {

enum class PotentialKind { Maryland, Sarnak, CraigMod1, LimitPeriodicBinary, LimitPeriodicTernary, Custom };

PotentialKind potential_kind_from_string(const std::string& s);
std::string to_string(PotentialKind k);

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Maryland;
    std::vector<double> omega;
    std::optional<Eigen::VectorXcd> custom_values;
};

double golden_mean();

// Distance from Maryland poles i.omega in Z + 1/2 below which construction fails.
constexpr double kPoleGuard = 1e-8;

// Exact site formula for the quasi-periodic and limit-periodic kinds.
SiteFormula potential_formula(const PotentialSpec& spec, int dimension);

DiagonalOperator build_potential(const PotentialSpec& spec, const LatticeBox& box, NormPolicy policy = {});

// sum_v sum_u chi_{A_v}(i_u) base^{-(v-1)d-u}; A_v is the union of
// [n 2^v, n 2^v + 2^{v-1}) for even v and its complement for odd v.
double limit_periodic_value(std::span<const int> site, double base);

enum class HoppingProfile { PowerLaw, Custom };

struct HoppingSpec {
    double s_exponent = 4.0;
    double epsilon = 0.0;
    HoppingProfile profile = HoppingProfile::PowerLaw;
    // phi_k for Custom; must obey |phi_k| <= |k|^{-s} and phi_0 = 0.
    std::function<double(std::span<const int>)> custom_phi;
};

// T_ij = epsilon phi_{i-j}
LatticeOperator build_hopping(const HoppingSpec& spec, const LatticeBox& box, NormPolicy policy = {});

struct DiophantineReport {
    double gamma_best = 0.0;
    Site worst_k;
};

// min over 0 < |k|_inf <= max_k of ||k.omega||_{R/Z} |k|^tau
DiophantineReport check_diophantine(const std::vector<double>& omega, double tau, int max_k);

}  // namespace nmloc
