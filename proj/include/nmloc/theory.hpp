#pragma once

#include <string>
#include <vector>

#include "nmloc/iteration.hpp"

namespace nmloc {

struct TheoryCondition {
    std::string name;
    std::string expression;
    bool holds = false;
    // Positive when the inequality holds with room. Conditions on theta0,
    // Theta and |T| are compared in log10 so that astronomically large
    // witnesses stay finite.
    double margin = 0.0;
    bool log10_margin = false;
    // The inequality hides an unspecified constant; it is evaluated with C = 1.
    bool non_effective = false;
};

struct TheoryInputs {
    int d = 1;
    // log10 |T|_{alpha+3delta} and log10 |T|_{alpha+4delta}; -inf for T = 0.
    double log10_T_alpha3 = 0.0;
    double log10_T_alpha4 = 0.0;
};

struct ThetaRequirement {
    double log10_required = 0.0;
    std::string binding;
    std::vector<std::pair<std::string, double>> candidates;  // (expression, log10 value)
};

struct TheoryReport {
    std::vector<TheoryCondition> conditions;
    ThetaRequirement theta;
    double C0 = 0.0;
    bool all_hold() const;
    const TheoryCondition* find(const std::string& name) const;
};

// Norms of the already-scaled hopping operator.
TheoryInputs theory_inputs(const LatticeOperator& T, const SchemeParams& params);

// Same, for epsilon given as log10 (the unit-coupling operator is passed).
TheoryInputs theory_inputs_log_epsilon(const LatticeOperator& T_unit, const SchemeParams& params,
                                       double log10_epsilon);

ThetaRequirement theta_requirement(const SchemeParams& params, const TameConstants& tc);

TheoryReport check_theory_conditions(const SchemeParams& params, const TheoryInputs& in, const TameConstants& tc);

}  // namespace nmloc
