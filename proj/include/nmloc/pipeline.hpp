#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmloc/config.hpp"
#include "nmloc/localization.hpp"
#include "nmloc/sequence.hpp"
#include "nmloc/theory.hpp"

namespace nmloc {

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
};

struct RunOutcome {
    RunConfig config;
    double gamma = 0.0;
    std::optional<DistalReport> distal;
    SchemeResult result;
    EigenSummary eigen;
    CompletenessReport completeness;
    std::optional<SpectrumReport> spectrum;
    std::string spectrum_note;
    TheoryReport theory;
    std::vector<Check> checks;

    bool all_passed() const;
    const Check* failed_check() const;
};

// Measures gamma on the interior window when the config leaves it null.
double resolve_gamma(const RunConfig& cfg, const DiagonalOperator& D, std::optional<DistalReport>* report = nullptr);

TheoryReport theory_for_config(const RunConfig& cfg);

RunOutcome execute_run(const RunConfig& cfg, const StepObserver& observer = {});

std::string ledger_csv(const std::vector<LedgerRow>& rows);
nlohmann::json ledger_columns_json(const std::vector<LedgerRow>& rows);
nlohmann::json theory_json(const TheoryReport& rep);
nlohmann::json report_json(const RunOutcome& out);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

std::string format_g17(double v);

}  // namespace nmloc
