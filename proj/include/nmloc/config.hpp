#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmloc/iteration.hpp"
#include "nmloc/models.hpp"

namespace nmloc {

struct OutputSpec {
    std::string ledger_csv_path = "ledger.csv";
    std::string report_json_path = "report.json";
    std::optional<std::string> checkpoint_dir;
};

struct RunConfig {
    LatticeBox box;
    PotentialSpec potential;
    NormPolicy norm_policy;
    HoppingSpec hopping;
    SchemeParams params;
    // gamma was null in the file and must be measured from the potential.
    bool gamma_measured = false;
    int distal_max_offset = 0;
    std::optional<double> log10_epsilon;
    OutputSpec output;
    std::uint64_t seed = 0;
    // The configuration as read, after overrides, echoed into reports.
    nlohmann::json echo;
};

// Fills defaults and rejects unknown keys or ill-typed values with ConfigError.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json load_config_json(const std::string& path);

// Splits "a.b.c=value". The value is parsed as JSON, falling back to a string.
std::pair<std::string, nlohmann::json> parse_override(const std::string& text);
void apply_override(nlohmann::json& j, const std::string& dotted_key, const nlohmann::json& value);

// A sweep axis comes from an override whose value is a comma list that is
// not itself valid JSON, e.g. hopping.epsilon=0.3,0.1,0.03.
struct SweepAxis {
    std::string key;
    std::vector<nlohmann::json> values;
};
SweepAxis parse_sweep_override(const std::string& text);

}  // namespace nmloc
