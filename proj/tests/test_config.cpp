#include <gtest/gtest.h>

#include <json.hpp>

#include "nmloc/config.hpp"
#include "nmloc/error.hpp"
#include "nmloc/pipeline.hpp"

using namespace nmloc;
using nlohmann::json;

namespace {

json minimal() {
    return json{{"box", {{"dimension", 1}, {"radius", 8}}}, {"potential", {{"kind", "maryland"}}}};
}

}  // namespace

TEST(Config, DefaultsAreFilled) {
    const RunConfig c = parse_config(minimal());
    EXPECT_EQ(c.box.interior_radius(), 4);
    EXPECT_TRUE(c.gamma_measured);
    EXPECT_EQ(c.params.tau, 1.0);
    EXPECT_DOUBLE_EQ(c.params.alpha, 4.0 - 0.5 - 0.25);
    EXPECT_DOUBLE_EQ(c.params.alpha1, 2.0 * c.params.alpha + 0.05);
    EXPECT_EQ(c.output.ledger_csv_path, "ledger.csv");
    EXPECT_EQ(c.distal_max_offset, 16);
}

TEST(Config, UnknownKeysRejected) {
    json j = minimal();
    j["params"] = {{"tua", 1.0}};
    EXPECT_THROW(parse_config(j), ConfigError);
    j = minimal();
    j["extra"] = 1;
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, IllTypedValuesRejected) {
    json j = minimal();
    j["box"]["radius"] = "eight";
    EXPECT_THROW(parse_config(j), ConfigError);
    j = minimal();
    j["params"] = {{"alpha0", 0.4}};
    EXPECT_THROW(parse_config(j), ConfigError);
    j = minimal();
    j["params"] = {{"mode", "sideways"}};
    EXPECT_THROW(parse_config(j), ConfigError);
    j = minimal();
    j["potential"]["kind"] = "almost_mathieu";
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, OverridesUseDottedPaths) {
    json j = minimal();
    auto [key, value] = parse_override("hopping.epsilon=0.25");
    EXPECT_EQ(key, "hopping.epsilon");
    apply_override(j, key, value);
    EXPECT_DOUBLE_EQ(parse_config(j).hopping.epsilon, 0.25);
    auto [k2, v2] = parse_override("params.mode=direct");
    apply_override(j, k2, v2);
    EXPECT_EQ(parse_config(j).params.mode, Mode::Direct);
    EXPECT_THROW(parse_override("novalue"), ConfigError);
}

TEST(Config, SweepAxisParsesCommaLists) {
    const SweepAxis a = parse_sweep_override("hopping.epsilon=0.3,0.1,0.03");
    ASSERT_EQ(a.values.size(), 3u);
    EXPECT_DOUBLE_EQ(a.values[2].get<double>(), 0.03);
    const SweepAxis b = parse_sweep_override("box.radius=16");
    ASSERT_EQ(b.values.size(), 1u);
}

TEST(Config, CustomPotentialNeedsValuesPerSite) {
    json j = minimal();
    j["potential"] = {{"kind", "custom"}, {"custom_values", {1.0, 2.0}}};
    EXPECT_THROW(parse_config(j), ConfigError);
    std::vector<double> v;
    for (int i = 0; i < 17; ++i) v.push_back(i * 1.5);
    j["potential"]["custom_values"] = v;
    j["params"] = {{"gamma", 1.0}};
    const RunConfig c = parse_config(j);
    ASSERT_TRUE(c.potential.custom_values.has_value());
    EXPECT_EQ((*c.potential.custom_values)[3], cplx(4.5));
}

TEST(Pipeline, LedgerCsvHeaderAndRows) {
    json j = minimal();
    j["hopping"] = {{"epsilon", 0.05}};
    const RunOutcome out = execute_run(parse_config(j));
    const std::string csv = ledger_csv(out.result.ledger);
    EXPECT_EQ(csv.rfind("k,theta_k,W@0.6,", 0), 0u);
    EXPECT_NE(csv.find(",margin:W@0.6,"), std::string::npos);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    EXPECT_EQ(lines, static_cast<std::size_t>(out.result.steps) + 1);
    EXPECT_TRUE(out.all_passed()) << out.failed_check()->name;
}

TEST(Pipeline, ReportCarriesRequiredKeys) {
    json j = minimal();
    j["hopping"] = {{"epsilon", 0.05}};
    const json r = report_json(execute_run(parse_config(j)));
    for (const char* k : {"config_echo", "converged", "steps", "final_residual_norms", "qplus_norms", "dplus_norm",
                          "localization", "theory_conditions", "ledger_columns"})
        EXPECT_TRUE(r.contains(k)) << k;
    for (const char* k : {"eigenreports", "completeness", "spectrum"}) EXPECT_TRUE(r["localization"].contains(k)) << k;
    for (const auto& col : r["ledger_columns"]) EXPECT_FALSE(col["tags"].empty());
    EXPECT_EQ(r["config_echo"], j);
}

TEST(Pipeline, FormatKeepsSeventeenDigits) {
    EXPECT_EQ(format_g17(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(format_g17(1.0 / 3.0)), 1.0 / 3.0);
}
