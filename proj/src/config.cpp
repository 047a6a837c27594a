#include "nmloc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nmloc/error.hpp"

namespace nmloc {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
}

const json* get(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

double num(const json& obj, const char* key, const std::string& where, double fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
    return v->get<double>();
}

int integer(const json& obj, const char* key, const std::string& where, int fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError("'" + where + "." + key + "' must be an integer");
    return v->get<int>();
}

std::string str(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError("'" + where + "." + key + "' must be a string");
    return v->get<std::string>();
}

bool boolean(const json& obj, const char* key, const std::string& where, bool fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError("'" + where + "." + key + "' must be a boolean");
    return v->get<bool>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("'" + where + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

RunConfig parse_config(const json& j) {
    reject_unknown(j, "config", {"box", "potential", "hopping", "params", "output", "seed"});
    RunConfig c;
    c.echo = j;

    const json empty = json::object();
    const json& jb = j.contains("box") ? j.at("box") : throw ConfigError("missing 'box' section");
    reject_unknown(jb, "box", {"dimension", "radius", "interior_radius"});
    const int d = integer(jb, "dimension", "box", 1);
    const int N = integer(jb, "radius", "box", 0);
    if (d < 1 || d > 3) throw ConfigError("box.dimension must be 1, 2 or 3");
    if (N < 1) throw ConfigError("box.radius must be a positive integer");
    const int M = integer(jb, "interior_radius", "box", std::max(1, N / 2));
    if (M < 1 || M > N) throw ConfigError("box.interior_radius must lie in [1, radius]");
    c.box = LatticeBox(d, N, M);

    const json& jp = get(j, "potential") ? j.at("potential") : throw ConfigError("missing 'potential' section");
    reject_unknown(jp, "potential", {"kind", "omega", "custom_values", "norm_policy"});
    c.potential.kind = potential_kind_from_string(str(jp, "kind", "potential", "maryland"));
    if (const json* om = get(jp, "omega")) {
        c.potential.omega = num_list(*om, "potential.omega");
    } else {
        const double defaults[3] = {golden_mean(), std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0};
        c.potential.omega.assign(defaults, defaults + d);
    }
    if (c.potential.kind != PotentialKind::Custom && c.potential.kind != PotentialKind::LimitPeriodicBinary &&
        c.potential.kind != PotentialKind::LimitPeriodicTernary && static_cast<int>(c.potential.omega.size()) != d)
        throw ConfigError("potential.omega needs one entry per dimension");
    if (const json* cv = get(jp, "custom_values")) {
        if (!cv->is_array() || static_cast<int>(cv->size()) != c.box.size())
            throw ConfigError("potential.custom_values needs one entry per box site");
        Eigen::VectorXcd v(c.box.size());
        for (int i = 0; i < c.box.size(); ++i) {
            const json& e = (*cv)[i];
            if (e.is_number())
                v[i] = e.get<double>();
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                v[i] = cplx(e[0].get<double>(), e[1].get<double>());
            else
                throw ConfigError("potential.custom_values entries must be numbers or [re, im]");
        }
        c.potential.custom_values = std::move(v);
    }
    if (c.potential.kind == PotentialKind::Custom && !c.potential.custom_values)
        throw ConfigError("custom potential needs potential.custom_values");
    const std::string np = str(jp, "norm_policy", "potential", "sup");
    if (np == "sup") {
        c.norm_policy.kind = NormKind::Sup;
    } else if (np == "sampled_bv") {
        c.norm_policy.kind = NormKind::SampledBV;
        c.norm_policy.omega = c.potential.omega;
        if (static_cast<int>(c.norm_policy.omega.size()) != d)
            throw ConfigError("sampled_bv needs potential.omega with one entry per dimension");
    } else {
        throw ConfigError("potential.norm_policy must be 'sup' or 'sampled_bv'");
    }

    const json& jh = get(j, "hopping") ? j.at("hopping") : empty;
    reject_unknown(jh, "hopping", {"s_exponent", "epsilon", "profile"});
    c.hopping.s_exponent = num(jh, "s_exponent", "hopping", 4.0);
    c.hopping.epsilon = num(jh, "epsilon", "hopping", 0.1);
    if (str(jh, "profile", "hopping", "power_law") != "power_law")
        throw ConfigError("hopping.profile must be 'power_law'");
    if (!(c.hopping.s_exponent > 0.0)) throw ConfigError("hopping.s_exponent must be positive");
    if (c.hopping.epsilon < 0.0) throw ConfigError("hopping.epsilon must be nonnegative");

    const json& jq = get(j, "params") ? j.at("params") : empty;
    reject_unknown(jq, "params",
                   {"tau", "gamma", "delta", "alpha0", "alpha", "alpha1", "theta0", "Theta", "mode", "theory_checks",
                    "stop_tol", "max_steps", "s_grid", "log10_epsilon", "fixed_point_tol", "fixed_point_max_iter",
                    "divisor_floor", "distal_max_offset"});
    SchemeParams& p = c.params;
    p.tau = num(jq, "tau", "params", 1.0);
    p.delta = num(jq, "delta", "params", 0.05);
    p.alpha0 = num(jq, "alpha0", "params", 0.6);
    p.s_hopping = c.hopping.s_exponent;
    p.epsilon = c.hopping.epsilon;
    p.derive_alphas(d);
    p.alpha = num(jq, "alpha", "params", p.alpha);
    p.alpha1 = num(jq, "alpha1", "params", 2.0 * p.alpha + p.delta);
    p.theta0 = num(jq, "theta0", "params", 2.0);
    p.Theta = num(jq, "Theta", "params", 2.0);
    const std::string mode = str(jq, "mode", "params", "inverse");
    if (mode == "inverse")
        p.mode = Mode::Inverse;
    else if (mode == "direct")
        p.mode = Mode::Direct;
    else
        throw ConfigError("params.mode must be 'inverse' or 'direct'");
    p.theory_checks = boolean(jq, "theory_checks", "params", false);
    p.stop_tol = num(jq, "stop_tol", "params", 1e-10);
    p.max_steps = integer(jq, "max_steps", "params", 40);
    if (const json* g = get(jq, "s_grid")) p.s_grid = num_list(*g, "params.s_grid");
    if (const json* le = get(jq, "log10_epsilon")) {
        if (!le->is_number()) throw ConfigError("params.log10_epsilon must be a number");
        c.log10_epsilon = le->get<double>();
    }
    p.fixed_point.tol = num(jq, "fixed_point_tol", "params", 1e-12);
    p.fixed_point.max_iter = integer(jq, "fixed_point_max_iter", "params", 200);
    p.generator.divisor_floor = num(jq, "divisor_floor", "params", 1e-14);
    c.distal_max_offset = integer(jq, "distal_max_offset", "params", 2 * N);
    if (c.distal_max_offset < 1 || c.distal_max_offset > 2 * N)
        throw ConfigError("params.distal_max_offset must lie in [1, 2N]");
    if (const json* g = get(jq, "gamma")) {
        if (!g->is_number() || !(g->get<double>() > 0.0)) throw ConfigError("params.gamma must be a positive number");
        p.gamma = g->get<double>();
    } else {
        c.gamma_measured = true;
    }
    if (!(2.0 * p.alpha0 > d)) throw ConfigError("params.alpha0 must exceed d/2");
    if (!(p.theta0 > 0.0) || !(p.Theta > 1.0)) throw ConfigError("need params.theta0 > 0 and params.Theta > 1");
    if (p.max_steps < 1) throw ConfigError("params.max_steps must be positive");
    if (!(p.tau > 0.0) || !(p.delta > 0.0)) throw ConfigError("params.tau and params.delta must be positive");

    const json& jo = get(j, "output") ? j.at("output") : empty;
    reject_unknown(jo, "output", {"ledger_csv_path", "report_json_path", "checkpoint_dir"});
    c.output.ledger_csv_path = str(jo, "ledger_csv_path", "output", "ledger.csv");
    c.output.report_json_path = str(jo, "report_json_path", "output", "report.json");
    if (get(jo, "checkpoint_dir")) c.output.checkpoint_dir = str(jo, "checkpoint_dir", "output", "");

    if (const json* s = get(j, "seed")) {
        if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
            throw ConfigError("seed must be a nonnegative integer");
        c.seed = s->get<std::uint64_t>();
    }
    return c;
}

json load_config_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

std::pair<std::string, json> parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + text + "'");
    const std::string key = text.substr(0, eq);
    const std::string raw = text.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    return {key, value};
}

void apply_override(json& j, const std::string& dotted_key, const json& value) {
    json* node = &j;
    std::stringstream ss(dotted_key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("malformed override key '" + dotted_key + "'");
        parts.push_back(part);
    }
    if (parts.empty()) throw ConfigError("malformed override key '" + dotted_key + "'");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ConfigError("override path '" + dotted_key + "' crosses a non-object");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

SweepAxis parse_sweep_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + text + "'");
    SweepAxis axis;
    axis.key = text.substr(0, eq);
    const std::string raw = text.substr(eq + 1);
    json whole = json::parse(raw, nullptr, false);
    if (!whole.is_discarded()) {
        axis.values.push_back(whole);
        return axis;
    }
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        json v = json::parse(item, nullptr, false);
        axis.values.push_back(v.is_discarded() ? json(item) : v);
    }
    if (axis.values.empty()) throw ConfigError("empty sweep axis '" + axis.key + "'");
    return axis;
}

}  // namespace nmloc
