#include "nmloc/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "nmloc/error.hpp"
#include "nmloc/snapshot.hpp"

namespace nmloc {

using nlohmann::json;

bool RunOutcome::all_passed() const { return failed_check() == nullptr; }

const Check* RunOutcome::failed_check() const {
    for (const auto& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string format_s(double s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", s);
    return buf;
}

std::string column_name(const LedgerEntry& e) { return e.label + "@" + format_s(e.s); }

std::vector<std::string> ledger_column_order(const std::vector<LedgerRow>& rows) {
    std::vector<std::string> order;
    std::map<std::string, int> seen;
    for (const auto& r : rows)
        for (const auto& e : r.entries) {
            const std::string c = column_name(e);
            if (seen.emplace(c, 0).second) order.push_back(c);
        }
    return order;
}

// Worst margin of one ledger label across all rows.
Check ledger_check(const std::string& name, const std::vector<LedgerRow>& rows, const std::string& label) {
    Check c{name, true, 0.0, 0.0};
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        for (const auto& e : r.entries)
            if (e.label == label && e.margin() < worst) {
                worst = e.margin();
                c.value = e.norm;
                c.bound = e.bound;
            }
    c.passed = !(worst < 0.0);
    return c;
}

}  // namespace

double resolve_gamma(const RunConfig& cfg, const DiagonalOperator& D, std::optional<DistalReport>* report) {
    if (!cfg.gamma_measured) return cfg.params.gamma;
    const DistalReport rep = distal_margin(D.diag, cfg.params.tau, 1.0, cfg.distal_max_offset);
    if (report) *report = rep;
    if (!(rep.best_gamma > 0.0) || !std::isfinite(rep.best_gamma))
        throw Error(ErrorKind::DistalViolation, "could not measure a positive gamma");
    return rep.best_gamma;
}

TheoryReport theory_for_config(const RunConfig& cfg) {
    SchemeParams p = cfg.params;
    const TameConstants tc = make_tame_constants(cfg.box.dimension(), p.alpha0);
    TheoryInputs in;
    if (cfg.log10_epsilon) {
        HoppingSpec unit = cfg.hopping;
        unit.epsilon = 1.0;
        in = theory_inputs_log_epsilon(build_hopping(unit, cfg.box, cfg.norm_policy), p, *cfg.log10_epsilon);
    } else {
        in = theory_inputs(build_hopping(cfg.hopping, cfg.box, cfg.norm_policy), p);
    }
    if (!(p.gamma > 0.0)) p.gamma = 1.0;
    return check_theory_conditions(p, in, tc);
}

RunOutcome execute_run(const RunConfig& cfg, const StepObserver& observer) {
    RunOutcome out;
    out.config = cfg;
    const DiagonalOperator D = build_potential(cfg.potential, cfg.box, cfg.norm_policy);
    const LatticeOperator T = build_hopping(cfg.hopping, cfg.box, cfg.norm_policy);

    out.gamma = resolve_gamma(cfg, D, &out.distal);
    out.config.params.gamma = out.gamma;
    out.theory = theory_for_config(out.config);

    out.result = run(T, D, out.config.params, observer);
    const SchemeResult& r = out.result;
    out.eigen = eigenfunctions(r, out.config.params);
    out.completeness = completeness_check(r);
    if (r.real_symmetric) {
        out.spectrum = spectrum_compare(r);
    } else {
        out.spectrum_note = "skipped: operator is not real symmetric";
    }

    out.checks.push_back({"converged", r.converged, static_cast<double>(r.steps),
                          static_cast<double>(out.config.params.max_steps)});
    out.checks.push_back(ledger_check("conj_residual_every_step", r.ledger, "conj_residual"));
    out.checks.push_back(ledger_check("remainder_decomposition_every_step", r.ledger, "decomp_residual"));
    out.checks.push_back(ledger_check("generator_exactness_every_step", r.ledger, "generator_residual"));
    const double h0 = sobolev_norm(r.Hprime, 0.0);
    out.checks.push_back({"master_identity", r.master_identity_defect <= 1e-9 * (1.0 + h0), r.master_identity_defect,
                          1e-9 * (1.0 + h0)});
    if (r.converged) {
        out.checks.push_back({"telescoping", r.telescoping_defect <= 1e-12 * (1.0 + h0), r.telescoping_defect,
                              1e-12 * (1.0 + h0)});
        const double eb = out.eigen.qplus_op * out.eigen.rfinal_op + out.eigen.rounding_allowance;
        out.checks.push_back(
            {"eigen_residual_bound", out.eigen.max_interior_residual <= eb, out.eigen.max_interior_residual, eb});
        if (out.spectrum) {
            const double sb = out.eigen.max_interior_residual + 1e-10;
            out.checks.push_back(
                {"spectrum_hausdorff", out.spectrum->hausdorff_interior <= sb, out.spectrum->hausdorff_interior, sb});
        }
    }
    return out;
}

std::string ledger_csv(const std::vector<LedgerRow>& rows) {
    const auto order = ledger_column_order(rows);
    std::string s = "k,theta_k";
    for (const auto& c : order) s += "," + c;
    for (const auto& c : order) s += ",margin:" + c;
    s += "\n";
    for (const auto& r : rows) {
        std::map<std::string, const LedgerEntry*> by;
        for (const auto& e : r.entries) by[column_name(e)] = &e;
        s += std::to_string(r.k) + "," + format_g17(r.theta_k);
        for (const auto& c : order) {
            s += ",";
            if (auto it = by.find(c); it != by.end()) s += format_g17(it->second->norm);
        }
        for (const auto& c : order) {
            s += ",";
            if (auto it = by.find(c); it != by.end()) s += format_g17(it->second->margin());
        }
        s += "\n";
    }
    return s;
}

json ledger_columns_json(const std::vector<LedgerRow>& rows) {
    json cols = json::array();
    std::map<std::string, std::size_t> index;
    for (const auto& r : rows)
        for (const auto& e : r.entries) {
            const std::string c = column_name(e);
            auto it = index.find(c);
            if (it == index.end()) {
                index[c] = cols.size();
                cols.push_back({{"column", c}, {"label", e.label}, {"s", e.s}, {"tags", json::array({e.tag})}});
            } else {
                json& tags = cols[it->second]["tags"];
                if (std::find(tags.begin(), tags.end(), json(e.tag)) == tags.end()) tags.push_back(e.tag);
            }
        }
    return cols;
}

json theory_json(const TheoryReport& rep) {
    json conds = json::array();
    for (const auto& c : rep.conditions)
        conds.push_back({{"name", c.name},
                         {"expression", c.expression},
                         {"holds", c.holds},
                         {"margin", c.margin},
                         {"log10_margin", c.log10_margin},
                         {"non_effective", c.non_effective}});
    return conds;
}

namespace {

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json norms_json(const LatticeOperator& x, const std::vector<double>& grid) {
    json arr = json::array();
    const OffsetNorms on = offset_norms(x);
    for (double s : grid) arr.push_back({{"s", s}, {"norm", on.evaluate(s)}});
    return arr;
}

}  // namespace

json report_json(const RunOutcome& out) {
    const SchemeResult& r = out.result;
    const SchemeParams& p = out.config.params;
    const int n = r.Qplus.size();

    std::vector<double> grid = {0.0};
    for (double s : p.grid()) grid.push_back(s);

    json j;
    j["config_echo"] = out.config.echo;
    j["converged"] = r.converged;
    j["steps"] = r.steps;
    j["final_residual_norms"] = norms_json(r.final_residual, grid);
    const LatticeOperator qmi(r.Qplus.box, r.Qplus.a - Eigen::MatrixXcd::Identity(n, n), r.Qplus.policy);
    j["qplus_norms"] = norms_json(qmi, grid);
    j["dplus_norm"] = r.Dplus.size() ? r.Dplus.cwiseAbs().maxCoeff() : 0.0;

    json eig = json::array();
    for (const auto& e : out.eigen.reports)
        eig.push_back({{"center", e.center_site},
                       {"eigenvalue", cplx_json(e.eigenvalue)},
                       {"decay_envelope_margin", e.decay_envelope_margin},
                       {"envelope_constant", e.envelope_constant},
                       {"eigen_residual", e.eigen_residual},
                       {"residual_bound", e.residual_bound},
                       {"interior", e.interior}});
    json loc;
    loc["eigenreports"] = std::move(eig);
    loc["decay_exponent"] = out.eigen.exponent;
    loc["qplus_op_norm"] = out.eigen.qplus_op;
    loc["rfinal_op_norm"] = out.eigen.rfinal_op;
    loc["rounding_allowance"] = out.eigen.rounding_allowance;
    loc["max_interior_residual"] = out.eigen.max_interior_residual;
    loc["min_interior_envelope_margin"] = out.eigen.min_interior_envelope_margin;
    loc["max_interior_envelope_constant"] = out.eigen.max_interior_envelope_constant;
    json comp = {{"min_singular_value", out.completeness.min_singular_value},
                 {"qtq_offdiag", out.completeness.qtq_offdiag}};
    if (out.completeness.has_gram) {
        comp["utu_offdiag"] = out.completeness.utu_offdiag;
        comp["utu_defect"] = out.completeness.utu_defect;
    }
    loc["completeness"] = std::move(comp);
    if (out.spectrum)
        loc["spectrum"] = {{"hausdorff_interior", out.spectrum->hausdorff_interior},
                           {"eigenvalue_count", out.spectrum->eigenvalue_count}};
    else
        loc["spectrum"] = {{"note", out.spectrum_note}};
    j["localization"] = std::move(loc);

    j["theory_conditions"] = theory_json(out.theory);
    j["theta_requirement"] = {{"log10_required", out.theory.theta.log10_required},
                              {"binding", out.theory.theta.binding}};
    j["ledger_columns"] = ledger_columns_json(r.ledger);

    json checks = json::array();
    for (const auto& c : out.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
    j["checks"] = std::move(checks);

    j["diagnostics"] = {{"gamma", out.gamma},
                        {"gamma_measured", out.config.gamma_measured},
                        {"mode", p.mode == Mode::Inverse ? "inverse" : "direct"},
                        {"master_residual", r.master_residual},
                        {"master_identity_defect", r.master_identity_defect},
                        {"telescoping_defect", r.telescoping_defect},
                        {"qqinv_health", r.qqinv_health},
                        {"qplus_diag_s", r.qplus_diag_s},
                        {"qplus_minus_identity", r.qplus_minus_identity},
                        {"qplus_scaling_ratio", r.qplus_scaling_ratio},
                        {"unitarized", r.U.has_value()},
                        {"warnings", r.warnings}};
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        os << content;
        if (!os) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace nmloc
