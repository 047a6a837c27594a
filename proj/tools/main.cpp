#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmloc/config.hpp"
#include "nmloc/error.hpp"
#include "nmloc/pipeline.hpp"
#include "nmloc/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nmloc;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
};

json load_with_overrides(const Common& c) {
    json j = load_config_json(c.config_path);
    for (const auto& o : c.overrides) {
        auto [key, value] = parse_override(o);
        apply_override(j, key, value);
    }
    return j;
}

std::string resolve(const std::string& dir, const std::string& path) {
    const fs::path p(path);
    return p.is_absolute() ? path : (fs::path(dir) / p).string();
}

std::string check_line(const Check& c) {
    return c.name + " (value " + format_g17(c.value) + ", bound " + format_g17(c.bound) + ")";
}

StepObserver checkpoint_writer(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.output.checkpoint_dir) return {};
    const std::string dir = resolve(out_dir, *cfg.output.checkpoint_dir);
    fs::create_directories(dir);
    return [dir](const IterationState& st, const LedgerRow& row) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "step_%03d", row.k);
        const fs::path base = fs::path(dir) / stem;
        for (const auto& [name, op] : {std::pair<const char*, const LatticeOperator*>{"Q", &st.Q},
                                       {"Qinv", &st.Qinv},
                                       {"R", &st.R}}) {
            const std::string target = base.string() + "_" + name + ".nmls";
            write_snapshot(target + ".tmp", *op);
            fs::rename(target + ".tmp", target);
        }
    };
}

void write_outputs(const RunOutcome& out, const std::string& ledger_path, const std::string& report_path) {
    write_atomic(ledger_path, ledger_csv(out.result.ledger));
    write_atomic(report_path, report_json(out).dump(2) + "\n");
}

int cmd_run(const Common& c) {
    const RunConfig cfg = parse_config(load_with_overrides(c));
    fs::create_directories(c.out_dir);
    const RunOutcome out = execute_run(cfg, checkpoint_writer(cfg, c.out_dir));
    write_outputs(out, resolve(c.out_dir, cfg.output.ledger_csv_path), resolve(c.out_dir, cfg.output.report_json_path));

    const auto& r = out.result;
    std::printf("converged=%s steps=%d final_residual_0=%.17g gamma=%.17g\n", r.converged ? "true" : "false",
                r.steps, sobolev_norm(r.final_residual, 0.0), out.gamma);
    for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
    if (const Check* f = out.failed_check()) {
        std::fprintf(stderr, "invariant failed: %s\n", check_line(*f).c_str());
        return 1;
    }
    return 0;
}

int cmd_verify_distal(const Common& c) {
    const RunConfig cfg = parse_config(load_with_overrides(c));
    const DiagonalOperator D = build_potential(cfg.potential, cfg.box, cfg.norm_policy);
    const int K = cfg.distal_max_offset;

    std::vector<double> taus = {cfg.params.tau, 1.0, std::log2(3.0), 2.0, 3.0};
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    std::printf("potential=%s max_offset=%d\n", to_string(cfg.potential.kind).c_str(), K);
    std::printf("%-24s %-24s %s\n", "tau", "gamma_best", "worst_offset");
    for (double tau : taus) {
        const DistalReport rep = distal_margin(D.diag, tau, 1.0, K);
        std::string off;
        for (int v : rep.worst_offset) off += (off.empty() ? "" : ",") + std::to_string(v);
        std::printf("%-24.17g %-24.17g (%s)\n", tau, rep.best_gamma, off.c_str());
    }

    const bool quasi = cfg.potential.kind == PotentialKind::Maryland || cfg.potential.kind == PotentialKind::Sarnak ||
                       cfg.potential.kind == PotentialKind::CraigMod1;
    if (quasi) {
        const DiophantineReport dr = check_diophantine(cfg.potential.omega, cfg.params.tau, K);
        std::printf("diophantine tau=%.17g gamma_best=%.17g\n", cfg.params.tau, dr.gamma_best);
    }

    if (!cfg.gamma_measured) {
        const DistalReport rep = distal_margin(D.diag, cfg.params.tau, cfg.params.gamma, K);
        std::printf("configured tau=%.17g gamma=%.17g margin=%.17g\n", cfg.params.tau, cfg.params.gamma,
                    rep.empirical_margin);
        if (!rep.pass()) {
            std::fprintf(stderr, "invariant failed: distal_margin (margin %.17g)\n", rep.empirical_margin);
            return 1;
        }
    }
    return 0;
}

int cmd_check_theory(const Common& c, bool strict) {
    const RunConfig cfg = parse_config(load_with_overrides(c));
    const TheoryReport rep = theory_for_config(cfg);
    std::printf("C0=%.17g\n", rep.C0);
    for (const auto& cond : rep.conditions)
        std::printf("%-5s %-28s %s=%.17g%s  %s\n", cond.holds ? "ok" : "FAIL", cond.name.c_str(),
                    cond.log10_margin ? "log10_margin" : "margin", cond.margin,
                    cond.non_effective ? " (C=1)" : "", cond.expression.c_str());
    std::printf("Theta requirement: log10 >= %.17g, binding %s\n", rep.theta.log10_required,
                rep.theta.binding.c_str());
    if (strict && !rep.all_hold()) {
        for (const auto& cond : rep.conditions)
            if (!cond.holds) {
                std::fprintf(stderr, "invariant failed: %s\n", cond.name.c_str());
                break;
            }
        return 1;
    }
    return 0;
}

struct CellResult {
    std::vector<json> values;
    bool ok = false;
    bool converged = false;
    int steps = 0;
    double final_residual = NAN;
    double max_interior_residual = NAN;
    std::string failure;
};

CellResult run_cell(const json& base, const std::vector<SweepAxis>& axes, const std::vector<json>& values,
                    const std::string& dir) {
    CellResult cr;
    cr.values = values;
    try {
        json j = base;
        for (std::size_t a = 0; a < axes.size(); ++a) apply_override(j, axes[a].key, values[a]);
        const RunConfig cfg = parse_config(j);
        fs::create_directories(dir);
        const RunOutcome out = execute_run(cfg);
        write_outputs(out, (fs::path(dir) / "ledger.csv").string(), (fs::path(dir) / "report.json").string());
        cr.converged = out.result.converged;
        cr.steps = out.result.steps;
        cr.final_residual = sobolev_norm(out.result.final_residual, 0.0);
        cr.max_interior_residual = out.eigen.max_interior_residual;
        if (const Check* f = out.failed_check())
            cr.failure = f->name;
        else
            cr.ok = true;
    } catch (const ConfigError& e) {
        cr.failure = std::string("config: ") + e.what();
    } catch (const Error& e) {
        cr.failure = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return cr;
}

std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string json_field(const json& v) {
    if (v.is_number_float()) return format_g17(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

int cmd_sweep(const Common& c) {
    const json base = load_config_json(c.config_path);
    std::vector<SweepAxis> axes;
    for (const auto& o : c.overrides) axes.push_back(parse_sweep_override(o));
    // Validate the first cell up front so malformed input maps to a config error.
    {
        json j = base;
        for (const auto& a : axes) apply_override(j, a.key, a.values.front());
        parse_config(j);
    }

    std::vector<std::vector<json>> cells(1);
    for (const auto& a : axes) {
        std::vector<std::vector<json>> next;
        for (const auto& prefix : cells)
            for (const auto& v : a.values) {
                auto row = prefix;
                row.push_back(v);
                next.push_back(std::move(row));
            }
        cells = std::move(next);
    }

    fs::create_directories(c.out_dir);
    std::vector<std::future<CellResult>> futures;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "cell_%03zu", i);
        const std::string dir = (fs::path(c.out_dir) / name).string();
        futures.push_back(std::async(std::launch::async, run_cell, std::cref(base), std::cref(axes), cells[i], dir));
    }

    std::string csv = "cell";
    for (const auto& a : axes) csv += "," + csv_field(a.key);
    csv += ",converged,steps,final_residual_0,max_interior_residual,passed,failure\n";
    int failed = 0;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const CellResult cr = futures[i].get();
        csv += std::to_string(i);
        for (const auto& v : cr.values) csv += "," + csv_field(json_field(v));
        csv += std::string(",") + (cr.converged ? "true" : "false") + "," + std::to_string(cr.steps) + "," +
               format_g17(cr.final_residual) + "," + format_g17(cr.max_interior_residual) + "," +
               (cr.ok ? "true" : "false") + "," + csv_field(cr.failure) + "\n";
        if (!cr.ok) {
            ++failed;
            std::fprintf(stderr, "cell %zu failed: %s\n", i, cr.failure.c_str());
        }
    }
    write_atomic((fs::path(c.out_dir) / "sweep.csv").string(), csv);
    std::printf("cells=%zu failed=%d\n", cells.size(), failed);
    return failed == 0 ? 0 : 1;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON configuration file")->required();
    sub->add_option("--override", c.overrides, "key=value, dotted keys; repeatable");
    sub->add_option("--out-dir", c.out_dir, "Directory for ledger, report and checkpoints");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative conjugation and localization certificates for lattice operators"};
    app.require_subcommand(1);
    Common c;
    bool strict = false;
    auto* run = app.add_subcommand("run", "Run the iteration and localization post-processing");
    auto* distal = app.add_subcommand("verify-distal", "Measure the distal (tau, gamma) frontier of the potential");
    auto* theory = app.add_subcommand("check-theory", "Evaluate the convergence inequalities");
    auto* sweep = app.add_subcommand("sweep", "Cartesian sweep; --override key=v1,v2,... defines an axis");
    for (auto* s : {run, distal, theory, sweep}) add_common(s, c);
    theory->add_flag("--strict", strict, "Exit 1 when any inequality fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(c);
        if (*distal) return cmd_verify_distal(c);
        if (*theory) return cmd_check_theory(c, strict);
        return cmd_sweep(c);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "invariant failed: %s: %s\n", to_string(e.kind()), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
