#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tropf/io/case_file.hpp"
#include "tropf/io/plots.hpp"
#include "tropf/io/results.hpp"
#include "tropf/lp/lp_dump.hpp"
#include "tropf/orchestrator.hpp"

namespace tropf::io {

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

namespace detail {

struct CliArgs {
    std::string case_path;
    std::string out;
    double k = 3.0;
    int k_max = 3;
    std::string mode = "full";
    bool binary_attack = false;
    bool hard_limits = false;
    int stage = 1;
};

inline ScenarioConfig config_from(const CliArgs& a) {
    ScenarioConfig cfg;
    cfg.k = a.k;
    cfg.mode = a.mode == "rolling" ? HorizonMode::rolling : HorizonMode::full_horizon;
    cfg.binary_attack = a.binary_attack;
    cfg.hard_limits = a.hard_limits;
    return cfg;
}

inline void print_stage_lines(const NetworkCase& c, const ScenarioResult& r, std::ostream& out) {
    auto line = [&](int stage, const SystemState& s, const char* what, double value) {
        const ViolationReport v = constraint_margins(c, s);
        out << "stage" << stage << ' ' << what << ' ' << format_value(value) << "; worst line margin "
            << format_value(c.num_lines() ? v.worst_line_margin : 0.0) << "; worst node margin "
            << format_value(v.worst_node_margin) << '\n';
    };
    if (r.dispatch) line(1, r.dispatch->state, "cost", r.dispatch->total_cost);
    if (r.attack) line(2, r.attack->state, "objective", r.attack->objective_value);
    if (r.mitigation) line(3, r.mitigation->state, "objective", r.mitigation->objective_value);
}

inline int emit(const NetworkCase& c, const ScenarioResult& r, const std::filesystem::path& dir, std::ostream& out,
                std::ostream& err) {
    write_results(c, r, dir);
    write_plots(c, r, dir);
    print_stage_lines(c, r, out);
    if (!r.complete()) {
        err << r.failure << '\n';
        return exit_failure;
    }
    return exit_ok;
}

inline int dump_stage_lp(const NetworkCase& c, const CliArgs& a, std::ostream& err) {
    const ScenarioConfig cfg = config_from(a);
    lp::LinearProgram lp;
    if (a.stage == 1) {
        lp = build_base_opf(c).lp;
    } else {
        const auto x = solve_base_opf(c);
        const AttackOptions attack_opt{cfg.binary_attack, cfg.weights};
        if (a.stage == 2) {
            lp = build_attack_model(c, x, cfg.k, attack_opt).lp;
        } else {
            const auto attack = assess_worst_attack(c, x, cfg.k, attack_opt, cfg.milp);
            lp = build_mitigation_model(c, x, attack, {cfg.hard_limits, cfg.weights}).lp;
        }
    }
    std::ofstream file(a.out, std::ios::binary);
    if (!file) {
        err << "cannot write '" << a.out << "'\n";
        return exit_failure;
    }
    lp::dump_lp(lp, file);
    return exit_ok;
}

}  // namespace detail

/// Command-line entry point. Returns 0 on success, 1 when a case is invalid or
/// a stage has no solution, 2 for usage errors.
inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-stage attack and storage-response analysis for radial distribution feeders", "tropf"};
    app.require_subcommand(1);
    detail::CliArgs a;

    auto add_case = [&](CLI::App* sub) {
        sub->add_option("case", a.case_path, "case file (JSON)")->required();
    };
    auto add_scenario_flags = [&](CLI::App* sub) {
        sub->add_flag("--binary-attack", a.binary_attack, "restrict attack fractions to 0 or 1");
        sub->add_flag("--hard-limits", a.hard_limits, "require storage to restore every limit");
        sub->add_option("--mode", a.mode, "horizon treatment")
            ->check(CLI::IsMember({"full", "rolling"}))
            ->capture_default_str();
    };

    auto* validate = app.add_subcommand("validate", "check a case file and report every problem");
    add_case(validate);

    auto* run = app.add_subcommand("run", "solve all three stages and write results");
    add_case(run);
    run->add_option("--k", a.k, "attack budget per hour")->check(CLI::NonNegativeNumber)->capture_default_str();
    add_scenario_flags(run);
    run->add_option("--out", a.out, "output directory")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "run k = 0..K, one output subdirectory per k");
    add_case(sweep_cmd);
    sweep_cmd->add_option("--k-max", a.k_max, "largest attack budget")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    add_scenario_flags(sweep_cmd);
    sweep_cmd->add_option("--out", a.out, "output directory")->required();

    auto* dump = app.add_subcommand("dump-lp", "write one stage's optimization model as text");
    add_case(dump);
    dump->add_option("--stage", a.stage, "stage number")->check(CLI::Range(1, 3))->capture_default_str();
    dump->add_option("--k", a.k, "attack budget for stages 2 and 3")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    dump->add_flag("--binary-attack", a.binary_attack, "restrict attack fractions to 0 or 1");
    dump->add_flag("--hard-limits", a.hard_limits, "hard limit form of the stage 3 model");
    dump->add_option("--out", a.out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        NetworkCase c = parse_case(read_text(a.case_path));
        if (validate->parsed()) {
            const auto problems = check_case(c);
            if (!problems.empty()) {
                err << ValidationError(problems).what() << '\n';
                return exit_failure;
            }
            out << "valid: " << c.num_nodes() << " nodes, " << c.num_lines() << " lines, " << c.generators.size()
                << " generators, " << c.storage.size() << " storage units, " << c.horizon_hours << " hours\n";
            return exit_ok;
        }
        validate_case(c);
        if (run->parsed()) return detail::emit(c, run_scenario(c, detail::config_from(a)), a.out, out, err);
        if (sweep_cmd->parsed()) {
            const auto results = sweep(c, detail::config_from(a), a.k_max);
            int code = exit_ok;
            for (std::size_t k = 0; k < results.size(); ++k) {
                out << "k = " << k << '\n';
                const auto dir = std::filesystem::path(a.out) / ("k" + std::to_string(k));
                code = std::max(code, detail::emit(c, results[k], dir, out, err));
            }
            return code;
        }
        return detail::dump_stage_lp(c, a, err);
    } catch (const CaseFileError& e) {
        err << a.case_path << ": " << e.what() << '\n';
    } catch (const ValidationError& e) {
        err << e.what() << '\n';
    } catch (const StageInfeasible& e) {
        err << e.what() << '\n';
    } catch (const ResultsError& e) {
        err << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return exit_failure;
}

}  // namespace tropf::io
