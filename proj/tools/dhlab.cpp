#include <cstddef>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dh/errors.hpp"
#include "dh/scenario.hpp"
#include "dh/verify.hpp"

namespace {

int do_run(const std::string& target, const std::string& output, const std::string& format,
           double tolerance, bool no_oracle, bool report_state) {
    dh::Scenario sc;
    if (const dh::Scenario* builtin = dh::find_builtin(target))
        sc = *builtin;
    else
        sc = dh::load_scenario_file(target);
    if (tolerance > 0.0) sc.tolerance = tolerance;
    if (no_oracle) sc.oracle_check = false;
    if (report_state) sc.report_state = true;

    const nlohmann::json report = dh::run_scenario(sc);
    if (!output.empty()) {
        std::ofstream f(output);
        if (!f) throw dh::UsageError("cannot write report file '" + output + "'");
        f << report.dump(2) << '\n';
    }
    if (format == "table")
        std::cout << dh::render_table(report);
    else
        std::cout << report.dump(2) << '\n';
    return 0;
}

int do_list(bool as_json) {
    const auto& all = dh::builtin_scenarios();
    if (as_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& sc : all)
            j.push_back({{"name", sc.name},
                         {"description", sc.description},
                         {"n_qubits", sc.n_qubits},
                         {"checks", sc.checks}});
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::size_t width = 0;
    for (const auto& sc : all) width = std::max(width, sc.name.size());
    for (const auto& sc : all)
        std::cout << sc.name << std::string(width - sc.name.size() + 2, ' ') << sc.description
                  << '\n';
    return 0;
}

int do_verify(const dh::VerifyConfig& cfg) {
    const dh::VerifyResult res = dh::run_verify_suite(cfg);
    if (res.vacuous) {
        std::cout << "warning: 0 trials requested; nothing was verified (vacuous pass)\n";
        return 0;
    }
    std::cout << "trials run:                 " << res.trials_run << '\n'
              << "max descriptor deviation:   " << res.max_descriptor_deviation << '\n'
              << "max closure deviation:      " << res.max_closure_deviation << '\n'
              << "max probability deviation:  " << res.max_probability_deviation << '\n';
    if (res.passed) {
        std::cout << "verify: PASS\n";
        return 0;
    }
    constexpr std::size_t kMaxShown = 20;
    for (std::size_t i = 0; i < res.failures.size() && i < kMaxShown; ++i)
        std::cout << "FAIL " << res.failures[i] << '\n';
    if (res.failures.size() > kMaxShown)
        std::cout << "... " << (res.failures.size() - kMaxShown) << " more failure(s)\n";
    if (!res.witness_path.empty())
        std::cout << "minimized witness scenario: " << res.witness_path << '\n';
    std::cout << "verify: FAIL\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heisenberg-picture qubit lab: per-qubit operator descriptors, "
                 "measurement pipeline, and locality checks"};
    app.require_subcommand(1);

    std::string target, output;
    std::string format = "records";
    double tolerance = -1.0;
    bool no_oracle = false, report_state = false;
    CLI::App* run = app.add_subcommand("run", "Run a built-in scenario or a scenario JSON file");
    run->add_option("scenario", target, "Built-in name or path to a scenario JSON file")
        ->required();
    run->add_option("-o,--output", output, "Also write the JSON report to this file");
    run->add_option("--format", format, "Report style: records (JSON) or table")
        ->check(CLI::IsMember({"records", "table"}));
    run->add_option("--tolerance", tolerance, "Override the scenario's check tolerance")
        ->check(CLI::PositiveNumber);
    run->add_flag("--no-oracle", no_oracle, "Skip the dense cross-check");
    run->add_flag("--report-state", report_state, "Include final descriptors in the report");

    bool as_json = false;
    CLI::App* list = app.add_subcommand("list-scenarios", "List built-in scenarios");
    list->add_flag("--json", as_json, "Machine-readable listing");

    dh::VerifyConfig cfg;
    CLI::App* verify =
        app.add_subcommand("verify", "Randomized self-check against the dense engine");
    verify->add_option("--max-qubits", cfg.max_qubits, "Largest universe to draw (default 5)");
    verify->add_option("--depth", cfg.depth, "Largest circuit depth to draw (default 20)");
    verify->add_option("--trials", cfg.trials, "Number of random trials (default 200)");
    verify->add_option("--seed", cfg.seed, "Root seed (default 42)");
    verify->add_option("--tolerance", cfg.tolerance, "Comparison tolerance (default 1e-9)");
    verify->add_option("--witness-dir", cfg.witness_dir,
                       "Directory for the minimized witness scenario (default .)");
    verify->add_flag("--negative-control", cfg.negative_control,
                     "Corrupt trial 0 on purpose to exercise the failure path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return do_run(target, output, format, tolerance, no_oracle, report_state);
        if (list->parsed()) return do_list(as_json);
        if (verify->parsed()) return do_verify(cfg);
        throw dh::InternalError("no subcommand dispatched");
    } catch (const dh::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const dh::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
