#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dh/locality.hpp"

namespace dh {

// One preparation step: either a named pure state on one qubit, or a
// stochastic mixture of gate lists applied to the state built so far.
struct PrepDirective {
    bool is_mixture = false;
    std::size_t qubit = 0;     // pure only
    std::string state;         // pure only: z+, z-, x+, x-, y+, y-
    TransformationContext mixture;  // mixture only
};

// A measurement to run and report. Exactly one flavor per def:
//   Preset      single-qubit X/Y/Z basis measurement;
//   Observable  binary +/- measurement of a real combination of Pauli
//               strings over `qubits` (must square to the identity);
//   Tables      arbitrary POVM given as one Pauli coefficient table per
//               outcome (the native MeasurementSpec encoding);
//   Joint       a pair of defs measured jointly on disjoint regions.
struct MeasurementDef {
    enum class Kind { Preset, Observable, Tables, Joint };

    std::string name;
    Kind kind = Kind::Preset;
    Letter preset = Letter::Z;
    std::vector<std::size_t> qubits;
    struct Term {
        double coeff = 0.0;
        std::string letters;  // one of I/X/Y/Z per qubit, first qubit leftmost
    };
    std::vector<Term> terms;                // Observable
    std::vector<std::string> outcomes;      // Tables
    std::vector<std::vector<double>> alpha;  // Tables: [outcome][4^k]
    std::vector<MeasurementDef> parts;      // Joint: exactly two
};

// An alternative preparation+circuit sharing the scenario's measurements and
// checks; used by the contextuality scenarios to compare ontic states that
// carry identical statistics.
struct VariantDef {
    std::string name;
    std::vector<PrepDirective> preparation;
    std::vector<GateOp> circuit;
};

struct ChshSpec {
    std::size_t first = 0;   // qubit measured in {Z, X}
    std::size_t second = 1;  // qubit measured in {(Z+X)/sqrt2, (Z-X)/sqrt2}
};

// Compare the output qubit's X/Y/Z statistics after the full circuit with
// the input qubit's statistics after only the first `prefix` gates.
struct TransferSpec {
    std::size_t input = 0;
    std::size_t output = 0;
    std::size_t prefix = 0;
};

struct Scenario {
    std::string name;
    std::string description;
    std::size_t n_qubits = 1;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;
    bool oracle_check = true;
    std::size_t dl_trials = 100;
    bool report_state = false;

    std::vector<PrepDirective> preparation;
    std::vector<GateOp> circuit;
    std::vector<MeasurementDef> measurements;

    // Check names: subset of {S, SL, DL, PI, F, LC, trace}.
    std::vector<std::string> checks;
    std::optional<Region> region_a, region_b;        // statistical checks
    std::optional<Region> dl_region_a, dl_region_b;  // default: region_a/b
    std::vector<MeasurementDef> settings_a, settings_b;  // default: Z and X on the region's first qubit
    std::optional<std::vector<Region>> partition;        // for S; default: one part per qubit

    std::optional<ChshSpec> chsh;
    std::optional<TransferSpec> transfer;
    std::vector<TraceProbe> trace_probes;

    std::vector<VariantDef> variants;     // when non-empty, replaces the top-level prep/circuit
    std::optional<Region> probe_region;   // qubits compared across variants
};

// Schema-checked (de)serialization; violations throw UsageError.
nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

// Built-in registry.
const std::vector<Scenario>& builtin_scenarios();
const Scenario* find_builtin(const std::string& name);

// Execute preparation -> transformation -> measurement, run the requested
// checks, optionally cross-check against the dense engine, and return the
// structured report. Deterministic for a fixed scenario+seed except for the
// "stats" block (timings).
nlohmann::json run_scenario(const Scenario& sc);

// Flat human-readable summary of a report.
std::string render_table(const nlohmann::json& report);

// Report fragment for one locality check.
nlohmann::json locality_report_to_json(const LocalityReport& r);

}  // namespace dh
