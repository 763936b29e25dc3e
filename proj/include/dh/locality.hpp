#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dh/measurement.hpp"
#include "dh/rng.hpp"

namespace dh {

// The six locality properties this lab can test. S and DL are exact
// (structural equality of descriptors); the statistical four compare
// probabilities within a tolerance.
enum class LocalityProperty { S, SL, DL, PI, F, LC };

std::string property_name(LocalityProperty p);

struct LocalityWitness {
    std::string description;  // the concrete inputs exhibiting the failure
    double gap = 0.0;
    std::uint64_t seed = 0;   // seed reproducing it (randomized checks only)
    long long trial = -1;     // trial index (randomized checks only)
};

struct LocalityReport {
    LocalityProperty property{};
    bool holds = true;
    std::size_t trials = 0;   // cases examined (trial count or grid size)
    double tolerance = 0.0;   // 0 for the exact checks
    double max_gap = 0.0;     // largest deviation observed across all cases
    std::optional<LocalityWitness> witness;  // present iff !holds
};

// ----- raw-table cores ------------------------------------------------------
// The statistical checks reduce to scans over a grid of joint outcome tables,
// one per setting pair: grid[ia][ib](i, j) = p(a_i, b_j) under settings
// (A_ia, B_ib). Exposing the cores lets tests feed hand-corrupted tables as
// negative controls.
using SettingGrid = std::vector<std::vector<Eigen::MatrixXd>>;

// Shared core of SL and PI: the a-marginal p(a|A) must not vary with B, and
// the b-marginal p(b|B) must not vary with A. `property` labels the report.
LocalityReport marginal_independence_from_tables(LocalityProperty property,
                                                 const SettingGrid& grid, double tol);

// Core of LC: every conditional p(a|b, A, B) = p(a,b)/p(b) with p(b) >= 1e-12
// must agree with the marginal p(a|A) (taken at the first B setting), and
// symmetrically for b given a.
LocalityReport local_causality_from_tables(const SettingGrid& grid, double tol);

// ----- state-based checks ---------------------------------------------------

// Holds iff composing the restrictions to the partition's parts reproduces
// the state exactly. The partition must cover all qubits disjointly.
LocalityReport check_separability(const OnticState& state, const std::vector<Region>& partition);

// Random circuit supported inside `region`: one- and two-qubit gates from the
// full gate set (Cliffords, T, rotations with random angles).
std::vector<GateOp> random_region_circuit(const Region& region, std::size_t depth, Rng& rng);

// Holds iff region-B descriptors after (U_A, U_B) are bit-identical to those
// after (U_A', U_B) for random local circuits, and symmetrically for A.
// Failures carry the reproducing trial index and seed.
LocalityReport check_dynamical_locality(const OnticState& base, const Region& region_a,
                                        const Region& region_b, std::size_t trials,
                                        std::uint64_t seed);

// Holds iff observed marginals on one side are independent of the other
// side's setting choice, at the level of the full epistemic state. Every
// a-setting's region must be disjoint from every b-setting's region.
LocalityReport check_signal_locality(const EpistemicState& prep,
                                     const std::vector<MeasurementSpec>& settings_a,
                                     const std::vector<MeasurementSpec>& settings_b,
                                     double tol = 1e-9);

// Same scan conditioned on one known ontic state: marginals of the joint
// indicator must be independent of the far setting.
LocalityReport check_parameter_independence(const OnticState& state,
                                            const std::vector<MeasurementSpec>& settings_a,
                                            const std::vector<MeasurementSpec>& settings_b,
                                            double tol = 1e-9);

// Gap = max over outcome pairs of |joint indicator - product of single-region
// indicators| at one ontic state; fails iff the gap exceeds tol. Entangled
// states are expected to fail this one.
LocalityReport check_factorization(const OnticState& state, const MeasurementSpec& a,
                                   const MeasurementSpec& b, double tol = 1e-9);
LocalityReport check_factorization(const OnticState& state,
                                   const std::vector<MeasurementSpec>& settings_a,
                                   const std::vector<MeasurementSpec>& settings_b,
                                   double tol = 1e-9);

// Outcome-conditioned probabilities at one ontic state must be independent of
// the far outcome and setting. Fails on entangled states (that is the
// Bell-theorem content; DL and PI still hold there).
LocalityReport check_local_causality(const OnticState& state,
                                     const std::vector<MeasurementSpec>& settings_a,
                                     const std::vector<MeasurementSpec>& settings_b,
                                     double tol = 1e-9);

// ----- CHSH -----------------------------------------------------------------

// Standard Tsirelson-optimal settings: first party measures {Z, X}, second
// party {(Z+X)/sqrt2, (Z-X)/sqrt2}. Outcomes are "+" (index 0) and "-".
std::array<MeasurementSpec, 2> chsh_first_party_settings(std::size_t qubit);
std::array<MeasurementSpec, 2> chsh_second_party_settings(std::size_t qubit);

struct ChshResult {
    std::array<std::array<double, 2>, 2> correlators{};  // E[i][j] for (A_i, B_j)
    double s = 0.0;                                      // E00 + E01 + E10 - E11
};

// Correlators from exact joint distributions; every spec must be two-outcome
// with outcome 0 counted as +1 and outcome 1 as -1.
ChshResult chsh_experiment(const EpistemicState& state, const std::array<MeasurementSpec, 2>& a,
                           const std::array<MeasurementSpec, 2>& b);

// ----- information-flow tracer ----------------------------------------------

struct ElementRef {
    std::size_t qubit;
    char element;  // 'x', 'y', or 'z'
    auto operator<=>(const ElementRef&) const = default;
};

// A circuit parameter to vary: every probe value is substituted for the angle
// of each rotation gate whose param field names this parameter.
struct TraceProbe {
    std::string parameter;
    std::vector<double> values;  // at least two
};

struct ParameterTrace {
    std::string parameter;
    // Descriptor elements whose PauliSum coefficients differ beyond tol
    // across probe values.
    std::set<ElementRef> descriptor_elements;
    // Qubits whose single-qubit X/Y/Z statistics change beyond tol.
    std::set<std::size_t> local_statistics;
    // Qubit pairs whose joint two-qubit statistics change beyond tol.
    std::set<std::pair<std::size_t, std::size_t>> joint_statistics;
    // Present in the ontic state, invisible to every single-qubit statistic.
    bool locally_inaccessible = false;
};

struct DependencyMap {
    std::vector<ParameterTrace> parameters;
    double tolerance = 0.0;
};

// Re-runs the circuit at each probe value and diffs descriptor coefficients,
// per-qubit statistics, and per-pair joint statistics against the first
// value, all beyond tol. Guarantee: local_statistics only ever names qubits that also appear
// in descriptor_elements (statistics live in the descriptors).
DependencyMap trace_information_flow(const EpistemicState& prep, const std::vector<GateOp>& circuit,
                                     const std::vector<TraceProbe>& probes, double tol = 1e-9);

}  // namespace dh
