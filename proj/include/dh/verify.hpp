#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dh/gates.hpp"
#include "dh/ontic.hpp"

namespace dh {

struct VerifyConfig {
    std::size_t max_qubits = 5;  // must not exceed the dense limit
    std::size_t depth = 20;      // maximum circuit depth per trial
    std::size_t trials = 200;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
    std::string witness_dir = ".";  // the minimized failing scenario is written here
    // Deliberately corrupt trial 0's evolved state (sign flip on one
    // descriptor element) to exercise the failure/witness path.
    bool negative_control = false;
};

struct VerifyResult {
    bool passed = true;
    bool vacuous = false;  // trials == 0: nothing was checked
    std::size_t trials_run = 0;
    std::vector<std::string> failures;  // one line per failed aspect
    std::string witness_path;           // file written for the first failure, if any
    double max_descriptor_deviation = 0.0;
    double max_closure_deviation = 0.0;
    double max_probability_deviation = 0.0;
};

// Max coefficient gap between each descriptor element of `state` and the
// dense conjugation of the corresponding fresh element through `history`
// (preparations included as 2x2 general gates).
double compare_state_to_oracle(const OnticState& state, const std::vector<GateOp>& history);

// Randomized self-check over random preparations and circuits (Clifford + T
// + rotations): descriptor-vs-dense equivalence, algebraic closure
// x*y = i*z (cyclically), separability round-trips, pipeline-vs-Born
// probabilities for random POVMs, and dynamical-locality mini-trials. The
// first failure is minimized by greedy gate removal and dumped as a runnable
// scenario file in witness_dir.
VerifyResult run_verify_suite(const VerifyConfig& config);

}  // namespace dh
