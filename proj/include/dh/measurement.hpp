#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "dh/gates.hpp"
#include "dh/ontic.hpp"

namespace dh {

using OutcomeDistribution = std::map<std::string, double>;

// A measurement on a region, stored as one Pauli coefficient table per
// outcome: element(m) = sum_j alpha[m][j] * (letter assignment j over the
// region), where assignment code j has the region's first qubit as its most
// significant base-4 digit. Tables are real because POVM elements are
// Hermitian. Construction validates completeness (sum of elements = identity
// within 1e-10) and positive semi-definiteness (eigenvalues >= -1e-10),
// densely, which bounds the region size.
struct MeasurementSpec {
    Region region;
    std::vector<std::string> outcomes;
    std::vector<std::vector<double>> alpha;  // [outcome][4^k]

    // Binary measurement of a +/-1-involution observable: elements (1 +/- A)/2,
    // outcomes "+" and "-".
    static MeasurementSpec from_observable(Region region, const Eigen::MatrixXcd& a);
    // Arbitrary POVM from explicit element matrices.
    static MeasurementSpec from_matrices(Region region, std::vector<std::string> outcomes,
                                         const std::vector<Eigen::MatrixXcd>& elements);
    // Single-qubit X/Y/Z basis measurement.
    static MeasurementSpec preset(std::size_t qubit, Letter basis);

    std::size_t outcome_index(const std::string& label) const;
};

// Pauli coefficient table of a Hermitian operator on k qubits:
// alpha[j] = tr(P_j * op) / 2^k. Throws beyond the dense limit.
std::vector<double> decompose_povm(const Eigen::MatrixXcd& op, std::size_t k,
                                   std::size_t dense_limit = 4);
Eigen::MatrixXcd reconstruct_povm(const std::vector<double>& alpha, std::size_t k);

// Substitute the state's descriptor elements into the outcome's table.
// On a fresh universe this reproduces the padded POVM element itself.
PauliSum build_observable(const MeasurementSpec& spec, std::size_t outcome,
                          const OnticState& state);

// xi = <ref| O[lambda] |ref>, clamped to [0,1]; values outside by more than
// 1e-9 are hard numerical errors.
double indicator(const MeasurementSpec& spec, std::size_t outcome, const OnticState& state);

// Expectation of the operator product O_A[lambda] * O_B[lambda]; regions must
// be disjoint. This is NOT the product of the two indicators in general.
double joint_indicator(const MeasurementSpec& a, std::size_t outcome_a,
                       const MeasurementSpec& b, std::size_t outcome_b,
                       const OnticState& state);

// All outcomes of one spec on a single ontic state / an epistemic state.
OutcomeDistribution measure(const MeasurementSpec& spec, const OnticState& state);
OutcomeDistribution measure(const MeasurementSpec& spec, const EpistemicState& state);

// Joint distribution over outcome pairs, labeled "a,b".
OutcomeDistribution joint_distribution(const MeasurementSpec& a, const MeasurementSpec& b,
                                       const OnticState& state);
OutcomeDistribution joint_distribution(const MeasurementSpec& a, const MeasurementSpec& b,
                                       const EpistemicState& state);

// Full chain: prepare -> transform -> weighted indicators per outcome.
OutcomeDistribution probability_pipeline(const EpistemicState& prep,
                                         const TransformationContext& ctx,
                                         const MeasurementSpec& spec);

// Bayesian update of branch weights given an observed outcome.
EpistemicState condition_on_outcome(const EpistemicState& e, const MeasurementSpec& spec,
                                    std::size_t outcome);

}  // namespace dh
