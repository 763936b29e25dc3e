#include "dh/measurement.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "dh/dynamics.hpp"
#include "dh/errors.hpp"

namespace dh {

namespace {

constexpr double kClampTol = 1e-9;
constexpr double kCompletenessTol = 1e-10;
constexpr double kPsdTol = 1e-10;

// Letters of assignment code over k region slots, slot 0 = most significant
// base-4 digit.
std::vector<Letter> code_letters(std::size_t code, std::size_t k) {
    std::vector<Letter> letters(k);
    for (std::size_t s = 0; s < k; ++s)
        letters[k - 1 - s] = static_cast<Letter>((code >> (2 * s)) & 3);
    return letters;
}

Eigen::MatrixXcd letters_matrix(const std::vector<Letter>& letters) {
    // Fold back-to-front: the factor kron'd last lands on the high bits, so
    // slot 0 must be added last to become the most significant.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const Letter l = *it;
        const Eigen::Matrix2cd f = pauli_letter_matrix(l);
        Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
        next.topLeftCorner(m.rows(), m.cols()) = f(0, 0) * m;
        next.topRightCorner(m.rows(), m.cols()) = f(0, 1) * m;
        next.bottomLeftCorner(m.rows(), m.cols()) = f(1, 0) * m;
        next.bottomRightCorner(m.rows(), m.cols()) = f(1, 1) * m;
        m.swap(next);
    }
    return m;
}

void validate_spec(const MeasurementSpec& spec) {
    if (spec.region.size() == 0) throw UsageError("measurement region is empty");
    if (spec.outcomes.empty()) throw UsageError("measurement has no outcomes");
    if (spec.outcomes.size() != spec.alpha.size())
        throw UsageError("measurement outcome/table count mismatch");
    const std::size_t k = spec.region.size();
    const std::size_t want = 1ull << (2 * k);
    for (const auto& table : spec.alpha)
        if (table.size() != want)
            throw UsageError("measurement coefficient table has wrong length");

    // Completeness and positivity, checked densely on the region.
    const std::size_t dim = 1ull << k;
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& table : spec.alpha) {
        const Eigen::MatrixXcd elem = reconstruct_povm(table, k);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(elem);
        if (solver.eigenvalues().minCoeff() < -kPsdTol)
            throw UsageError("POVM element is not positive semi-definite");
        total += elem;
    }
    const double dev =
        (total - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (dev > kCompletenessTol)
        throw UsageError("POVM elements do not sum to the identity (max deviation " +
                         std::to_string(dev) + ")");
}

double branch_indicator_sum(const EpistemicState& e,
                            const std::function<double(const OnticState&)>& f) {
    double acc = 0;
    for (const auto& b : e.branches()) acc += b.weight * f(b.state);
    return acc;
}

double clamp_probability(double p, const std::string& what) {
    if (p < -kClampTol || p > 1.0 + kClampTol)
        throw NumericError(what + " = " + std::to_string(p) + " lies outside [0,1] beyond 1e-9");
    return std::clamp(p, 0.0, 1.0);
}

void check_normalized(const OutcomeDistribution& dist, const std::string& what) {
    double total = 0;
    for (const auto& [label, p] : dist) total += p;
    if (std::abs(total - 1.0) > kClampTol)
        throw NumericError(what + " sums to " + std::to_string(total) + ", expected 1");
}

}  // namespace

std::vector<double> decompose_povm(const Eigen::MatrixXcd& op, std::size_t k,
                                   std::size_t dense_limit) {
    if (k == 0) throw UsageError("decompose_povm: empty region");
    if (k > dense_limit)
        throw UsageError("decompose_povm: region of " + std::to_string(k) +
                         " qubits exceeds the dense limit of " + std::to_string(dense_limit));
    const std::size_t dim = 1ull << k;
    if (static_cast<std::size_t>(op.rows()) != dim || static_cast<std::size_t>(op.cols()) != dim)
        throw UsageError("decompose_povm: matrix dimension does not match region size");
    if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw UsageError("decompose_povm: operator is not Hermitian");
    std::vector<double> alpha(1ull << (2 * k));
    for (std::size_t code = 0; code < alpha.size(); ++code) {
        const cplx c = (letters_matrix(code_letters(code, k)) * op).trace() /
                       static_cast<double>(dim);
        alpha[code] = std::abs(c) < kPruneTol ? 0.0 : c.real();
    }
    return alpha;
}

Eigen::MatrixXcd reconstruct_povm(const std::vector<double>& alpha, std::size_t k) {
    const std::size_t dim = 1ull << k;
    if (alpha.size() != 1ull << (2 * k))
        throw UsageError("reconstruct_povm: table length does not match region size");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t code = 0; code < alpha.size(); ++code)
        if (alpha[code] != 0.0) m += alpha[code] * letters_matrix(code_letters(code, k));
    return m;
}

MeasurementSpec MeasurementSpec::from_observable(Region region, const Eigen::MatrixXcd& a) {
    const std::size_t k = region.size();
    const std::size_t dim = 1ull << k;
    if (static_cast<std::size_t>(a.rows()) != dim)
        throw UsageError("from_observable: matrix dimension does not match region size");
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw UsageError("from_observable: observable is not Hermitian");
    if (((a * a) - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10)
        throw UsageError("from_observable: observable must square to the identity");
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    MeasurementSpec spec;
    spec.region = std::move(region);
    spec.outcomes = {"+", "-"};
    spec.alpha = {decompose_povm((id + a) / 2.0, k), decompose_povm((id - a) / 2.0, k)};
    validate_spec(spec);
    return spec;
}

MeasurementSpec MeasurementSpec::from_matrices(Region region, std::vector<std::string> outcomes,
                                               const std::vector<Eigen::MatrixXcd>& elements) {
    if (outcomes.size() != elements.size())
        throw UsageError("from_matrices: outcome/element count mismatch");
    MeasurementSpec spec;
    spec.region = std::move(region);
    spec.outcomes = std::move(outcomes);
    for (const auto& elem : elements) spec.alpha.push_back(decompose_povm(elem, spec.region.size()));
    validate_spec(spec);
    return spec;
}

MeasurementSpec MeasurementSpec::preset(std::size_t qubit, Letter basis) {
    if (basis == Letter::I) throw UsageError("preset measurement basis must be X, Y, or Z");
    return from_observable(Region::of({qubit}), pauli_letter_matrix(basis));
}

std::size_t MeasurementSpec::outcome_index(const std::string& label) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        if (outcomes[i] == label) return i;
    throw UsageError("measurement has no outcome labeled '" + label + "'");
}

PauliSum build_observable(const MeasurementSpec& spec, std::size_t outcome,
                          const OnticState& state) {
    if (outcome >= spec.outcomes.size()) throw UsageError("outcome index out of range");
    const std::size_t k = spec.region.size();
    for (auto q : spec.region.indices) {
        if (q >= state.n_qubits()) throw UsageError("measurement region exceeds universe size");
        if (!state.has(q))
            throw UsageError("state does not carry a descriptor for measured qubit " +
                             std::to_string(q));
    }
    const auto& table = spec.alpha[outcome];
    PauliSum acc(state.n_qubits());
    for (std::size_t code = 0; code < table.size(); ++code) {
        const double a = table[code];
        if (std::abs(a) < kPruneTol) continue;
        const std::vector<Letter> letters = code_letters(code, k);
        PauliSum prod(state.n_qubits());
        bool have = false;
        for (std::size_t s = 0; s < k; ++s) {
            if (letters[s] == Letter::I) continue;
            const PauliSum& elem = state.descriptor(spec.region.indices[s]).element(letters[s]);
            prod = have ? sum_multiply(prod, elem) : elem;
            have = true;
        }
        if (!have) prod = PauliSum::identity(state.n_qubits());
        acc += a * prod;
    }
    return acc;
}

double indicator(const MeasurementSpec& spec, std::size_t outcome, const OnticState& state) {
    const double xi = expectation_reference(build_observable(spec, outcome, state));
    return clamp_probability(xi, "indicator for outcome '" + spec.outcomes[outcome] + "'");
}

double joint_indicator(const MeasurementSpec& a, std::size_t outcome_a, const MeasurementSpec& b,
                       std::size_t outcome_b, const OnticState& state) {
    if (!a.region.disjoint(b.region))
        throw UsageError("joint_indicator: measurement regions overlap");
    const PauliSum oa = build_observable(a, outcome_a, state);
    const PauliSum ob = build_observable(b, outcome_b, state);
    PauliSum prod = sum_multiply(oa, ob);
    // The product of two commuting Hermitian substituted observables can pick
    // up numerically-tiny imaginary dust; drop it before taking expectations.
    const double xi = expectation_reference(0.5 * (prod + sum_multiply(ob, oa)));
    return clamp_probability(xi, "joint indicator for outcome '" + a.outcomes[outcome_a] + "," +
                                     b.outcomes[outcome_b] + "'");
}

OutcomeDistribution measure(const MeasurementSpec& spec, const OnticState& state) {
    OutcomeDistribution dist;
    for (std::size_t m = 0; m < spec.outcomes.size(); ++m)
        dist[spec.outcomes[m]] = indicator(spec, m, state);
    check_normalized(dist, "outcome distribution");
    return dist;
}

OutcomeDistribution measure(const MeasurementSpec& spec, const EpistemicState& state) {
    OutcomeDistribution dist;
    for (std::size_t m = 0; m < spec.outcomes.size(); ++m)
        dist[spec.outcomes[m]] = branch_indicator_sum(
            state, [&](const OnticState& s) { return indicator(spec, m, s); });
    check_normalized(dist, "outcome distribution");
    return dist;
}

OutcomeDistribution joint_distribution(const MeasurementSpec& a, const MeasurementSpec& b,
                                       const OnticState& state) {
    OutcomeDistribution dist;
    for (std::size_t ma = 0; ma < a.outcomes.size(); ++ma)
        for (std::size_t mb = 0; mb < b.outcomes.size(); ++mb)
            dist[a.outcomes[ma] + "," + b.outcomes[mb]] = joint_indicator(a, ma, b, mb, state);
    check_normalized(dist, "joint outcome distribution");
    return dist;
}

OutcomeDistribution joint_distribution(const MeasurementSpec& a, const MeasurementSpec& b,
                                       const EpistemicState& state) {
    OutcomeDistribution dist;
    for (std::size_t ma = 0; ma < a.outcomes.size(); ++ma)
        for (std::size_t mb = 0; mb < b.outcomes.size(); ++mb)
            dist[a.outcomes[ma] + "," + b.outcomes[mb]] = branch_indicator_sum(
                state,
                [&](const OnticState& s) { return joint_indicator(a, ma, b, mb, s); });
    check_normalized(dist, "joint outcome distribution");
    return dist;
}

OutcomeDistribution probability_pipeline(const EpistemicState& prep,
                                         const TransformationContext& ctx,
                                         const MeasurementSpec& spec) {
    return measure(spec, apply_transformation(prep, ctx));
}

EpistemicState condition_on_outcome(const EpistemicState& e, const MeasurementSpec& spec,
                                    std::size_t outcome) {
    std::vector<EpistemicState::Branch> out;
    double total = 0;
    for (const auto& b : e.branches()) {
        const double w = b.weight * indicator(spec, outcome, b.state);
        total += w;
        if (w >= 1e-12) out.push_back({w, b.state});
    }
    if (total < 1e-12)
        throw UsageError("cannot condition on outcome '" + spec.outcomes[outcome] +
                         "': probability is zero");
    for (auto& b : out) b.weight /= total;
    return EpistemicState(std::move(out));
}

}  // namespace dh
