#include "dh/ontic.hpp"

#include <algorithm>
#include <cmath>

#include "dh/errors.hpp"
#include "dh/gates.hpp"

namespace dh {

Region Region::of(std::vector<std::size_t> qubits) {
    std::sort(qubits.begin(), qubits.end());
    if (std::adjacent_find(qubits.begin(), qubits.end()) != qubits.end())
        throw UsageError("region contains duplicate qubit indices");
    return Region{std::move(qubits)};
}

bool Region::contains(std::size_t q) const {
    return std::binary_search(indices.begin(), indices.end(), q);
}

bool Region::disjoint(const Region& other) const {
    for (auto q : indices)
        if (other.contains(q)) return false;
    return true;
}

const PauliSum& QubitDescriptor::element(Letter l) const {
    switch (l) {
        case Letter::X: return x_bar;
        case Letter::Y: return y_bar;
        case Letter::Z: return z_bar;
        default: throw UsageError("descriptor has no element for letter I");
    }
}

const PauliSum& QubitDescriptor::element(std::size_t i) const {
    switch (i) {
        case 0: return x_bar;
        case 1: return y_bar;
        case 2: return z_bar;
        default: throw UsageError("descriptor element index must be 0, 1, or 2");
    }
}

const QubitDescriptor& OnticState::descriptor(std::size_t q) const {
    auto it = descriptors_.find(q);
    if (it == descriptors_.end())
        throw UsageError("state does not carry a descriptor for qubit " + std::to_string(q));
    return it->second;
}

void OnticState::set_descriptor(std::size_t q, QubitDescriptor d) {
    if (q >= n_) throw UsageError("qubit index out of range");
    descriptors_.insert_or_assign(q, std::move(d));
}

QubitDescriptor fresh_descriptor(std::size_t n_qubits, std::size_t q) {
    return QubitDescriptor{PauliSum::single(n_qubits, q, Letter::X),
                           PauliSum::single(n_qubits, q, Letter::Y),
                           PauliSum::single(n_qubits, q, Letter::Z)};
}

OnticState fresh_universe(std::size_t n_qubits) {
    if (n_qubits == 0) throw UsageError("universe needs at least one qubit");
    OnticState s(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) s.set_descriptor(q, fresh_descriptor(n_qubits, q));
    return s;
}

bool is_fresh(const OnticState& s, std::size_t q) {
    return s.has(q) && s.descriptor(q) == fresh_descriptor(s.n_qubits(), q);
}

OnticState prepare_pure(const OnticState& s, std::size_t q, const Eigen::Matrix2cd& u) {
    if (q >= s.n_qubits()) throw UsageError("prepare_pure: qubit index out of range");
    if (!is_fresh(s, q))
        throw UsageError("prepare_pure: qubit " + std::to_string(q) + " is not in fresh form");
    if (!is_unitary(u)) throw UsageError("prepare_pure: matrix is not unitary within 1e-10");

    // The fresh triple maps to u^dag sigma u, expanded back over single-site
    // letters: coefficient of L is tr(sigma_L * u^dag sigma u) / 2.
    OnticState out = s;
    const Letter elems[3] = {Letter::X, Letter::Y, Letter::Z};
    QubitDescriptor d{PauliSum(s.n_qubits()), PauliSum(s.n_qubits()), PauliSum(s.n_qubits())};
    PauliSum* slots[3] = {&d.x_bar, &d.y_bar, &d.z_bar};
    for (int e = 0; e < 3; ++e) {
        const Eigen::Matrix2cd a = u.adjoint() * pauli_letter_matrix(elems[e]) * u;
        for (Letter l : {Letter::I, Letter::X, Letter::Y, Letter::Z}) {
            const cplx c = (pauli_letter_matrix(l) * a).trace() / 2.0;
            if (std::abs(c) < kPruneTol) continue;
            if (l == Letter::I) slots[e]->add(make_word(s.n_qubits()), c);
            else slots[e]->add(PauliString::single(s.n_qubits(), q, l), c);
        }
    }
    out.set_descriptor(q, std::move(d));
    return out;
}

Eigen::Matrix2cd named_state_unitary(const std::string& name) {
    const GateOp h = GateOp::h(0), x = GateOp::x(0), z = GateOp::z(0), s = GateOp::s(0),
                 sdg = GateOp::sdg(0);
    if (name == "z+") return Eigen::Matrix2cd::Identity();
    if (name == "z-") return gate_matrix(x);
    if (name == "x+") return gate_matrix(h);
    if (name == "x-") return gate_matrix(z) * gate_matrix(h);
    if (name == "y+") return gate_matrix(s) * gate_matrix(h);
    if (name == "y-") return gate_matrix(sdg) * gate_matrix(h);
    throw UsageError("unknown named state '" + name + "' (want z+/z-/x+/x-/y+/y-)");
}

OnticState restrict_to(const OnticState& s, const Region& region) {
    OnticState out(s.n_qubits());
    for (auto q : region.indices) out.set_descriptor(q, s.descriptor(q));
    return out;
}

OnticState compose(std::span<const OnticState> fragments) {
    if (fragments.empty()) throw UsageError("compose: no fragments");
    const std::size_t n = fragments.front().n_qubits();
    OnticState out(n);
    for (const auto& f : fragments) {
        if (f.n_qubits() != n) throw UsageError("compose: fragments of different universe sizes");
        for (const auto& [q, d] : f.descriptors()) {
            if (out.has(q))
                throw UsageError("compose: fragments overlap on qubit " + std::to_string(q));
            out.set_descriptor(q, d);
        }
    }
    return out;
}

EpistemicState::EpistemicState(std::vector<Branch> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) throw UsageError("epistemic state needs at least one branch");
    double total = 0;
    const std::size_t n = branches_.front().state.n_qubits();
    for (const auto& b : branches_) {
        if (b.weight < 0) throw UsageError("epistemic branch weight is negative");
        if (b.state.n_qubits() != n)
            throw UsageError("epistemic branches have mismatched universe sizes");
        total += b.weight;
    }
    // 1e-9 rather than the 1e-12 working precision: dropping sub-1e-12
    // branches upstream may legitimately nudge the total by a few ulps more.
    if (std::abs(total - 1.0) > 1e-9)
        throw UsageError("epistemic weights sum to " + std::to_string(total) + ", expected 1");
}

}  // namespace dh
