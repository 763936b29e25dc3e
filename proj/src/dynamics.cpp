#include "dh/dynamics.hpp"

#include <array>
#include <cmath>

#include "dh/errors.hpp"

namespace dh {

namespace {

// One output of a symplectic rewrite: sign * (letter on slot 0) * (letter on
// slot 1). Slot indices refer to positions in GateOp::targets.
struct CliffordImage {
    int sign;  // +1 or -1
    Letter slot0;
    Letter slot1;  // Letter::I for one-qubit gates
};

// Images of U^dag P U for the generator P at (slot, letter); this is the
// inverse-direction action, which matters for S/Sdg.
CliffordImage clifford_image(GateKind k, std::size_t slot, Letter p) {
    using L = Letter;
    const int li = static_cast<int>(p) - 1;  // X=0, Y=1, Z=2
    switch (k) {
        case GateKind::X: {
            static constexpr std::array<int, 3> sign{+1, -1, -1};
            return {sign[li], p, L::I};
        }
        case GateKind::Y: {
            static constexpr std::array<int, 3> sign{-1, +1, -1};
            return {sign[li], p, L::I};
        }
        case GateKind::Z: {
            static constexpr std::array<int, 3> sign{-1, -1, +1};
            return {sign[li], p, L::I};
        }
        case GateKind::H: {
            static constexpr std::array<CliffordImage, 3> img{{{+1, L::Z, L::I},
                                                               {-1, L::Y, L::I},
                                                               {+1, L::X, L::I}}};
            return img[li];
        }
        case GateKind::S: {
            static constexpr std::array<CliffordImage, 3> img{{{-1, L::Y, L::I},
                                                               {+1, L::X, L::I},
                                                               {+1, L::Z, L::I}}};
            return img[li];
        }
        case GateKind::Sdg: {
            static constexpr std::array<CliffordImage, 3> img{{{+1, L::Y, L::I},
                                                               {-1, L::X, L::I},
                                                               {+1, L::Z, L::I}}};
            return img[li];
        }
        case GateKind::Cnot: {
            static constexpr std::array<std::array<CliffordImage, 3>, 2> img{{
                {{{+1, L::X, L::X}, {+1, L::Y, L::X}, {+1, L::Z, L::I}}},   // control
                {{{+1, L::I, L::X}, {+1, L::Z, L::Y}, {+1, L::Z, L::Z}}},   // target
            }};
            return img[slot][li];
        }
        case GateKind::Cz: {
            static constexpr std::array<std::array<CliffordImage, 3>, 2> img{{
                {{{+1, L::X, L::Z}, {+1, L::Y, L::Z}, {+1, L::Z, L::I}}},
                {{{+1, L::Z, L::X}, {+1, L::Z, L::Y}, {+1, L::I, L::Z}}},
            }};
            return img[slot][li];
        }
        case GateKind::Swap: {
            if (slot == 0) return {+1, L::I, p};
            return {+1, p, L::I};
        }
        default:
            throw UsageError("gate kind " + kind_name(k) + " is not Clifford");
    }
}

// Product of tracked elements for a letter assignment over the gate targets.
PauliSum substitute(const OnticState& s, const std::vector<std::size_t>& targets,
                    const std::vector<Letter>& letters) {
    PauliSum acc(s.n_qubits());
    bool have = false;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (letters[i] == Letter::I) continue;
        const PauliSum& elem = s.descriptor(targets[i]).element(letters[i]);
        if (!have) {
            acc = elem;
            have = true;
        } else {
            acc = sum_multiply(acc, elem);
        }
    }
    if (!have) return PauliSum::identity(s.n_qubits());
    return acc;
}

void require_targets_carried(const OnticState& s, const GateOp& g) {
    validate_targets(g, s.n_qubits());
    for (auto q : g.targets)
        if (!s.has(q))
            throw UsageError("state does not carry a descriptor for gate target " +
                             std::to_string(q));
}

// 2^k x 2^k matrix of a letter assignment over k slots, slot 0 most
// significant, matching the gate_matrix index convention.
Eigen::MatrixXcd assignment_matrix(const std::vector<Letter>& letters) {
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

std::vector<Letter> assignment_letters(std::size_t code, std::size_t k) {
    std::vector<Letter> letters(k);
    for (std::size_t s = 0; s < k; ++s)
        letters[k - 1 - s] = static_cast<Letter>((code >> (2 * s)) & 3);
    return letters;
}

}  // namespace

OnticState conjugate_clifford(const OnticState& s, const GateOp& g) {
    if (!g.is_clifford())
        throw UsageError("conjugate_clifford: gate kind " + kind_name(g.kind) +
                         " is not Clifford");
    require_targets_carried(s, g);

    OnticState out = s;
    std::vector<QubitDescriptor> fresh;
    fresh.reserve(g.targets.size());
    for (std::size_t slot = 0; slot < g.targets.size(); ++slot) {
        QubitDescriptor d{PauliSum(s.n_qubits()), PauliSum(s.n_qubits()), PauliSum(s.n_qubits())};
        PauliSum* slots[3] = {&d.x_bar, &d.y_bar, &d.z_bar};
        for (int e = 0; e < 3; ++e) {
            const Letter p = static_cast<Letter>(e + 1);
            const CliffordImage img = clifford_image(g.kind, slot, p);
            std::vector<Letter> letters{img.slot0};
            if (g.targets.size() == 2) letters.push_back(img.slot1);
            PauliSum value = substitute(s, g.targets, letters);
            if (img.sign < 0) value *= -1.0;
            *slots[e] = std::move(value);
        }
        fresh.push_back(std::move(d));
    }
    for (std::size_t slot = 0; slot < g.targets.size(); ++slot)
        out.set_descriptor(g.targets[slot], std::move(fresh[slot]));
    return out;
}

OnticState conjugate_general(const OnticState& s, const GateOp& g) {
    switch (g.kind) {
        case GateKind::T:
        case GateKind::Tdg:
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz:
        case GateKind::General:
            break;
        default:
            throw UsageError("conjugate_general: gate kind " + kind_name(g.kind) +
                             " should take the Clifford route");
    }
    require_targets_carried(s, g);
    if (g.targets.size() > 3) throw UsageError("conjugate_general: gate support exceeds 3 qubits");

    const std::size_t k = g.targets.size();
    const std::size_t dim = 1ull << k;
    const std::size_t assignments = 1ull << (2 * k);
    const Eigen::MatrixXcd u = gate_matrix(g);
    if (static_cast<std::size_t>(u.rows()) != dim)
        throw UsageError("conjugate_general: matrix dimension does not match targets");
    if (!is_unitary(u)) throw UsageError("conjugate_general: matrix is not unitary within 1e-10");

    OnticState out = s;
    std::vector<QubitDescriptor> fresh;
    fresh.reserve(k);
    for (std::size_t slot = 0; slot < k; ++slot) {
        QubitDescriptor d{PauliSum(s.n_qubits()), PauliSum(s.n_qubits()), PauliSum(s.n_qubits())};
        PauliSum* slots[3] = {&d.x_bar, &d.y_bar, &d.z_bar};
        for (int e = 0; e < 3; ++e) {
            std::vector<Letter> gen(k, Letter::I);
            gen[slot] = static_cast<Letter>(e + 1);
            const Eigen::MatrixXcd a = u.adjoint() * assignment_matrix(gen) * u;
            PauliSum acc(s.n_qubits());
            for (std::size_t code = 0; code < assignments; ++code) {
                const std::vector<Letter> letters = assignment_letters(code, k);
                const cplx c = (assignment_matrix(letters) * a).trace() / static_cast<double>(dim);
                if (std::abs(c) < kPruneTol) continue;
                acc += c * substitute(s, g.targets, letters);
            }
            *slots[e] = std::move(acc);
        }
        fresh.push_back(std::move(d));
    }
    for (std::size_t slot = 0; slot < k; ++slot)
        out.set_descriptor(g.targets[slot], std::move(fresh[slot]));
    return out;
}

OnticState apply_gate(const OnticState& s, const GateOp& g) {
    return g.is_clifford() ? conjugate_clifford(s, g) : conjugate_general(s, g);
}

OnticState apply_circuit(OnticState s, std::span<const GateOp> gates) {
    for (const auto& g : gates) s = apply_gate(s, g);
    return s;
}

EpistemicState apply_transformation(const EpistemicState& e, const TransformationContext& ctx) {
    ctx.validate(e.n_qubits());
    std::vector<EpistemicState::Branch> out;
    for (const auto& branch : e.branches()) {
        for (const auto& alt : ctx.alternatives) {
            const double w = branch.weight * alt.probability;
            if (w < 1e-12) continue;
            out.push_back({w, apply_circuit(branch.state, alt.gates)});
        }
    }
    return EpistemicState(std::move(out));
}

}  // namespace dh
