#include "dh/gates.hpp"

#include <cmath>
#include <numbers>

#include "dh/errors.hpp"

namespace dh {

namespace {

constexpr cplx kI{0.0, 1.0};

GateOp one_qubit(GateKind k, std::size_t q) {
    GateOp g;
    g.kind = k;
    g.targets = {q};
    return g;
}

GateOp two_qubit(GateKind k, std::size_t a, std::size_t b) {
    if (a == b) throw UsageError("two-qubit gate needs distinct targets");
    GateOp g;
    g.kind = k;
    g.targets = {a, b};
    return g;
}

GateOp rotation(GateKind k, std::size_t q, double angle, std::string param) {
    GateOp g;
    g.kind = k;
    g.targets = {q};
    g.angle = angle;
    g.param = std::move(param);
    return g;
}

}  // namespace

std::string kind_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "Sdg";
        case GateKind::Cnot: return "CNOT";
        case GateKind::Cz: return "CZ";
        case GateKind::Swap: return "SWAP";
        case GateKind::T: return "T";
        case GateKind::Tdg: return "Tdg";
        case GateKind::Rx: return "RX";
        case GateKind::Ry: return "RY";
        case GateKind::Rz: return "RZ";
        case GateKind::General: return "GENERAL";
    }
    throw InternalError("bad GateKind");
}

GateKind kind_from_name(const std::string& name) {
    if (name == "X") return GateKind::X;
    if (name == "Y") return GateKind::Y;
    if (name == "Z") return GateKind::Z;
    if (name == "H") return GateKind::H;
    if (name == "S") return GateKind::S;
    if (name == "Sdg") return GateKind::Sdg;
    if (name == "CNOT") return GateKind::Cnot;
    if (name == "CZ") return GateKind::Cz;
    if (name == "SWAP") return GateKind::Swap;
    if (name == "T") return GateKind::T;
    if (name == "Tdg") return GateKind::Tdg;
    if (name == "RX") return GateKind::Rx;
    if (name == "RY") return GateKind::Ry;
    if (name == "RZ") return GateKind::Rz;
    if (name == "GENERAL") return GateKind::General;
    throw UsageError("unknown gate kind: '" + name + "'");
}

bool kind_is_clifford(GateKind k) {
    switch (k) {
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::H:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::Cnot:
        case GateKind::Cz:
        case GateKind::Swap:
            return true;
        default:
            return false;
    }
}

std::size_t kind_arity(GateKind k) {
    switch (k) {
        case GateKind::Cnot:
        case GateKind::Cz:
        case GateKind::Swap:
            return 2;
        case GateKind::General:
            return 0;
        default:
            return 1;
    }
}

GateOp GateOp::x(std::size_t q) { return one_qubit(GateKind::X, q); }
GateOp GateOp::y(std::size_t q) { return one_qubit(GateKind::Y, q); }
GateOp GateOp::z(std::size_t q) { return one_qubit(GateKind::Z, q); }
GateOp GateOp::h(std::size_t q) { return one_qubit(GateKind::H, q); }
GateOp GateOp::s(std::size_t q) { return one_qubit(GateKind::S, q); }
GateOp GateOp::sdg(std::size_t q) { return one_qubit(GateKind::Sdg, q); }
GateOp GateOp::t(std::size_t q) { return one_qubit(GateKind::T, q); }
GateOp GateOp::tdg(std::size_t q) { return one_qubit(GateKind::Tdg, q); }
GateOp GateOp::cnot(std::size_t c, std::size_t t) { return two_qubit(GateKind::Cnot, c, t); }
GateOp GateOp::cz(std::size_t a, std::size_t b) { return two_qubit(GateKind::Cz, a, b); }
GateOp GateOp::swap(std::size_t a, std::size_t b) { return two_qubit(GateKind::Swap, a, b); }
GateOp GateOp::rx(std::size_t q, double angle, std::string param) {
    return rotation(GateKind::Rx, q, angle, std::move(param));
}
GateOp GateOp::ry(std::size_t q, double angle, std::string param) {
    return rotation(GateKind::Ry, q, angle, std::move(param));
}
GateOp GateOp::rz(std::size_t q, double angle, std::string param) {
    return rotation(GateKind::Rz, q, angle, std::move(param));
}

GateOp GateOp::general(std::vector<std::size_t> targets, Eigen::MatrixXcd u) {
    if (targets.empty() || targets.size() > 3)
        throw UsageError("GENERAL gate supports 1 to 3 targets");
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i] == targets[j]) throw UsageError("GENERAL gate targets must be distinct");
    const auto dim = static_cast<Eigen::Index>(1) << targets.size();
    if (u.rows() != dim || u.cols() != dim)
        throw UsageError("GENERAL gate matrix dimension does not match target count");
    if (!is_unitary(u)) throw UsageError("GENERAL gate matrix is not unitary within 1e-10");
    GateOp g;
    g.kind = GateKind::General;
    g.targets = std::move(targets);
    g.matrix = std::move(u);
    return g;
}

Eigen::MatrixXcd gate_matrix(const GateOp& g) {
    using std::cos;
    using std::sin;
    Eigen::MatrixXcd m;
    const double h = g.angle / 2.0;
    switch (g.kind) {
        case GateKind::X: return pauli_letter_matrix(Letter::X);
        case GateKind::Y: return pauli_letter_matrix(Letter::Y);
        case GateKind::Z: return pauli_letter_matrix(Letter::Z);
        case GateKind::H:
            m.resize(2, 2);
            m << 1, 1, 1, -1;
            return m / std::numbers::sqrt2;
        case GateKind::S:
            m.resize(2, 2);
            m << 1, 0, 0, kI;
            return m;
        case GateKind::Sdg:
            m.resize(2, 2);
            m << 1, 0, 0, -kI;
            return m;
        case GateKind::T:
            m.resize(2, 2);
            m << 1, 0, 0, std::exp(kI * (std::numbers::pi / 4.0));
            return m;
        case GateKind::Tdg:
            m.resize(2, 2);
            m << 1, 0, 0, std::exp(-kI * (std::numbers::pi / 4.0));
            return m;
        case GateKind::Rx:
            m.resize(2, 2);
            m << cos(h), -kI * sin(h), -kI * sin(h), cos(h);
            return m;
        case GateKind::Ry:
            m.resize(2, 2);
            m << cos(h), -sin(h), sin(h), cos(h);
            return m;
        case GateKind::Rz:
            m.resize(2, 2);
            m << std::exp(-kI * h), 0, 0, std::exp(kI * h);
            return m;
        case GateKind::Cnot:
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
            return m;
        case GateKind::Cz:
            m = Eigen::MatrixXcd::Identity(4, 4);
            m(3, 3) = -1;
            return m;
        case GateKind::Swap:
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1;
            return m;
        case GateKind::General:
            return g.matrix;
    }
    throw InternalError("bad GateKind");
}

bool is_unitary(const Eigen::MatrixXcd& m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    const Eigen::MatrixXcd d = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

void validate_targets(const GateOp& g, std::size_t n_qubits) {
    const std::size_t want = kind_arity(g.kind);
    if (want != 0 && g.targets.size() != want)
        throw UsageError(kind_name(g.kind) + " gate expects " + std::to_string(want) +
                         " target(s), got " + std::to_string(g.targets.size()));
    if (g.kind == GateKind::General && (g.targets.empty() || g.targets.size() > 3))
        throw UsageError("GENERAL gate supports 1 to 3 targets");
    for (std::size_t i = 0; i < g.targets.size(); ++i) {
        if (g.targets[i] >= n_qubits)
            throw UsageError(kind_name(g.kind) + " gate target " + std::to_string(g.targets[i]) +
                             " out of range for " + std::to_string(n_qubits) + " qubits");
        for (std::size_t j = i + 1; j < g.targets.size(); ++j)
            if (g.targets[i] == g.targets[j])
                throw UsageError(kind_name(g.kind) + " gate targets must be distinct");
    }
}

TransformationContext TransformationContext::deterministic(std::vector<GateOp> gates,
                                                           std::vector<std::size_t> ancillas) {
    TransformationContext ctx;
    ctx.alternatives.push_back({1.0, std::move(gates)});
    ctx.ancillas = std::move(ancillas);
    return ctx;
}

void TransformationContext::validate(std::size_t n_qubits) const {
    if (alternatives.empty()) throw UsageError("transformation has no alternatives");
    double total = 0;
    for (const auto& alt : alternatives) {
        if (alt.probability < 0) throw UsageError("transformation probability is negative");
        total += alt.probability;
        for (const auto& g : alt.gates) validate_targets(g, n_qubits);
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw UsageError("transformation probabilities sum to " + std::to_string(total) +
                         ", expected 1");
    for (auto a : ancillas)
        if (a >= n_qubits) throw UsageError("ancilla index out of range");
}

}  // namespace dh
