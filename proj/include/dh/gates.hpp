#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dh/pauli.hpp"

namespace dh {

enum class GateKind {
    X, Y, Z, H, S, Sdg, Cnot, Cz, Swap,   // Clifford set
    T, Tdg, Rx, Ry, Rz,                   // fixed-axis non-Clifford
    General                               // explicit unitary on <= 3 qubits
};

std::string kind_name(GateKind k);
GateKind kind_from_name(const std::string& name);
bool kind_is_clifford(GateKind k);
std::size_t kind_arity(GateKind k);  // 0 for General (taken from targets)

// One gate application. Conventions fixed here for the whole project:
//   Rz(t) = exp(-i t Z / 2), Rx/Ry analogous; T = diag(1, e^{i pi/4}).
//   Within a multi-qubit gate matrix, targets[0] is the most significant
//   bit of the row/column index (textbook CNOT layout with targets
//   {control, target}).
struct GateOp {
    GateKind kind;
    std::vector<std::size_t> targets;
    double angle = 0.0;         // rotations only
    Eigen::MatrixXcd matrix;    // General only
    std::string param;          // optional parameter id for rotations

    static GateOp x(std::size_t q);
    static GateOp y(std::size_t q);
    static GateOp z(std::size_t q);
    static GateOp h(std::size_t q);
    static GateOp s(std::size_t q);
    static GateOp sdg(std::size_t q);
    static GateOp t(std::size_t q);
    static GateOp tdg(std::size_t q);
    static GateOp cnot(std::size_t control, std::size_t target);
    static GateOp cz(std::size_t a, std::size_t b);
    static GateOp swap(std::size_t a, std::size_t b);
    static GateOp rx(std::size_t q, double angle, std::string param = "");
    static GateOp ry(std::size_t q, double angle, std::string param = "");
    static GateOp rz(std::size_t q, double angle, std::string param = "");
    static GateOp general(std::vector<std::size_t> targets, Eigen::MatrixXcd u);

    bool is_clifford() const { return kind_is_clifford(kind); }
    std::size_t arity() const { return targets.size(); }
};

// Dense matrix of the gate on its own targets (2^k x 2^k).
Eigen::MatrixXcd gate_matrix(const GateOp& g);

bool is_unitary(const Eigen::MatrixXcd& m, double tol = 1e-10);

// Validate targets against a universe size: in range and pairwise distinct.
void validate_targets(const GateOp& g, std::size_t n_qubits);

// A (possibly stochastic) transformation: probability-weighted alternative
// gate lists plus the ancilla indices the context is allowed to consume.
struct TransformationContext {
    struct Alternative {
        double probability = 1.0;
        std::vector<GateOp> gates;
    };
    std::vector<Alternative> alternatives;
    std::vector<std::size_t> ancillas;

    static TransformationContext deterministic(std::vector<GateOp> gates,
                                               std::vector<std::size_t> ancillas = {});
    // Probabilities non-negative and summing to 1 within 1e-12; targets valid.
    void validate(std::size_t n_qubits) const;
};

}  // namespace dh
