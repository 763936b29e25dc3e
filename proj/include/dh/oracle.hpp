#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dh/gates.hpp"
#include "dh/pauli.hpp"

// Straightforward dense Schrodinger-picture engine, used to cross-check the
// sparse descriptor engine. It deliberately shares no conjugation code with
// the sparse side: states are amplitude vectors, gates are applied by direct
// amplitude arithmetic, and operator decompositions go through full 2^n
// matrices. Qubit q is bit q of the basis index.
namespace dh::oracle {

using StateVector = Eigen::VectorXcd;

// Maximum universe size the dense engine accepts; default 12, overridable
// via the DHLAB_DENSE_LIMIT environment variable.
std::size_t dense_limit();

StateVector reference_state(std::size_t n_qubits);  // |0...0>

void apply_gate_inplace(StateVector& v, const GateOp& g);
StateVector evolve(StateVector v, std::span<const GateOp> gates);

// Explicit POVM element: a matrix on the listed target qubits.
struct DenseOperator {
    Eigen::MatrixXcd matrix;  // 2^k x 2^k, targets.front() most significant
    std::vector<std::size_t> targets;
};

// <v| E |v> for each labeled element; validates completeness (sum = identity
// on the union support within 1e-10) and that each probability is
// non-negative within 1e-9.
std::map<std::string, double> born_probabilities(
    const StateVector& v, const std::vector<std::pair<std::string, DenseOperator>>& povm);

double expectation(const StateVector& v, const PauliSum& p);

Eigen::MatrixXcd to_matrix(const PauliSum& p);
PauliSum from_matrix(const Eigen::MatrixXcd& m, std::size_t n_qubits);

// U^dag * p * U for the chronological circuit U = gates[last] ... gates[0],
// computed with dense matrices; the practical limit here is smaller than
// dense_limit() because full 4^n matrices are involved.
PauliSum conjugate_dense(const PauliSum& p, std::span<const GateOp> gates);

}  // namespace dh::oracle
