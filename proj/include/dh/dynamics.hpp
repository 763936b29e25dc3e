#pragma once

#include <span>

#include "dh/gates.hpp"
#include "dh/ontic.hpp"

namespace dh {

// Heisenberg evolution of descriptors. Appending gate G to a history U maps
// each tracked element to (UG)^dag P (UG); this is implemented by expanding
// G^dag P G for the gate's own generators in the fixed initial basis and
// substituting the current descriptor elements into that expansion (the
// substitution map is an algebra homomorphism, so products of generators
// become sum_multiply of tracked elements). Only the gate's target qubits'
// descriptors change: a gate on region A leaves every region-B descriptor
// bit-identical, which is what makes the dynamical-locality check exact.
//
// Conventions pinned project-wide (see gates.hpp for the matrices):
//   Rz(t) = exp(-i t Z / 2)  =>  x_bar -> cos(t) X - sin(t) Y on a fresh qubit,
//   T                        =>  x_bar -> (X - Y) / sqrt(2).
// Note: evolving X on a fresh qubit by the single Clifford string Z*Y*Z
// (three one-qubit Z,Y,Z gates on separate qubits) yields -X padded with
// identities, not a multi-site string; conjugation by a tensor factor acts
// factor-wise.

// Symplectic rewrite for the Clifford kinds {X,Y,Z,H,S,Sdg,CNOT,CZ,SWAP}.
// Routing any other kind here is a usage error. On single-string descriptors
// term counts never grow (Clifford closure).
OnticState conjugate_clifford(const OnticState& s, const GateOp& g);

// T/Tdg/rotations/GENERAL (support <= 3 qubits): the gate's generator images
// are computed densely on the gate support (coefficient of Q is
// tr(Q * U^dag P U) / 2^k) and substituted as above.
OnticState conjugate_general(const OnticState& s, const GateOp& g);

// Dispatch on gate kind.
OnticState apply_gate(const OnticState& s, const GateOp& g);
OnticState apply_circuit(OnticState s, std::span<const GateOp> gates);

// Map a (possibly stochastic) transformation over an epistemic state.
// Branch weights multiply; branches below 1e-12 are dropped.
EpistemicState apply_transformation(const EpistemicState& e, const TransformationContext& ctx);

}  // namespace dh
