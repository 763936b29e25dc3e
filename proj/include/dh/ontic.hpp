#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dh/pauli.hpp"

namespace dh {

// A set of qubit indices (sorted, unique).
struct Region {
    std::vector<std::size_t> indices;

    static Region of(std::vector<std::size_t> qubits);  // sorts, rejects duplicates
    std::size_t size() const { return indices.size(); }
    bool contains(std::size_t q) const;
    bool disjoint(const Region& other) const;
    bool operator==(const Region&) const = default;
    auto operator<=>(const Region&) const = default;
};

// The evolving triple of globally-padded operators carried by one qubit.
struct QubitDescriptor {
    PauliSum x_bar, y_bar, z_bar;

    const PauliSum& element(Letter l) const;  // X/Y/Z only
    const PauliSum& element(std::size_t i) const;  // 0=x, 1=y, 2=z
    bool operator==(const QubitDescriptor&) const = default;
};

// The ontic state of a universe (or a fragment of one): a descriptor per
// carried qubit. n_qubits is the padding width shared by every PauliSum
// inside; a full state carries descriptors for all indices 0..n-1, a
// fragment for a subset.
class OnticState {
  public:
    explicit OnticState(std::size_t n_qubits) : n_(n_qubits) {}

    std::size_t n_qubits() const { return n_; }
    std::size_t carried_count() const { return descriptors_.size(); }
    bool complete() const { return descriptors_.size() == n_; }
    bool has(std::size_t q) const { return descriptors_.contains(q); }
    const QubitDescriptor& descriptor(std::size_t q) const;
    void set_descriptor(std::size_t q, QubitDescriptor d);
    const std::map<std::size_t, QubitDescriptor>& descriptors() const { return descriptors_; }

    bool operator==(const OnticState&) const = default;

  private:
    std::size_t n_;
    std::map<std::size_t, QubitDescriptor> descriptors_;
};

// All n qubits in the reference configuration {X_q, Y_q, Z_q}.
OnticState fresh_universe(std::size_t n_qubits);

QubitDescriptor fresh_descriptor(std::size_t n_qubits, std::size_t q);
bool is_fresh(const OnticState& s, std::size_t q);

// Install a pure single-qubit state by conjugating the fresh triple with the
// 2x2 preparation unitary. The target must still be fresh.
OnticState prepare_pure(const OnticState& s, std::size_t q, const Eigen::Matrix2cd& u);

// Preparation unitaries for the six named axis states: z+, z-, x+, x-, y+, y-.
Eigen::Matrix2cd named_state_unitary(const std::string& name);

// Keep only the region's descriptors (padding width unchanged).
OnticState restrict_to(const OnticState& s, const Region& region);

// Reassemble fragments with pairwise-disjoint carried sets.
OnticState compose(std::span<const OnticState> fragments);

// Finitely-supported distribution over ontic states.
class EpistemicState {
  public:
    struct Branch {
        double weight;
        OnticState state;
        bool operator==(const Branch&) const = default;
    };

    explicit EpistemicState(std::vector<Branch> branches);
    static EpistemicState pure(OnticState s) { return EpistemicState({{1.0, std::move(s)}}); }

    std::size_t n_qubits() const { return branches_.front().state.n_qubits(); }
    const std::vector<Branch>& branches() const { return branches_; }

    bool operator==(const EpistemicState&) const = default;

  private:
    std::vector<Branch> branches_;
};

}  // namespace dh
