#include "dh/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>

#include "dh/errors.hpp"

namespace dh::oracle {

namespace {

constexpr std::size_t kMatrixLimit = 10;  // full 2^n x 2^n matrices beyond this are impractical

std::size_t checked_n(std::size_t n_qubits) {
    if (n_qubits == 0) throw UsageError("oracle: empty universe");
    if (n_qubits > dense_limit())
        throw UsageError("oracle: " + std::to_string(n_qubits) +
                         " qubits exceeds the dense limit of " + std::to_string(dense_limit()));
    return n_qubits;
}

std::size_t state_qubits(const StateVector& v) {
    const auto dim = static_cast<std::size_t>(v.size());
    if (dim == 0 || (dim & (dim - 1)) != 0)
        throw UsageError("oracle: state dimension is not a power of two");
    std::size_t n = 0;
    while ((1ull << n) < dim) ++n;
    return n;
}

// Apply a 2^k matrix to the amplitudes along the target qubits' axes.
// targets.front() is the most significant bit of the small-matrix index.
void apply_matrix_inplace(StateVector& v, const Eigen::MatrixXcd& m,
                          const std::vector<std::size_t>& targets) {
    const std::size_t n = state_qubits(v);
    const std::size_t k = targets.size();
    const std::size_t dim = 1ull << k;
    if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim)
        throw UsageError("oracle: matrix dimension does not match target count");
    for (auto t : targets)
        if (t >= n) throw UsageError("oracle: gate target out of range");

    std::vector<std::size_t> bit(k);
    for (std::size_t s = 0; s < k; ++s) bit[s] = 1ull << targets[s];

    std::vector<cplx> scratch(dim);
    const std::size_t total = 1ull << n;
    std::size_t mask = 0;
    for (auto b : bit) mask |= b;

    for (std::size_t base = 0; base < total; ++base) {
        if (base & mask) continue;  // enumerate each amplitude group once
        for (std::size_t r = 0; r < dim; ++r) {
            std::size_t idx = base;
            for (std::size_t s = 0; s < k; ++s)
                if (r & (1ull << (k - 1 - s))) idx |= bit[s];
            scratch[r] = v(static_cast<Eigen::Index>(idx));
        }
        for (std::size_t r = 0; r < dim; ++r) {
            cplx acc = 0;
            for (std::size_t c = 0; c < dim; ++c) acc += m(r, c) * scratch[c];
            std::size_t idx = base;
            for (std::size_t s = 0; s < k; ++s)
                if (r & (1ull << (k - 1 - s))) idx |= bit[s];
            v(static_cast<Eigen::Index>(idx)) = acc;
        }
    }
}

Eigen::MatrixXcd word_matrix(const PauliWord& w, std::size_t n_qubits) {
    // kron with qubit n-1 as the high bit, so bit q of the index is qubit q.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        const Eigen::Matrix2cd f = pauli_letter_matrix(get_letter(w, q));
        Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
        next.topLeftCorner(m.rows(), m.cols()) = f(0, 0) * m;
        next.topRightCorner(m.rows(), m.cols()) = f(0, 1) * m;
        next.bottomLeftCorner(m.rows(), m.cols()) = f(1, 0) * m;
        next.bottomRightCorner(m.rows(), m.cols()) = f(1, 1) * m;
        m.swap(next);
    }
    return m;
}

}  // namespace

std::size_t dense_limit() {
    static const std::size_t limit = [] {
        if (const char* env = std::getenv("DHLAB_DENSE_LIMIT")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && *end == '\0' && v >= 1 && v <= 24)
                return static_cast<std::size_t>(v);
        }
        return std::size_t{12};
    }();
    return limit;
}

StateVector reference_state(std::size_t n_qubits) {
    checked_n(n_qubits);
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(1) << n_qubits);
    v(0) = 1.0;
    return v;
}

void apply_gate_inplace(StateVector& v, const GateOp& g) {
    validate_targets(g, state_qubits(v));
    apply_matrix_inplace(v, gate_matrix(g), g.targets);
}

StateVector evolve(StateVector v, std::span<const GateOp> gates) {
    for (const auto& g : gates) apply_gate_inplace(v, g);
    return v;
}

std::map<std::string, double> born_probabilities(
    const StateVector& v, const std::vector<std::pair<std::string, DenseOperator>>& povm) {
    const std::size_t n = state_qubits(v);
    if (povm.empty()) throw UsageError("oracle: empty POVM");

    // Completeness on the union support.
    std::vector<std::size_t> union_targets;
    for (const auto& [label, op] : povm)
        for (auto t : op.targets)
            if (std::find(union_targets.begin(), union_targets.end(), t) == union_targets.end())
                union_targets.push_back(t);
    std::sort(union_targets.begin(), union_targets.end());
    if (!union_targets.empty() && union_targets.back() >= n)
        throw UsageError("oracle: POVM target out of range");
    const std::size_t uk = union_targets.size();
    if (uk > 12) throw UsageError("oracle: POVM support too large to validate");
    const std::size_t udim = 1ull << uk;
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(udim, udim);
    for (const auto& [label, op] : povm) {
        // Lift op.matrix to the union support.
        Eigen::MatrixXcd lifted = Eigen::MatrixXcd::Zero(udim, udim);
        const std::size_t k = op.targets.size();
        if (static_cast<std::size_t>(op.matrix.rows()) != (1ull << k))
            throw UsageError("oracle: POVM element dimension mismatch");
        for (std::size_t r = 0; r < udim; ++r) {
            for (std::size_t c = 0; c < udim; ++c) {
                // Map union-index bits to the element's own index; off-target
                // bits must match (identity factor).
                std::size_t rsmall = 0, csmall = 0;
                bool diag_ok = true;
                for (std::size_t ui = 0; ui < uk; ++ui) {
                    const std::size_t q = union_targets[ui];
                    const bool rb = r & (1ull << (uk - 1 - ui));
                    const bool cb = c & (1ull << (uk - 1 - ui));
                    auto it = std::find(op.targets.begin(), op.targets.end(), q);
                    if (it == op.targets.end()) {
                        if (rb != cb) { diag_ok = false; break; }
                    } else {
                        const std::size_t slot = static_cast<std::size_t>(it - op.targets.begin());
                        if (rb) rsmall |= 1ull << (k - 1 - slot);
                        if (cb) csmall |= 1ull << (k - 1 - slot);
                    }
                }
                if (diag_ok) lifted(r, c) = op.matrix(rsmall, csmall);
            }
        }
        total += lifted;
    }
    const Eigen::MatrixXcd dev = total - Eigen::MatrixXcd::Identity(udim, udim);
    if (dev.cwiseAbs().maxCoeff() > 1e-10)
        throw UsageError("oracle: POVM elements do not sum to the identity (max deviation " +
                         std::to_string(dev.cwiseAbs().maxCoeff()) + ")");

    std::map<std::string, double> out;
    for (const auto& [label, op] : povm) {
        StateVector w = v;
        apply_matrix_inplace(w, op.matrix, op.targets);
        const double p = v.dot(w).real();
        if (p < -1e-9) throw NumericError("oracle: negative Born probability " + std::to_string(p));
        out[label] = std::clamp(p, 0.0, 1.0);
    }
    return out;
}

double expectation(const StateVector& v, const PauliSum& p) {
    const std::size_t n = state_qubits(v);
    if (p.n_qubits() != n) throw UsageError("oracle: operator/state size mismatch");
    cplx acc = 0;
    for (const auto& [w, c] : p.terms()) {
        StateVector pv = v;
        // Apply the word letter-by-letter through the amplitude kernel.
        for (std::size_t q = 0; q < n; ++q) {
            const Letter l = get_letter(w, q);
            if (l == Letter::I) continue;
            apply_matrix_inplace(pv, pauli_letter_matrix(l), {q});
        }
        acc += c * v.dot(pv);
    }
    return acc.real();
}

Eigen::MatrixXcd to_matrix(const PauliSum& p) {
    const std::size_t n = p.n_qubits();
    if (n > kMatrixLimit)
        throw UsageError("oracle: to_matrix limited to " + std::to_string(kMatrixLimit) +
                         " qubits");
    const Eigen::Index dim = static_cast<Eigen::Index>(1) << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [w, c] : p.terms()) m += c * word_matrix(w, n);
    return m;
}

PauliSum from_matrix(const Eigen::MatrixXcd& m, std::size_t n_qubits) {
    if (n_qubits > kMatrixLimit)
        throw UsageError("oracle: from_matrix limited to " + std::to_string(kMatrixLimit) +
                         " qubits");
    const Eigen::Index dim = static_cast<Eigen::Index>(1) << n_qubits;
    if (m.rows() != dim || m.cols() != dim)
        throw UsageError("oracle: matrix dimension does not match qubit count");
    PauliSum out(n_qubits);
    // Enumerate all words via base-4 letter codes, qubit 0 the fastest digit.
    // A word is a signed permutation: column k has its only entry at row
    // k ^ xmask with value i^{#Y} * (-1)^popcount(k & zmask), so each trace
    // costs O(2^n) instead of a dense product.
    const std::size_t total = 1ull << (2 * n_qubits);
    const cplx i_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t code = 0; code < total; ++code) {
        PauliWord w = make_word(n_qubits);
        std::size_t rest = code;
        for (std::size_t q = 0; q < n_qubits; ++q) {
            set_letter(w, q, static_cast<Letter>(rest & 3));
            rest >>= 2;
        }
        const std::uint64_t xmask = w.x[0], zmask = w.z[0];  // kMatrixLimit <= 64 qubits
        const cplx y_phase = i_powers[std::popcount(xmask & zmask) & 3];
        cplx trace = 0.0;
        for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) {
            const double sign = (std::popcount(k & zmask) & 1) ? -1.0 : 1.0;
            trace += sign * m(static_cast<Eigen::Index>(k),
                              static_cast<Eigen::Index>(k ^ xmask));
        }
        const cplx c = y_phase * trace / static_cast<double>(dim);
        if (std::abs(c) >= kPruneTol) out.add(w, c);
    }
    return out;
}

PauliSum conjugate_dense(const PauliSum& p, std::span<const GateOp> gates) {
    const std::size_t n = p.n_qubits();
    if (n > kMatrixLimit)
        throw UsageError("oracle: conjugate_dense limited to " + std::to_string(kMatrixLimit) +
                         " qubits");
    for (const auto& g : gates) validate_targets(g, n);

    // U^dag M U without forming U: push columns through the reversed adjoint
    // gate list twice, via B = M U = (U^dag M^dag)^dag and A = U^dag B.
    std::vector<std::pair<Eigen::MatrixXcd, std::vector<std::size_t>>> inverse;
    for (auto it = gates.rbegin(); it != gates.rend(); ++it)
        inverse.emplace_back(gate_matrix(*it).adjoint(), it->targets);
    auto apply_udag_columns = [&](Eigen::MatrixXcd m) {
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
            StateVector v = m.col(col);
            for (const auto& [mat, targets] : inverse) apply_matrix_inplace(v, mat, targets);
            m.col(col) = v;
        }
        return m;
    };
    const Eigen::MatrixXcd mat = to_matrix(p);
    const Eigen::MatrixXcd b = apply_udag_columns(mat.adjoint()).adjoint();  // M U
    const Eigen::MatrixXcd a = apply_udag_columns(b);                        // U^dag M U
    return from_matrix(a, n);
}

}  // namespace dh::oracle
