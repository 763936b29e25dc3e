#pragma once

#include <Eigen/Dense>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace dh {

using cplx = std::complex<double>;

// Coefficients whose magnitude falls below this are dropped after every merge,
// keeping sums sparse without disturbing anything at the 1e-9 contract level.
inline constexpr double kPruneTol = 1e-12;

enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Letter l);
Letter letter_from_char(char c);

// Dense 2x2 matrix of a single Pauli letter (the one shared definitional
// constant between the sparse engine and dense consumers).
Eigen::Matrix2cd pauli_letter_matrix(Letter l);

// Unsigned Pauli letter sequence, encoded as x/z bit masks (64 qubits per
// word, qubit q at bit q % 64 of word q / 64):
//   I=(0,0)  X=(1,0)  Y=(1,1)  Z=(0,1)
struct PauliWord {
    std::vector<std::uint64_t> x, z;
    auto operator<=>(const PauliWord&) const = default;
};

PauliWord make_word(std::size_t n_qubits);
Letter get_letter(const PauliWord& w, std::size_t q);
void set_letter(PauliWord& w, std::size_t q, Letter l);
bool is_identity_word(const PauliWord& w);
std::string word_str(const PauliWord& w, std::size_t n_qubits);
PauliWord word_from_str(const std::string& letters);

// A single signed/phased Pauli string: i^phase_pow * (tensor of letters).
class PauliString {
  public:
    explicit PauliString(std::size_t n_qubits)
        : n_(n_qubits), word_(make_word(n_qubits)) {}
    PauliString(std::size_t n_qubits, PauliWord word, int phase_pow = 0);

    static PauliString single(std::size_t n_qubits, std::size_t q, Letter l);
    // Parse e.g. "XIZ" (qubit 0 leftmost); optional leading "+"/"-"/"i"/"-i".
    static PauliString parse(const std::string& text);

    std::size_t n_qubits() const { return n_; }
    const PauliWord& word() const { return word_; }
    int phase_pow() const { return phase_pow_; }
    cplx phase() const;
    Letter letter(std::size_t q) const { return get_letter(word_, q); }
    std::string str() const;

    bool operator==(const PauliString&) const = default;

  private:
    std::size_t n_;
    PauliWord word_;
    int phase_pow_ = 0;  // power of i, always reduced mod 4
};

PauliString multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

// Sparse Hermitian-friendly linear combination of Pauli strings. String
// phases are folded into the complex coefficients, so keys are unsigned
// words; terms live in an ordered map, which canonicalizes merge order and
// makes iteration (hence reports and float accumulation) deterministic.
class PauliSum {
  public:
    explicit PauliSum(std::size_t n_qubits) : n_(n_qubits) {}

    static PauliSum zero(std::size_t n_qubits) { return PauliSum(n_qubits); }
    static PauliSum identity(std::size_t n_qubits);
    static PauliSum single(std::size_t n_qubits, std::size_t q, Letter l, cplx coeff = 1.0);

    std::size_t n_qubits() const { return n_; }
    std::size_t term_count() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const std::map<PauliWord, cplx>& terms() const { return terms_; }
    cplx coefficient(const PauliWord& w) const;

    // Merge in a term; drops the entry if the merged coefficient is below
    // the pruning tolerance.
    void add(const PauliWord& w, cplx coeff);
    void add(const PauliString& s, cplx scale = 1.0);

    PauliSum& operator+=(const PauliSum& rhs);
    PauliSum& operator-=(const PauliSum& rhs);
    PauliSum& operator*=(cplx scalar);

    std::string str() const;
    bool operator==(const PauliSum&) const = default;

  private:
    std::size_t n_;
    std::map<PauliWord, cplx> terms_;
};

PauliSum operator+(PauliSum a, const PauliSum& b);
PauliSum operator-(PauliSum a, const PauliSum& b);
PauliSum operator*(cplx scalar, PauliSum a);
PauliSum operator*(PauliSum a, cplx scalar);

// Full distributive product; term count is bounded by |a|*|b| before merging.
PauliSum sum_multiply(const PauliSum& a, const PauliSum& b);
inline PauliSum operator*(const PauliSum& a, const PauliSum& b) { return sum_multiply(a, b); }

// Qubits on which any term acts non-trivially.
std::set<std::size_t> support(const PauliSum& p);

// True when every stored coefficient is real within tol (letters are
// self-adjoint, so this is exactly Hermiticity of the operator).
bool is_hermitian(const PauliSum& p, double tol = 1e-9);

// <0...0| p |0...0>: the sum of coefficients of terms containing only I/Z.
// Requires a Hermitian input; throws NumericError otherwise.
double expectation_reference(const PauliSum& p);

// Largest coefficient difference over the union of term sets.
double max_coeff_delta(const PauliSum& a, const PauliSum& b);
bool approx_equal(const PauliSum& a, const PauliSum& b, double tol);

}  // namespace dh
