#include "dh/pauli.hpp"

#include <bit>
#include <sstream>

#include "dh/errors.hpp"

namespace dh {

namespace {

std::size_t word_count(std::size_t n_qubits) { return (n_qubits + 63) / 64; }

// Count of Y letters in a word (x and z bit both set).
int y_count(const PauliWord& w) {
    int c = 0;
    for (std::size_t i = 0; i < w.x.size(); ++i) c += std::popcount(w.x[i] & w.z[i]);
    return c;
}

cplx i_power(int e) {
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((e % 4) + 4) % 4];
}

// Power of i picked up when multiplying two unsigned words, derived from the
// normal form  letter = i^(x&z) * X^x * Z^z  and the reordering sign
// (-1)^(z_a & x_b) of Z^za past X^xb.
int product_phase_pow(const PauliWord& a, const PauliWord& b, const PauliWord& ab) {
    int e = y_count(a) + y_count(b) - y_count(ab);
    for (std::size_t i = 0; i < a.x.size(); ++i) e += 2 * std::popcount(a.z[i] & b.x[i]);
    return ((e % 4) + 4) % 4;
}

PauliWord xor_words(const PauliWord& a, const PauliWord& b) {
    PauliWord r = a;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] ^= b.x[i];
        r.z[i] ^= b.z[i];
    }
    return r;
}

std::string coeff_str(cplx c) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << c.real();
    if (c.imag() >= 0) os << "+" << c.imag() << "i)";
    else os << c.imag() << "i)";
    return os.str();
}

}  // namespace

char to_char(Letter l) {
    switch (l) {
        case Letter::I: return 'I';
        case Letter::X: return 'X';
        case Letter::Y: return 'Y';
        case Letter::Z: return 'Z';
    }
    throw InternalError("bad Letter value");
}

Letter letter_from_char(char c) {
    switch (c) {
        case 'I': return Letter::I;
        case 'X': return Letter::X;
        case 'Y': return Letter::Y;
        case 'Z': return Letter::Z;
        default: throw UsageError(std::string("not a Pauli letter: '") + c + "'");
    }
}

Eigen::Matrix2cd pauli_letter_matrix(Letter l) {
    Eigen::Matrix2cd m;
    const cplx i{0, 1};
    switch (l) {
        case Letter::I: m << 1, 0, 0, 1; break;
        case Letter::X: m << 0, 1, 1, 0; break;
        case Letter::Y: m << 0, -i, i, 0; break;
        case Letter::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

PauliWord make_word(std::size_t n_qubits) {
    PauliWord w;
    w.x.assign(word_count(n_qubits), 0);
    w.z.assign(word_count(n_qubits), 0);
    return w;
}

Letter get_letter(const PauliWord& w, std::size_t q) {
    const std::size_t i = q / 64;
    const std::uint64_t m = 1ull << (q % 64);
    const bool x = w.x[i] & m, z = w.z[i] & m;
    if (x && z) return Letter::Y;
    if (x) return Letter::X;
    if (z) return Letter::Z;
    return Letter::I;
}

void set_letter(PauliWord& w, std::size_t q, Letter l) {
    const std::size_t i = q / 64;
    const std::uint64_t m = 1ull << (q % 64);
    w.x[i] &= ~m;
    w.z[i] &= ~m;
    if (l == Letter::X || l == Letter::Y) w.x[i] |= m;
    if (l == Letter::Z || l == Letter::Y) w.z[i] |= m;
}

bool is_identity_word(const PauliWord& w) {
    for (std::size_t i = 0; i < w.x.size(); ++i)
        if (w.x[i] | w.z[i]) return false;
    return true;
}

std::string word_str(const PauliWord& w, std::size_t n_qubits) {
    std::string s(n_qubits, 'I');
    for (std::size_t q = 0; q < n_qubits; ++q) s[q] = to_char(get_letter(w, q));
    return s;
}

PauliWord word_from_str(const std::string& letters) {
    PauliWord w = make_word(letters.size());
    for (std::size_t q = 0; q < letters.size(); ++q) set_letter(w, q, letter_from_char(letters[q]));
    return w;
}

PauliString::PauliString(std::size_t n_qubits, PauliWord word, int phase_pow)
    : n_(n_qubits), word_(std::move(word)), phase_pow_(((phase_pow % 4) + 4) % 4) {
    if (word_.x.size() != word_count(n_qubits))
        throw UsageError("PauliString: word size does not match qubit count");
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t q, Letter l) {
    if (q >= n_qubits) throw UsageError("PauliString::single: qubit index out of range");
    PauliWord w = make_word(n_qubits);
    set_letter(w, q, l);
    return PauliString(n_qubits, std::move(w));
}

PauliString PauliString::parse(const std::string& text) {
    std::size_t pos = 0;
    int phase = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') phase += 2;
        ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
        phase += 1;
        ++pos;
    }
    const std::string letters = text.substr(pos);
    if (letters.empty()) throw UsageError("PauliString::parse: no letters in '" + text + "'");
    return PauliString(letters.size(), word_from_str(letters), phase);
}

cplx PauliString::phase() const { return i_power(phase_pow_); }

std::string PauliString::str() const {
    static const char* prefix[4] = {"+", "+i", "-", "-i"};
    return std::string(prefix[phase_pow_]) + word_str(word_, n_);
}

PauliString multiply(const PauliString& a, const PauliString& b) {
    if (a.n_qubits() != b.n_qubits()) throw UsageError("multiply: qubit count mismatch");
    PauliWord w = xor_words(a.word(), b.word());
    const int e = a.phase_pow() + b.phase_pow() + product_phase_pow(a.word(), b.word(), w);
    return PauliString(a.n_qubits(), std::move(w), e);
}

bool commutes(const PauliString& a, const PauliString& b) {
    if (a.n_qubits() != b.n_qubits()) throw UsageError("commutes: qubit count mismatch");
    int anti = 0;
    for (std::size_t i = 0; i < a.word().x.size(); ++i)
        anti += std::popcount(a.word().x[i] & b.word().z[i]) +
                std::popcount(a.word().z[i] & b.word().x[i]);
    return anti % 2 == 0;
}

PauliSum PauliSum::identity(std::size_t n_qubits) {
    PauliSum p(n_qubits);
    p.add(make_word(n_qubits), 1.0);
    return p;
}

PauliSum PauliSum::single(std::size_t n_qubits, std::size_t q, Letter l, cplx coeff) {
    if (q >= n_qubits) throw UsageError("PauliSum::single: qubit index out of range");
    PauliSum p(n_qubits);
    PauliWord w = make_word(n_qubits);
    set_letter(w, q, l);
    p.add(w, coeff);
    return p;
}

cplx PauliSum::coefficient(const PauliWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? cplx{0, 0} : it->second;
}

void PauliSum::add(const PauliWord& w, cplx coeff) {
    if (w.x.size() != word_count(n_)) throw UsageError("PauliSum::add: word size mismatch");
    auto [it, inserted] = terms_.try_emplace(w, coeff);
    if (!inserted) it->second += coeff;
    if (std::abs(it->second) < kPruneTol) terms_.erase(it);
}

void PauliSum::add(const PauliString& s, cplx scale) {
    if (s.n_qubits() != n_) throw UsageError("PauliSum::add: qubit count mismatch");
    add(s.word(), s.phase() * scale);
}

PauliSum& PauliSum::operator+=(const PauliSum& rhs) {
    if (rhs.n_ != n_) throw UsageError("PauliSum +=: qubit count mismatch");
    for (const auto& [w, c] : rhs.terms_) add(w, c);
    return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& rhs) {
    if (rhs.n_ != n_) throw UsageError("PauliSum -=: qubit count mismatch");
    for (const auto& [w, c] : rhs.terms_) add(w, -c);
    return *this;
}

PauliSum& PauliSum::operator*=(cplx scalar) {
    if (std::abs(scalar) < kPruneTol) {
        terms_.clear();
        return *this;
    }
    for (auto& [w, c] : terms_) c *= scalar;
    return *this;
}

std::string PauliSum::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (!first) os << " + ";
        os << coeff_str(c) << "*" << word_str(w, n_);
        first = false;
    }
    return os.str();
}

PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
PauliSum operator*(cplx scalar, PauliSum a) { return a *= scalar; }
PauliSum operator*(PauliSum a, cplx scalar) { return a *= scalar; }

PauliSum sum_multiply(const PauliSum& a, const PauliSum& b) {
    if (a.n_qubits() != b.n_qubits()) throw UsageError("sum_multiply: qubit count mismatch");
    PauliSum out(a.n_qubits());
    for (const auto& [wa, ca] : a.terms()) {
        for (const auto& [wb, cb] : b.terms()) {
            PauliWord w = xor_words(wa, wb);
            const int e = product_phase_pow(wa, wb, w);
            out.add(w, ca * cb * i_power(e));
        }
    }
    return out;
}

std::set<std::size_t> support(const PauliSum& p) {
    std::set<std::size_t> s;
    std::vector<std::uint64_t> acc(word_count(p.n_qubits()), 0);
    for (const auto& [w, c] : p.terms())
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] |= w.x[i] | w.z[i];
    for (std::size_t q = 0; q < p.n_qubits(); ++q)
        if (acc[q / 64] & (1ull << (q % 64))) s.insert(q);
    return s;
}

bool is_hermitian(const PauliSum& p, double tol) {
    for (const auto& [w, c] : p.terms())
        if (std::abs(c.imag()) > tol) return false;
    return true;
}

double expectation_reference(const PauliSum& p) {
    if (!is_hermitian(p))
        throw NumericError("expectation_reference: sum is not Hermitian: " + p.str());
    double acc = 0;
    for (const auto& [w, c] : p.terms()) {
        bool x_free = true;
        for (auto xw : w.x)
            if (xw) { x_free = false; break; }
        if (x_free) acc += c.real();
    }
    return acc;
}

double max_coeff_delta(const PauliSum& a, const PauliSum& b) {
    if (a.n_qubits() != b.n_qubits()) throw UsageError("max_coeff_delta: qubit count mismatch");
    double m = 0;
    for (const auto& [w, c] : a.terms()) m = std::max(m, std::abs(c - b.coefficient(w)));
    for (const auto& [w, c] : b.terms()) m = std::max(m, std::abs(c - a.coefficient(w)));
    return m;
}

bool approx_equal(const PauliSum& a, const PauliSum& b, double tol) {
    return max_coeff_delta(a, b) <= tol;
}

}  // namespace dh
