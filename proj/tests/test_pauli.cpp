#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "dh/errors.hpp"
#include "dh/pauli.hpp"

using namespace dh;

namespace {

cplx coeff(const PauliSum& p, const std::string& letters) {
    return p.coefficient(word_from_str(letters));
}

Eigen::MatrixXcd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::MatrixXcd out(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    return out;
}

}  // namespace

TEST_CASE("letter get/set round-trips through the packed word") {
    PauliWord w = make_word(70);  // spans two 64-bit limbs
    for (std::size_t q : {0ul, 1ul, 63ul, 64ul, 69ul}) {
        for (Letter l : {Letter::I, Letter::X, Letter::Y, Letter::Z}) {
            set_letter(w, q, l);
            CHECK(get_letter(w, q) == l);
        }
        set_letter(w, q, Letter::I);
    }
    CHECK(is_identity_word(w));
}

TEST_CASE("word_str and word_from_str are inverse, qubit 0 leftmost") {
    const PauliWord w = word_from_str("XIZY");
    CHECK(get_letter(w, 0) == Letter::X);
    CHECK(get_letter(w, 1) == Letter::I);
    CHECK(get_letter(w, 2) == Letter::Z);
    CHECK(get_letter(w, 3) == Letter::Y);
    CHECK(word_str(w, 4) == "XIZY");
    CHECK_THROWS_AS(word_from_str("XQ"), UsageError);
}

TEST_CASE("single-qubit multiplication table with phases") {
    auto ps = [](Letter l) { return PauliString::single(1, 0, l); };
    struct Row {
        Letter a, b, out;
        int phase;
    };
    // sigma_a sigma_b = i^phase sigma_out
    const Row rows[] = {
        {Letter::X, Letter::Y, Letter::Z, 1},  {Letter::Y, Letter::X, Letter::Z, 3},
        {Letter::Y, Letter::Z, Letter::X, 1},  {Letter::Z, Letter::Y, Letter::X, 3},
        {Letter::Z, Letter::X, Letter::Y, 1},  {Letter::X, Letter::Z, Letter::Y, 3},
        {Letter::X, Letter::X, Letter::I, 0},  {Letter::Y, Letter::Y, Letter::I, 0},
        {Letter::Z, Letter::Z, Letter::I, 0},  {Letter::I, Letter::Y, Letter::Y, 0},
    };
    for (const auto& r : rows) {
        const PauliString prod = multiply(ps(r.a), ps(r.b));
        CHECK(prod.letter(0) == r.out);
        CHECK(prod.phase_pow() == r.phase);
    }
}

TEST_CASE("multi-qubit products match the dense matrix algebra") {
    // Exhaustive over all two-letter words: phases from per-site products must
    // combine exactly as the 4x4 matrices do.
    const Letter ls[] = {Letter::I, Letter::X, Letter::Y, Letter::Z};
    for (Letter a0 : ls)
        for (Letter a1 : ls)
            for (Letter b0 : ls)
                for (Letter b1 : ls) {
                    PauliWord wa = make_word(2), wb = make_word(2);
                    set_letter(wa, 0, a0);
                    set_letter(wa, 1, a1);
                    set_letter(wb, 0, b0);
                    set_letter(wb, 1, b1);
                    const PauliString prod =
                        multiply(PauliString(2, wa), PauliString(2, wb));
                    const Eigen::MatrixXcd lhs =
                        kron2(pauli_letter_matrix(a0), pauli_letter_matrix(a1)) *
                        kron2(pauli_letter_matrix(b0), pauli_letter_matrix(b1));
                    const Eigen::MatrixXcd rhs =
                        prod.phase() * kron2(pauli_letter_matrix(prod.letter(0)),
                                             pauli_letter_matrix(prod.letter(1)));
                    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
                }
}

TEST_CASE("commutation predicate") {
    auto str = [](const std::string& s) { return PauliString::parse(s); };
    CHECK_FALSE(commutes(str("X"), str("Z")));
    CHECK(commutes(str("X"), str("X")));
    CHECK(commutes(str("XX"), str("ZZ")));  // two anticommuting sites: even
    CHECK(commutes(str("XI"), str("IZ")));  // disjoint support
    CHECK(commutes(str("XXX"), str("ZZI")));   // two anticommuting sites again
    CHECK_FALSE(commutes(str("XXX"), str("ZII")));  // single anticommuting site
}

TEST_CASE("PauliString parse/str round-trip and phases") {
    for (const char* text : {"XIZ", "-XIZ", "iYY", "-iZI"}) {
        const PauliString p = PauliString::parse(text);
        CHECK(PauliString::parse(p.str()) == p);
    }
    CHECK(PauliString::parse("iY").phase() == cplx(0, 1));
    CHECK(PauliString::parse("-Z").phase() == cplx(-1, 0));
    CHECK_THROWS_AS(PauliString::parse(""), UsageError);
}

TEST_CASE("PauliSum merge prunes cancelled and sub-tolerance terms") {
    PauliSum p(2);
    p.add(word_from_str("XZ"), 0.5);
    p.add(word_from_str("XZ"), -0.5);
    CHECK(p.empty());
    p.add(word_from_str("YY"), 1e-13);  // below kPruneTol
    CHECK(p.empty());
    p.add(word_from_str("YY"), 1.0);
    p.add(word_from_str("YY"), 1e-13);  // merge keeps the big coefficient
    CHECK(p.term_count() == 1);
}

TEST_CASE("string phases fold into sum coefficients") {
    PauliSum p(1);
    p.add(PauliString::parse("iY"), 2.0);
    CHECK(std::abs(coeff(p, "Y") - cplx(0, 2)) < 1e-15);
}

TEST_CASE("sum arithmetic") {
    const PauliSum x = PauliSum::single(1, 0, Letter::X);
    const PauliSum z = PauliSum::single(1, 0, Letter::Z);
    PauliSum p = 2.0 * x + z;
    p -= z;
    p *= cplx(0.5, 0.0);
    CHECK(p == x);
}

TEST_CASE("derived product: (II+XX)/2 times (II+ZZ)/2") {
    PauliSum a(2), b(2);
    a.add(make_word(2), 0.5);
    a.add(word_from_str("XX"), 0.5);
    b.add(make_word(2), 0.5);
    b.add(word_from_str("ZZ"), 0.5);
    const PauliSum prod = sum_multiply(a, b);
    CHECK(prod.term_count() == 4);
    CHECK(std::abs(coeff(prod, "II") - 0.25) < 1e-15);
    CHECK(std::abs(coeff(prod, "XX") - 0.25) < 1e-15);
    CHECK(std::abs(coeff(prod, "ZZ") - 0.25) < 1e-15);
    CHECK(std::abs(coeff(prod, "YY") - (-0.25)) < 1e-15);  // XX*ZZ = (-iY)(-iY) = -YY
}

TEST_CASE("sum_multiply rejects width mismatch") {
    CHECK_THROWS_AS(sum_multiply(PauliSum::identity(1), PauliSum::identity(2)), UsageError);
}

TEST_CASE("support collects non-identity sites") {
    PauliSum p(3);
    p.add(word_from_str("ZIX"), 1.0);
    p.add(word_from_str("IIY"), 0.5);
    CHECK(support(p) == std::set<std::size_t>{0, 2});
    CHECK(support(PauliSum::identity(3)).empty());
}

TEST_CASE("hermiticity is realness of folded coefficients") {
    PauliSum p(1);
    p.add(word_from_str("X"), 1.0);
    p.add(word_from_str("Y"), -2.0);
    CHECK(is_hermitian(p));
    p.add(word_from_str("Z"), cplx(0.0, 0.5));
    CHECK_FALSE(is_hermitian(p));
}

TEST_CASE("reference expectation keeps only I/Z-supported terms") {
    PauliSum p(2);
    p.add(word_from_str("ZI"), 0.3);
    p.add(word_from_str("IZ"), 0.2);
    p.add(word_from_str("ZZ"), 0.1);
    p.add(word_from_str("XX"), 5.0);   // no contribution
    p.add(word_from_str("ZY"), -2.0);  // no contribution
    CHECK(expectation_reference(p) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(expectation_reference(PauliSum::identity(2)) == doctest::Approx(1.0));

    PauliSum bad(1);
    bad.add(word_from_str("Z"), cplx(0.0, 1.0));
    CHECK_THROWS_AS(expectation_reference(bad), NumericError);
}

TEST_CASE("coefficient deltas and approximate equality") {
    const PauliSum x = PauliSum::single(1, 0, Letter::X);
    CHECK(max_coeff_delta(x, 0.75 * x) == doctest::Approx(0.25));
    const PauliSum z = PauliSum::single(1, 0, Letter::Z);
    CHECK(max_coeff_delta(x, z) == doctest::Approx(1.0));  // union of term sets
    CHECK(approx_equal(x, 0.75 * x, 0.3));
    CHECK_FALSE(approx_equal(x, 0.75 * x, 0.2));
}

TEST_CASE("letter matrices are the textbook Paulis") {
    const Eigen::Matrix2cd x = pauli_letter_matrix(Letter::X);
    const Eigen::Matrix2cd y = pauli_letter_matrix(Letter::Y);
    const Eigen::Matrix2cd z = pauli_letter_matrix(Letter::Z);
    CHECK(std::abs(x(0, 1) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(y(0, 1) - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(z(1, 1) - cplx(-1, 0)) < 1e-15);
    CHECK((x * y - cplx(0, 1) * z).cwiseAbs().maxCoeff() < 1e-15);
}
