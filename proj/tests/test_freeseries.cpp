#include <catch2/catch_amalgamated.hpp>

#include "schurkit/freeseries.hpp"
#include "schurkit/sampling.hpp"

using namespace schurkit;

namespace {

Matrix scalar(Complex v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

FormalSeries random_series(int d, Index rows, Index cols, int max_deg, int n_terms,
                           Rng& rng, bool commutative = false) {
    FormalSeries s(d, rows, cols, commutative);
    for (int i = 0; i < n_terms; ++i) {
        std::vector<int> letters;
        const int len = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_deg + 1)));
        for (int j = 0; j < len; ++j)
            letters.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d))));
        s.add_term(Word(std::move(letters)), rng.gaussian_matrix(rows, cols));
    }
    return s;
}

}  // namespace

TEST_CASE("word transpose reverses and is an involution") {
    CHECK(word_transpose(Word{}) == Word{});
    CHECK(word_transpose(Word{2, 1, 3}) == Word{3, 1, 2});
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        std::vector<int> letters;
        for (std::uint64_t j = 0, n = rng.below(8); j < n; ++j)
            letters.push_back(1 + static_cast<int>(rng.below(3)));
        const Word w(letters);
        CHECK(word_transpose(word_transpose(w)) == w);
    }
}

TEST_CASE("graded-lex word enumeration") {
    // d=2, N=2: empty, (1), (2), (1,1), (1,2), (2,1), (2,2)
    const std::vector<Word> words = words_up_to(2, 2);
    REQUIRE(words.size() == 7);
    CHECK(words[0] == Word{});
    CHECK(words[1] == Word{1});
    CHECK(words[2] == Word{2});
    CHECK(words[3] == Word{1, 1});
    CHECK(words[6] == Word{2, 2});
    for (size_t i = 0; i < words.size(); ++i)
        CHECK(word_index(words[i], 2) == static_cast<Index>(i));
}

TEST_CASE("series_multiply two-term convolution") {
    // (1 + z1) * z2 = z2 + z1 z2
    FormalSeries lhs(2, 1, 1);
    lhs.add_term(Word{}, scalar(1.0));
    lhs.add_term(Word{1}, scalar(1.0));
    FormalSeries rhs(2, 1, 1);
    rhs.add_term(Word{2}, scalar(1.0));
    const FormalSeries prod = series_multiply(lhs, rhs);
    CHECK(prod.coeff(Word{2})(0, 0) == Complex(1.0));
    CHECK(prod.coeff(Word{1, 2})(0, 0) == Complex(1.0));
    CHECK(prod.terms().size() == 2);
}

TEST_CASE("series unit and noncommutativity witness") {
    Rng rng(5);
    const FormalSeries s = random_series(2, 2, 2, 3, 6, rng);
    const FormalSeries one = FormalSeries::constant(2, Matrix::Identity(2, 2));
    const FormalSeries left = series_multiply(one, s);
    const FormalSeries right = series_multiply(s, one);
    for (const auto& [w, c] : s.terms()) {
        CHECK(max_abs(left.coeff(w) - c) < 1e-15);
        CHECK(max_abs(right.coeff(w) - c) < 1e-15);
    }

    FormalSeries z1(2, 1, 1), z2(2, 1, 1);
    z1.add_term(Word{1}, scalar(1.0));
    z2.add_term(Word{2}, scalar(1.0));
    const FormalSeries a = series_multiply(z1, z2);
    const FormalSeries b = series_multiply(z2, z1);
    CHECK(a.coeff(Word{1, 2})(0, 0) == Complex(1.0));
    CHECK(b.coeff(Word{2, 1})(0, 0) == Complex(1.0));
    CHECK(max_abs(a.coeff(Word{2, 1})) == 0.0);
}

TEST_CASE("series_multiply associativity on seeded triples") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const FormalSeries a = random_series(2, 2, 3, 2, 5, rng);
        const FormalSeries b = random_series(2, 3, 2, 2, 5, rng);
        const FormalSeries c = random_series(2, 2, 1, 2, 5, rng);
        const FormalSeries ab_c = series_multiply(series_multiply(a, b), c);
        const FormalSeries a_bc = series_multiply(a, series_multiply(b, c));
        for (const auto& [w, coeff] : ab_c.terms())
            CHECK(max_abs(coeff - a_bc.coeff(w)) < 1e-12);
        CHECK(ab_c.terms().size() == a_bc.terms().size());
    }
}

TEST_CASE("commutative mode canonicalizes to multi-indices") {
    FormalSeries z1(2, 1, 1, true), z2(2, 1, 1, true);
    z1.add_term(Word{1}, scalar(1.0));
    z2.add_term(Word{2}, scalar(1.0));
    const FormalSeries a = series_multiply(z1, z2);
    const FormalSeries b = series_multiply(z2, z1);
    CHECK(a.coeff(Word{2, 1})(0, 0) == Complex(1.0));  // looked up canonically
    CHECK(b.coeff(Word{1, 2})(0, 0) == Complex(1.0));
    CHECK(a.terms().begin()->first == Word{1, 2});
}

TEST_CASE("nc_szego_coeff is the Kronecker delta on words") {
    CHECK(nc_szego_coeff(Word{}, Word{}) == 1.0);
    CHECK(nc_szego_coeff(Word{1, 2}, Word{1, 2}) == 1.0);
    CHECK(nc_szego_coeff(Word{1}, Word{2}) == 0.0);
}

TEST_CASE("fock_norm basics and permutation invariance") {
    FockVector zero = FockVector::zero(2, 2, 1);
    CHECK(fock_norm(zero) == 0.0);

    FockVector f = FockVector::zero(2, 1, 1);
    f.block(Word{}) = Vector::Ones(1);
    f.block(Word{1}) = Vector::Ones(1);
    CHECK_THAT(fock_norm(f), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-15));

    Rng rng(9);
    FockVector g = FockVector::zero(2, 2, 1);
    for (Index i = 0; i < g.coefficients.size(); ++i)
        g.coefficients(i) = rng.complex_normal();
    FockVector permuted = g;
    std::reverse(permuted.coefficients.begin(), permuted.coefficients.end());
    CHECK_THAT(fock_norm(permuted), Catch::Matchers::WithinAbs(fock_norm(g), 1e-13));
}

TEST_CASE("nc_szego_coeff is the reproducing kernel of the monomial basis") {
    const std::vector<Word> words = words_up_to(2, 2);
    for (const Word& alpha : words)
        for (const Word& beta : words) {
            FockVector ea = FockVector::zero(2, 2, 1);
            FockVector eb = FockVector::zero(2, 2, 1);
            ea.block(alpha) = Vector::Ones(1);
            eb.block(beta) = Vector::Ones(1);
            const Complex ip = (eb.coefficients.adjoint() * ea.coefficients)(0);
            CHECK_THAT(ip.real(),
                       Catch::Matchers::WithinAbs(nc_szego_coeff(alpha, beta), 1e-15));
        }
}

TEST_CASE("da_weight exact rationals") {
    CHECK(da_weight({0, 0, 0}) == Rational{1, 1});
    CHECK(da_weight({1, 1}) == Rational{1, 2});
    CHECK(da_weight({2, 1, 0}) == Rational{1, 3});  // 2!/3! = 1/3
    CHECK(da_weight({3}) == Rational{1, 1});
    CHECK(da_weight({2, 2}) == Rational{1, 6});
}

TEST_CASE("shift_matrix: d=1 lower shift, isometry below the cap, orthogonal ranges") {
    const Matrix s1 = shift_matrix(1, 2, 1, 1);
    Matrix expect = Matrix::Zero(3, 3);
    expect(1, 0) = 1.0;
    expect(2, 1) = 1.0;
    CHECK((s1 - expect).norm() == 0.0);

    // S_j* S_j = I on words of length < N
    const int d = 2, cap = 3;
    const Index inner = word_count(d, cap - 1);
    for (int j = 1; j <= d; ++j) {
        const Matrix sj = shift_matrix(j, cap, d, 1);
        const Matrix gram = sj.adjoint() * sj;
        CHECK((gram.topLeftCorner(inner, inner) - Matrix::Identity(inner, inner)).norm() ==
              0.0);
    }
    const Matrix s2 = shift_matrix(2, cap, d, 1);
    CHECK((shift_matrix(1, cap, d, 1).adjoint() * s2).norm() == 0.0);
}

TEST_CASE("mult_operator: unit series and d=1 shift") {
    const FormalSeries one = FormalSeries::constant(2, Matrix::Identity(2, 2));
    const Index dim = word_count(2, 2) * 2;
    CHECK((mult_operator(one, 2) - Matrix::Identity(dim, dim)).norm() == 0.0);

    // multiplication by z on the disk side (d = 1) is the lower shift
    FormalSeries z(1, 1, 1);
    z.add_term(Word{1}, scalar(1.0));
    CHECK((mult_operator(z, 3) - shift_matrix(1, 3, 1, 1)).norm() == 0.0);
}

TEST_CASE("mult_operator of z_j is the word-transpose conjugate of shift_matrix") {
    // Multiplication by z_j prepends the letter; the shift appends it.  The
    // word-transpose permutation exchanges the two conventions.
    const int d = 2, cap = 3;
    const std::vector<Word> words = words_up_to(d, cap);
    const Index nw = static_cast<Index>(words.size());
    Matrix perm = Matrix::Zero(nw, nw);
    for (const Word& w : words) perm(word_index(w.transpose(), d), word_index(w, d)) = 1.0;
    for (int j = 1; j <= d; ++j) {
        FormalSeries zj(d, 1, 1);
        zj.add_term(Word{j}, scalar(1.0));
        const Matrix lhs = mult_operator(zj, cap);
        const Matrix rhs = perm * shift_matrix(j, cap, d, 1) * perm;
        CHECK((lhs - rhs).norm() == 0.0);
    }
}

TEST_CASE("mult_operator agrees with the direct convolution oracle") {
    Rng rng(13);
    const int d = 2, cap = 3;
    for (int trial = 0; trial < 50; ++trial) {
        const FormalSeries s = random_series(d, 2, 3, 2, 6, rng);
        const FormalSeries f = random_series(d, 3, 1, cap, 6, rng);
        const FockVector fv = series_to_fock(f, cap);
        const Vector via_operator = mult_operator(s, cap) * fv.coefficients;
        const FockVector oracle =
            series_to_fock(series_multiply(s, f).truncate(cap), cap);
        CHECK((via_operator - oracle.coefficients).norm() < 1e-12);
    }
}

TEST_CASE("mult_operator truncation-consistent with series products") {
    Rng rng(19);
    const int d = 2, cap = 4;
    const FormalSeries r = random_series(d, 2, 2, 1, 4, rng);
    const FormalSeries s = random_series(d, 2, 2, 2, 4, rng);
    const Matrix product_op = mult_operator(series_multiply(r, s), cap);
    const Matrix composed = mult_operator(r, cap) * mult_operator(s, cap);
    // Exact where no truncation loss: inputs of degree <= cap - deg(r).
    const Index safe = word_count(d, cap - 1) * 2;
    CHECK((product_op.leftCols(safe) - composed.leftCols(safe)).norm() < 1e-12);
}

TEST_CASE("nc_debranges_coeffs closed forms") {
    // constant c: K = (1 - |c|^2) I on the diagonal
    FormalSeries c(2, 1, 1);
    c.add_term(Word{}, scalar(0.6));
    const NcKernelCoeffs kc = nc_debranges_coeffs(c, 2);
    for (const Word& alpha : kc.words)
        for (const Word& beta : kc.words) {
            const Complex v = kc.block(alpha, beta)(0, 0);
            if (alpha == beta)
                CHECK_THAT(v.real(), Catch::Matchers::WithinAbs(1.0 - 0.36, 1e-15));
            else
                CHECK(std::abs(v) == 0.0);
        }

    // S = z1: K_empty = 1, K_(1),(1) = 1 - 1 = 0, off-diagonal 0
    FormalSeries z1(2, 1, 1);
    z1.add_term(Word{1}, scalar(1.0));
    const NcKernelCoeffs kz = nc_debranges_coeffs(z1, 2);
    CHECK_THAT(kz.block(Word{}, Word{})(0, 0).real(),
               Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK(std::abs(kz.block(Word{1}, Word{1})(0, 0)) == 0.0);
    CHECK(std::abs(kz.block(Word{}, Word{1})(0, 0)) == 0.0);
    CHECK_THAT(kz.block(Word{2}, Word{2})(0, 0).real(),
               Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("nc_debranges_coeffs equals I - M_S M_S* blocks (operator oracle)") {
    Rng rng(29);
    const int d = 2, cap = 3;
    for (int trial = 0; trial < 20; ++trial) {
        const Index q = 1 + static_cast<Index>(rng.below(2));
        const FormalSeries s = random_series(d, q, q, 2, 5, rng);
        const Matrix ms = mult_operator(s, cap);
        const Matrix oracle =
            Matrix::Identity(ms.rows(), ms.rows()) - ms * ms.adjoint();
        const NcKernelCoeffs kc = nc_debranges_coeffs(s, cap);
        CHECK((kc.gram - oracle).norm() < 1e-12);
    }
}

TEST_CASE("word count formula") {
    CHECK(word_count(2, 2) == 7);
    CHECK(word_count(3, 2) == 13);
    CHECK(word_count(1, 5) == 6);
}
