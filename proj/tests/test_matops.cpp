#include <catch2/catch_amalgamated.hpp>

#include "schurkit/matops.hpp"
#include "schurkit/sampling.hpp"

using namespace schurkit;

namespace {

Matrix m2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("psd_check on hand-checked 2x2 matrices") {
    // det = 1/3 > 0 and trace > 0: PSD
    CHECK(psd_check(m2(1.0, 1.0, 1.0, 4.0 / 3.0)).is_psd);

    const PsdReport id3 = psd_check(Matrix::Identity(3, 3));
    CHECK(id3.is_psd);
    CHECK_THAT(id3.min_eigenvalue, Catch::Matchers::WithinAbs(1.0, 1e-12));

    // eigenvalues 3 and -1
    const PsdReport indef = psd_check(m2(1.0, 2.0, 2.0, 1.0));
    CHECK_FALSE(indef.is_psd);
    CHECK_THAT(indef.min_eigenvalue, Catch::Matchers::WithinAbs(-1.0, 1e-12));
}

TEST_CASE("psd_check rejects malformed input") {
    CHECK_THROWS_AS(psd_check(Matrix::Zero(2, 3)), ValidationError);
    Matrix skew = m2(0.0, 1.0, -1.0, 0.0);
    CHECK_THROWS_AS(psd_check(skew), ValidationError);
    // complex Hermitian is fine
    CHECK(psd_check(m2(2.0, Complex(0, 1), Complex(0, -1), 2.0)).is_psd);
}

TEST_CASE("psd_check verdict matches on M and its adjoint, spectrum real") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix m = random_psd(5, 3, rng);
        const PsdReport r1 = psd_check(m);
        const PsdReport r2 = psd_check(Matrix(m.adjoint()));
        CHECK(r1.is_psd == r2.is_psd);
        CHECK_THAT(r1.min_eigenvalue, Catch::Matchers::WithinAbs(r2.min_eigenvalue, 1e-12));
    }
}

TEST_CASE("psd_factor on rank-one and identity") {
    const Matrix ones = m2(1.0, 1.0, 1.0, 1.0);
    const Matrix h = psd_factor(ones);
    REQUIRE(h.cols() == 1);  // numerical rank one
    CHECK((ones - h * h.adjoint()).norm() < 1e-12);

    const Matrix hi = psd_factor(Matrix::Identity(4, 4));
    REQUIRE(hi.cols() == 4);
    CHECK((Matrix::Identity(4, 4) - hi * hi.adjoint()).norm() < 1e-12);
}

TEST_CASE("psd_factor reconstructs seeded PSD matrices") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.below(30));
        const Index r = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        const Matrix m = random_psd(n, r, rng);
        const Matrix h = psd_factor(m);
        CHECK((m - h * h.adjoint()).norm() <= 1e-9 * std::max(1.0, m.norm()));
    }
}

TEST_CASE("psd_factor refuses indefinite input and reports the eigenvalue") {
    try {
        psd_factor(m2(1.0, 2.0, 2.0, 1.0));
        FAIL("expected NotPsdError");
    } catch (const NotPsdError& e) {
        CHECK_THAT(e.min_eigenvalue, Catch::Matchers::WithinAbs(-1.0, 1e-12));
    }
}

TEST_CASE("solve_isometry on exact data") {
    const Matrix id = Matrix::Identity(3, 3);
    const IsometryFit same = solve_isometry(id, id);
    CHECK(same.residual < 1e-14);
    CHECK((same.v - id).norm() < 1e-12);

    // swap: domain e1, e2 -> range e2, e1
    Matrix domain(2, 2), range(2, 2);
    domain << 1, 0, 0, 1;
    range << 0, 1, 1, 0;
    const IsometryFit swap = solve_isometry(domain, range);
    CHECK(swap.residual < 1e-14);
    CHECK((swap.v - range).norm() < 1e-12);
}

TEST_CASE("solve_isometry rejects Gram-mismatched data") {
    Matrix domain(1, 1), range(1, 1);
    domain << 1.0;
    range << 2.0;
    try {
        solve_isometry(domain, range);
        FAIL("expected GramMismatchError");
    } catch (const GramMismatchError& e) {
        CHECK(e.max_deviation > 2.9);
    }
}

TEST_CASE("solve_isometry property: small Gram deviation gives small residual") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Index dim = 4 + static_cast<Index>(rng.below(4));
        const Index cols = 1 + static_cast<Index>(rng.below(5));
        const Matrix domain = rng.gaussian_matrix(dim, cols);
        const Matrix q = random_unitary(dim, rng);
        const Matrix range = q * domain;  // exact isometric image
        const double tol = 1e-9;
        const IsometryFit fit = solve_isometry(domain, range, tol);
        CHECK(fit.residual <= 10 * tol * std::max(1.0, max_abs(domain)));
        // V is a partial isometry: singular values in {0, 1}
        Eigen::JacobiSVD<Matrix> svd(fit.v);
        for (Index i = 0; i < svd.singularValues().size(); ++i) {
            const double s = svd.singularValues()(i);
            CHECK((s < 1e-10 || std::abs(s - 1.0) < 1e-10));
        }
    }
}

TEST_CASE("complete_to_unitary on identity-like partial isometries") {
    const Matrix id2 = Matrix::Identity(2, 2);
    CHECK((complete_to_unitary(id2, CompletionMode::kUnitary).u - id2).norm() < 1e-12);

    // e1 -> e1 in C^2: one valid completion is the identity; any completion
    // is unitary
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 1.0;
    const CompletionResult r = complete_to_unitary(v, CompletionMode::kUnitary);
    CHECK((r.u * r.u.adjoint() - id2).norm() < 1e-10);
    CHECK((r.u.adjoint() * r.u - id2).norm() < 1e-10);
    CHECK(std::abs(r.u(0, 0) - Complex(1.0)) < 1e-10);  // agrees on the domain
}

TEST_CASE("complete_to_unitary pads a seeded isometry C^3 -> C^5") {
    Rng rng(5);
    const Matrix v = random_unitary(5, rng).leftCols(3);  // isometry, 5x3
    const CompletionResult r = complete_to_unitary(v, CompletionMode::kUnitary);
    CHECK(r.padded_cols == 2);  // defect padding required, reported
    CHECK(r.padded_rows == 0);
    REQUIRE(r.u.rows() == 5);
    REQUIRE(r.u.cols() == 5);
    CHECK((r.u * r.u.adjoint() - Matrix::Identity(5, 5)).norm() < 1e-10);
    CHECK((r.u.adjoint() * r.u - Matrix::Identity(5, 5)).norm() < 1e-10);
    CHECK((r.u.leftCols(3) - v).norm() < 1e-9);
}

TEST_CASE("complete_to_unitary coisometric mode over seeded partial isometries") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const Index rows = 2 + static_cast<Index>(rng.below(4));
        const Index cols = rows + static_cast<Index>(rng.below(3));
        const Index rank = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(rows)));
        // random partial isometry of the given rank
        const Matrix left = random_unitary(rows, rng).leftCols(rank);
        const Matrix right = random_unitary(cols, rng).leftCols(rank);
        const Matrix v = left * right.adjoint();
        const CompletionResult r = complete_to_unitary(v, CompletionMode::kCoisometric);
        CHECK(r.padded_cols == 0);
        CHECK((r.u * r.u.adjoint() - Matrix::Identity(rows, rows)).norm() < 1e-10);
        // agreement on the initial space
        CHECK(((r.u - v) * right).norm() < 1e-9);
    }
}

TEST_CASE("complete_to_unitary rejects non-partial-isometries") {
    CHECK_THROWS_AS(complete_to_unitary(0.5 * Matrix::Identity(2, 2)), ValidationError);
}
