#include <catch2/catch_amalgamated.hpp>

#include "schurkit/realization.hpp"
#include "schurkit/sampling.hpp"

using namespace schurkit;

namespace {

Matrix scalar(Complex v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

/// Blaschke factor colligation for a real parameter a: S(z) = (z - a)/(1 - a z).
Colligation blaschke(double a) {
    const double s = std::sqrt(1.0 - a * a);
    return Colligation(1, scalar(a), scalar(s), scalar(s), scalar(-a),
                       Flavor::kUnitary);
}

/// Taylor coefficients of eval_disk via trapezoid quadrature on |z| = r
/// (independent oracle for the d=1 coefficient correspondence).
std::vector<Matrix> taylor_by_quadrature(const Colligation& u, int count, double r,
                                         int nodes) {
    std::vector<Matrix> coeffs;
    std::vector<Matrix> samples;
    samples.reserve(static_cast<size_t>(nodes));
    for (int m = 0; m < nodes; ++m) {
        const double theta = 2.0 * M_PI * m / nodes;
        samples.push_back(eval_disk(u, Complex(r * std::cos(theta), r * std::sin(theta))));
    }
    for (int n = 0; n < count; ++n) {
        Matrix acc = Matrix::Zero(u.output_dim(), u.input_dim());
        for (int m = 0; m < nodes; ++m) {
            const double theta = 2.0 * M_PI * m / nodes;
            acc += samples[static_cast<size_t>(m)] *
                   std::exp(Complex(0.0, -theta * n));
        }
        coeffs.push_back(acc / (static_cast<double>(nodes) * std::pow(r, n)));
    }
    return coeffs;
}

}  // namespace

TEST_CASE("Colligation validation enforces the claimed flavor") {
    CHECK_THROWS_AS(Colligation(1, scalar(0.9), scalar(0.9), scalar(0.9), scalar(0.9),
                                Flavor::kCoisometric),
                    ValidationError);
    CHECK_NOTHROW(Colligation(1, scalar(0.5), scalar(0.5), scalar(0.5), scalar(0.5),
                              Flavor::kContractive));
}

TEST_CASE("eval_disk closed forms") {
    // A=0, B=C=1, D=0: S(z) = z (bit-exact)
    const Colligation shift(1, scalar(0.0), scalar(1.0), scalar(1.0), scalar(0.0),
                            Flavor::kUnitary);
    const Complex z(0.3, -0.4);
    CHECK(eval_disk(shift, z)(0, 0) == z);

    // Blaschke with a = 0.5
    const Colligation b = blaschke(0.5);
    CHECK_THAT(eval_disk(b, 0.0)(0, 0).real(), Catch::Matchers::WithinAbs(-0.5, 1e-15));
    Rng rng(3);
    for (Complex w : random_points_disk(20, rng)) {
        const Complex expect = (w - 0.5) / (1.0 - 0.5 * w);
        CHECK(std::abs(eval_disk(b, w)(0, 0) - expect) < 1e-14);
    }

    // D-only colligation (n = 0): S == D exactly
    const Matrix d_val = scalar(Complex(0.25, 0.1));
    const Colligation constant(1, Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), d_val,
                               Flavor::kContractive);
    CHECK(eval_disk(constant, z) == d_val);

    CHECK_THROWS_AS(eval_disk(b, Complex(1.0, 0.0)), DomainError);
}

TEST_CASE("eval_ball closed forms and d=1 cross-check") {
    // d=2, n=1, A=0: S(z) = 0.5 (z1 b1 + z2 b2)
    Matrix a = Matrix::Zero(2, 1);
    Matrix b(2, 1);
    b << 0.3, 0.4;
    const Colligation lin(2, a, b, scalar(1.0) * 0.5, scalar(0.0),
                          Flavor::kContractive);
    Vector z(2);
    z << Complex(0.1, 0.2), Complex(-0.3, 0.1);
    const Complex expect = 0.5 * (z(0) * 0.3 + z(1) * 0.4);
    CHECK(std::abs(eval_ball(lin, z)(0, 0) - expect) < 1e-15);

    // d=1 ball evaluation equals disk evaluation
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Colligation u = random_unitary_colligation(1, 3, 2, rng);
        const Complex w = random_points_disk(1, rng)[0];
        Vector pt(1);
        pt(0) = w;
        CHECK(max_abs(eval_ball(u, pt) - eval_disk(u, w)) == 0.0);
    }
}

TEST_CASE("free_transfer_coeffs closed forms") {
    Rng rng(7);
    // A=0: s_empty = D, s_(j) = C B_j, longer words vanish
    const Index n = 2, p = 2, q = 2;
    Matrix a = Matrix::Zero(2 * n, n);
    const Matrix b = rng.gaussian_matrix(2 * n, p);
    const Matrix c = rng.gaussian_matrix(q, n);
    const Matrix d = rng.gaussian_matrix(q, p);
    const Colligation u(2, a, 0.1 * b, 0.1 * c, 0.1 * d, Flavor::kContractive);
    const FormalSeries s = free_transfer_coeffs(u, 3);
    CHECK(max_abs(s.coeff(Word{}) - 0.1 * d) == 0.0);
    for (int j = 1; j <= 2; ++j)
        CHECK(max_abs(s.coeff(Word{j}) - 0.01 * c * b.middleRows((j - 1) * n, n)) <
              1e-15);
    CHECK(max_abs(s.coeff(Word{1, 2})) == 0.0);
    CHECK(max_abs(s.coeff(Word{2, 2, 1})) == 0.0);
}

TEST_CASE("free_transfer_coeffs d=1 matches quadrature Taylor coefficients") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const Colligation u = random_unitary_colligation(1, 4, 2, rng);
        const FormalSeries s = free_transfer_coeffs(u, 6);
        const std::vector<Matrix> oracle = taylor_by_quadrature(u, 7, 0.5, 256);
        for (int n = 0; n <= 6; ++n) {
            std::vector<int> letters(static_cast<size_t>(n), 1);
            CHECK(max_abs(s.coeff(Word(letters)) - oracle[static_cast<size_t>(n)]) <
                  1e-9);
        }
    }
}

TEST_CASE("kernel_identity_check closed forms") {
    Rng rng(13);
    const auto grid = random_points_disk(10, rng, 0.9);

    // Blaschke a = 0.5: identity to machine precision on a 10x10 pair grid
    CHECK(kernel_identity_check(blaschke(0.5), grid) < 1e-12);

    // S(z) = z colligation
    const Colligation shift(1, scalar(0.0), scalar(1.0), scalar(1.0), scalar(0.0),
                            Flavor::kUnitary);
    CHECK(kernel_identity_check(shift, grid) < 1e-12);

    // non-coisometric colligation: deviation reported, no exception
    const Colligation lossy(1, scalar(0.5), scalar(0.5), scalar(0.5), scalar(0.5),
                            Flavor::kContractive);
    CHECK(kernel_identity_check(lossy, grid) > 1e-3);
}

TEST_CASE("kernel_identity_check on seeded coisometric colligations") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = rng.below(7);
        const Index q = 1 + static_cast<Index>(rng.below(3));
        const Colligation u = random_unitary_colligation(1, n, q, rng);
        CHECK(kernel_identity_check(u, random_points_disk(10, rng, 0.9)) <= 1e-10);
    }
}

TEST_CASE("realized functions are Schur: contractive values inside the ball") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(3));
        const Index n = rng.below(5);
        const Index q = 1 + static_cast<Index>(rng.below(3));
        const Colligation u = random_unitary_colligation(d, n, q, rng);
        for (const Vector& z : random_points_ball(d, 5, rng))
            CHECK(operator_norm(eval_ball(u, z)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("lurking_isometry_disk recovers S(z) = z") {
    const std::vector<Complex> pts = {0.0, 0.3, Complex(0.0, -0.4), Complex(0.2, 0.2)};
    std::vector<Matrix> vals;
    for (Complex z : pts) vals.push_back(scalar(z));
    HeldoutSpec heldout;
    heldout.oracle = [](const Vector& z) { return scalar(z(0)); };
    const RealizationResult r = lurking_isometry_disk(pts, vals, 1e-9, heldout);
    CHECK(r.fit_residual <= 1e-8);
    CHECK(r.heldout_residual <= 1e-6);
    CHECK(r.colligation.flavor() == Flavor::kCoisometric);
    CHECK(r.gram_rank == 1);  // K_S of S(z)=z is the constant kernel
}

TEST_CASE("lurking_isometry_disk on a constant") {
    const std::vector<Complex> pts = {0.0, 0.2, Complex(-0.1, 0.3)};
    const Complex c(0.3, -0.5);
    std::vector<Matrix> vals(3, scalar(c));
    HeldoutSpec heldout;
    heldout.oracle = [&](const Vector&) { return scalar(c); };
    const RealizationResult r = lurking_isometry_disk(pts, vals, 1e-9, heldout);
    CHECK(r.heldout_residual <= 1e-8);
}

TEST_CASE("lurking_isometry_disk recovers the Blaschke factor from 6 samples") {
    Rng rng(23);
    const auto pts = random_points_disk(6, rng, 0.8);
    std::vector<Matrix> vals;
    for (Complex z : pts) vals.push_back(scalar((z - 0.5) / (1.0 - 0.5 * z)));
    HeldoutSpec heldout;
    heldout.oracle = [](const Vector& z) {
        return scalar((z(0) - 0.5) / (1.0 - 0.5 * z(0)));
    };
    const RealizationResult r = lurking_isometry_disk(pts, vals, 1e-9, heldout);
    CHECK(r.heldout_residual <= 1e-6);
}

TEST_CASE("lurking_isometry_disk refuses non-Schur samples") {
    const std::vector<Complex> pts = {0.0, 0.3};
    std::vector<Matrix> vals(2, scalar(2.0));  // constant 2
    CHECK_THROWS_AS(lurking_isometry_disk(pts, vals), NotSchurError);
}

TEST_CASE("disk round-trip law on seeded coisometric colligations") {
    Rng rng(29);
    int failures = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = rng.below(7);
        const Index q = 1 + static_cast<Index>(rng.below(3));
        const Colligation u = random_unitary_colligation(1, n, q, rng);
        const auto pts = random_points_disk(2 * static_cast<size_t>(n) + 4, rng);
        std::vector<Matrix> vals;
        for (Complex z : pts) vals.push_back(eval_disk(u, z));
        HeldoutSpec heldout;
        heldout.oracle = [&](const Vector& z) { return eval_disk(u, z(0)); };
        heldout.seed = static_cast<std::uint64_t>(trial);
        const RealizationResult r = lurking_isometry_disk(pts, vals, 1e-9, heldout);
        if (r.heldout_residual > 1e-6) ++failures;
        CHECK(r.gram_rank <= n);  // state-dimension economy
    }
    CHECK(failures == 0);
}

TEST_CASE("lurking_isometry_ball: linear symbol and d=1 agreement") {
    // S(z) = (z1 + z2)/sqrt(2) has multiplier norm exactly 1 and no finite
    // coisometric realization; the synthesis interpolates the samples and the
    // held-out residual honestly reports the interpolation slack, which
    // shrinks with the sample count.
    Rng rng(31);
    double previous = 1.0;
    for (size_t count : {10, 24, 48}) {
        Rng local(31);
        const auto pts = random_points_ball(2, count, local, 0.8);
        std::vector<Matrix> vals;
        for (const Vector& z : pts) vals.push_back(scalar((z(0) + z(1)) * M_SQRT1_2));
        HeldoutSpec heldout;
        heldout.oracle = [](const Vector& z) {
            return scalar((z(0) + z(1)) * M_SQRT1_2);
        };
        const RealizationResult r = lurking_isometry_ball(pts, vals, 1e-9, heldout);
        CHECK(r.fit_residual <= 1e-6);
        CHECK(r.colligation.flavor() == Flavor::kContractive);
        CHECK(r.heldout_residual < previous);
        previous = r.heldout_residual;
    }
    CHECK(previous <= 1e-3);

    // d=1 pipelines agree
    const auto dpts = random_points_disk(8, rng, 0.8);
    std::vector<Vector> bpts;
    std::vector<Matrix> dvals;
    for (Complex z : dpts) {
        Vector v(1);
        v(0) = z;
        bpts.push_back(v);
        dvals.push_back(scalar((z - 0.5) / (1.0 - 0.5 * z)));
    }
    HeldoutSpec oracle1;
    oracle1.oracle = [](const Vector& z) {
        return scalar((z(0) - 0.5) / (1.0 - 0.5 * z(0)));
    };
    const RealizationResult via_ball = lurking_isometry_ball(bpts, dvals, 1e-9, oracle1);
    const RealizationResult via_disk = lurking_isometry_disk(dpts, dvals, 1e-9, oracle1);
    CHECK(via_ball.heldout_residual <= 1e-6);
    CHECK(via_disk.heldout_residual <= 1e-6);
}

TEST_CASE("ball round-trip on seeded coisometric colligations, d in {2,3}") {
    Rng rng(37);
    for (int d : {2, 3}) {
        int failures = 0;
        for (int trial = 0; trial < 15; ++trial) {
            const Index n = rng.below(4);
            const Index q = 1 + static_cast<Index>(rng.below(2));
            const Colligation u = random_unitary_colligation(d, n, q, rng);
            const auto pts = random_points_ball(d, 14, rng);
            std::vector<Matrix> vals;
            for (const Vector& z : pts) vals.push_back(eval_ball(u, z));
            HeldoutSpec heldout;
            heldout.oracle = [&](const Vector& z) { return eval_ball(u, z); };
            heldout.seed = static_cast<std::uint64_t>(trial);
            const RealizationResult r = lurking_isometry_ball(pts, vals, 1e-9, heldout);
            if (r.heldout_residual > 1e-6) ++failures;
        }
        CHECK(failures == 0);
    }
}

TEST_CASE("lurking_isometry_free closed forms") {
    // S = z1 over d=2
    FormalSeries z1(2, 1, 1);
    z1.add_term(Word{1}, scalar(1.0));
    const RealizationResult r = lurking_isometry_free(z1, 3);
    CHECK(r.fit_residual <= 1e-8);

    // constant: D = c with a trivial state
    FormalSeries c(2, 1, 1);
    c.add_term(Word{}, scalar(Complex(0.2, 0.4)));
    const RealizationResult rc = lurking_isometry_free(c, 2);
    CHECK(rc.fit_residual <= 1e-10);
    CHECK(max_abs(rc.colligation.d_block() - scalar(Complex(0.2, 0.4))) < 1e-10);
}

TEST_CASE("free round-trip on seeded coisometric free colligations") {
    Rng rng(41);
    for (int trial = 0; trial < 15; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.below(4));
        const Index q = 1 + static_cast<Index>(rng.below(2));
        const Colligation u = random_unitary_colligation(2, n, q, rng);
        const FormalSeries s = free_transfer_coeffs(u, 4);
        const RealizationResult r = lurking_isometry_free(s, 4, 1e-9);
        CHECK(r.fit_residual <= 1e-7);
    }
}

TEST_CASE("lurking_isometry_free refuses expansive series") {
    FormalSeries big(2, 1, 1);
    big.add_term(Word{}, scalar(2.0));
    CHECK_THROWS_AS(lurking_isometry_free(big, 2), NotSchurError);
}

TEST_CASE("tensored_realization inflates the Blaschke colligation") {
    const TensoredRealization tr = tensored_realization(blaschke(0.5), 2);
    CHECK(tr.module_map_deviation <= 1e-12);
    const auto [co, iso] = tr.colligation.flavor_residuals();
    CHECK(co <= 1e-12);
    CHECK(tr.colligation.state_dim() == 2);
    REQUIRE(tr.pi.size() == 4);

    // m = 1 is the identity transformation
    const TensoredRealization id = tensored_realization(blaschke(0.3), 1);
    CHECK(max_abs(id.colligation.connecting_operator() -
                  blaschke(0.3).connecting_operator()) == 0.0);

    // a perturbed (non-tensored) colligation reports a positive deviation
    Rng rng(43);
    const Colligation perturbed = random_unitary_colligation(1, 2, 2, rng);
    CHECK(tensored_module_map_deviation(perturbed, 2) > 1e-3);
}
