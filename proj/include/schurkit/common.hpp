/**
 * @file common.hpp
 * @brief Shared scalar types, error hierarchy and deterministic RNG for schurkit.
 *
 * Everything in the library works on dense complex matrices (Eigen::MatrixXcd).
 * Complex numbers are treated as ordered (re, im) pairs of doubles everywhere,
 * including serialization, so results round-trip bit-exactly.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace schurkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default relative tolerance used across PSD tests, rank cuts and isometry fits.
inline constexpr double kDefaultTol = 1e-9;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: shape mismatch, broken invariant, bad field.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation point on or outside the admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A matrix required to be PSD is indefinite; carries the offending eigenvalue.
class NotPsdError : public Error {
public:
    NotPsdError(const std::string& what, double min_eig)
        : Error(what), min_eigenvalue(min_eig) {}
    double min_eigenvalue;
};

/// Gram matrices of domain and range columns disagree beyond tolerance,
/// i.e. the data does not admit an isometric matching.
class GramMismatchError : public Error {
public:
    GramMismatchError(const std::string& what, double dev)
        : Error(what), max_deviation(dev) {}
    double max_deviation;
};

/// Sample data is not consistent with Schur-class membership.
class NotSchurError : public Error {
public:
    NotSchurError(const std::string& what, double dev)
        : Error(what), deviation(dev) {}
    double deviation;
};

/// Operator argument is not a strict (row) contraction.
class StrictnessError : public Error {
public:
    StrictnessError(const std::string& what, double norm)
        : Error(what), row_norm(norm) {}
    double row_norm;
};

/// I - Z(z)A (or a time-varying analogue) is numerically singular.
class ResolventError : public Error {
public:
    ResolventError(const std::string& what, double cond)
        : Error(what), condition_estimate(cond) {}
    double condition_estimate;
};

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

/**
 * Seeded generator with hand-rolled Box-Muller normals.
 *
 * std::normal_distribution is implementation-defined; rolling our own on top
 * of the fully specified mt19937_64 keeps seeded streams identical across
 * standard libraries, which the CLI report determinism contract relies on.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        // 53 random bits -> double in [0,1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Standard complex normal (independent re/im, variance 1/2 each).
    Complex complex_normal() {
        const double re = normal();
        const double im = normal();
        return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    /// Matrix with iid standard complex normal entries.
    Matrix gaussian_matrix(Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
        return m;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// Largest absolute entry; 0 for empty matrices.
inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Frobenius distance ||a - b||_F; shapes must agree.
inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    return (a - b).norm();
}

/// Largest singular value; 0 for empty matrices.
inline double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// Kronecker product, coefficient-major block layout.
inline Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

/// True if every entry is finite.
inline bool all_finite(const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            const Complex v = m(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
    return true;
}

}  // namespace schurkit
