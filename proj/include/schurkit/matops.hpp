/**
 * @file matops.hpp
 * @brief Dense complex linear algebra substrate: PSD certification,
 *        Kolmogorov-style factorization, isometry solving and unitary /
 *        coisometric completion.
 *
 * Tolerance semantics are relative to the largest eigenvalue (or singular
 * value) with floor 1, so kernels of widely varying magnitude behave the
 * same.  Rank cuts keep eigenvalues strictly above tol * lambda_max and sort
 * descending, which makes every rank decision deterministic.
 */

#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "schurkit/common.hpp"

namespace schurkit {

/// Verdict of a PSD test.  is_psd <=> min_eigenvalue >= -tolerance_used,
/// where tolerance_used = tol * max(1, lambda_max).
struct PsdReport {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
    double tolerance_used = 0.0;
};

namespace detail {

inline void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": matrix must be square, got " << m.rows() << "x" << m.cols();
        throw ValidationError(os.str());
    }
}

/// Hermitian within 1e-12 relative to max(1, largest entry magnitude).
inline void require_hermitian(const Matrix& m, const char* who) {
    require_square(m, who);
    const double dev = max_abs(m - m.adjoint());
    const double scale = std::max(1.0, max_abs(m));
    if (dev > 1e-12 * scale) {
        std::ostringstream os;
        os << who << ": matrix is not Hermitian, ||M - M*||_max = " << dev
           << " exceeds 1e-12 * " << scale;
        throw ValidationError(os.str());
    }
}

/// Eigen-decomposition of the Hermitian part, eigenvalues descending.
inline void hermitian_eigen(const Matrix& m, RealVector& evals, Matrix& evecs) {
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw ValidationError("hermitian_eigen: eigensolver failed to converge");
    // SelfAdjointEigenSolver sorts ascending; flip to descending.
    const Index n = sym.rows();
    evals.resize(n);
    evecs.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        evals(i) = solver.eigenvalues()(n - 1 - i);
        evecs.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
}

/// Eigen-based factor of a PSD Gram with an absolute tolerance floor:
/// eigenvalues <= tol * max(1, lambda_max) count as numerical zero.  Kernel
/// Grams of Schur-class data have O(1) intrinsic scale, so the floor keeps
/// noise eigenvalues of identically-zero kernels out of synthesized state
/// spaces.
struct FactorDecision {
    Matrix h;
    Index rank = 0;
    double lambda_max = 0.0;
    double kept_min = 0.0;
    double dropped_max = 0.0;
};

inline FactorDecision floored_factor(const Matrix& gram, double tol) {
    if (gram.rows() == 0) {
        FactorDecision empty;
        empty.h = Matrix(0, 0);
        return empty;
    }
    RealVector evals;
    Matrix evecs;
    hermitian_eigen(gram, evals, evecs);
    const double lambda_max = evals.size() > 0 ? evals(0) : 0.0;
    const double floor = tol * std::max(1.0, lambda_max);
    FactorDecision out;
    out.lambda_max = lambda_max;
    while (out.rank < evals.size() && evals(out.rank) > floor) ++out.rank;
    out.h.resize(gram.rows(), out.rank);
    for (Index j = 0; j < out.rank; ++j)
        out.h.col(j) = evecs.col(j) * std::sqrt(evals(j));
    out.kept_min = out.rank > 0 ? evals(out.rank - 1) : 0.0;
    out.dropped_max = out.rank < evals.size() ? evals(out.rank) : 0.0;
    return out;
}

}  // namespace detail

/**
 * PSD test for a Hermitian matrix.
 *
 * is_psd is true iff every eigenvalue is >= -tol * max(1, lambda_max).
 * Throws ValidationError for non-square or non-Hermitian input (the message
 * names the violated symmetry bound).
 */
inline PsdReport psd_check(const Matrix& m, double tol = kDefaultTol) {
    detail::require_hermitian(m, "psd_check");
    PsdReport report;
    if (m.rows() == 0) {
        report.is_psd = true;
        report.min_eigenvalue = 0.0;
        report.tolerance_used = tol;
        return report;
    }
    RealVector evals;
    Matrix evecs;
    detail::hermitian_eigen(m, evals, evecs);
    const double lambda_max = evals(0);
    report.min_eigenvalue = evals(evals.size() - 1);
    report.tolerance_used = tol * std::max(1.0, lambda_max);
    report.is_psd = report.min_eigenvalue >= -report.tolerance_used;
    return report;
}

/**
 * Kolmogorov-style factor of a PSD matrix: returns H with M ~= H H* and
 * cols(H) equal to the numerical rank (eigenvalues > tol * lambda_max kept,
 * descending).  Throws NotPsdError when the input is indefinite at tol.
 */
inline Matrix psd_factor(const Matrix& m, double tol = kDefaultTol) {
    detail::require_hermitian(m, "psd_factor");
    if (m.rows() == 0) return Matrix(0, 0);
    RealVector evals;
    Matrix evecs;
    detail::hermitian_eigen(m, evals, evecs);
    const double lambda_max = evals(0);
    const double floor = tol * std::max(1.0, lambda_max);
    if (evals(evals.size() - 1) < -floor) {
        std::ostringstream os;
        os << "psd_factor: matrix is indefinite, min eigenvalue "
           << evals(evals.size() - 1);
        throw NotPsdError(os.str(), evals(evals.size() - 1));
    }
    Index rank = 0;
    while (rank < evals.size() && evals(rank) > tol * std::max(0.0, lambda_max) &&
           evals(rank) > 0.0)
        ++rank;
    Matrix h(m.rows(), rank);
    for (Index j = 0; j < rank; ++j) h.col(j) = evecs.col(j) * std::sqrt(evals(j));
    return h;
}

/// Result of matching domain columns onto range columns by a partial isometry.
struct IsometryFit {
    Matrix v;               ///< range_dim x domain_dim partial isometry
    double residual = 0.0;  ///< max_j || V d_j - r_j ||_2
    Index rank = 0;         ///< dimension of span(domain columns) kept
    double gram_deviation = 0.0;
};

/**
 * Solve for the lurking isometry: V maps each domain column to the matching
 * range column and is an isometry on span(domain).
 *
 * Requires Gram(domain) = Gram(range) within tol * max(1, gram magnitude);
 * a larger mismatch throws GramMismatchError carrying the max deviation
 * (for kernel data this signals that the sample is not in the Schur class).
 *
 * Domain and range spans are orthonormalized independently via SVD and the
 * aligning factor is re-polarized, so the returned V is a partial isometry
 * to machine precision even when the Gram identity only holds to tol.
 *
 * rank_tol controls the relative singular-value cut of the domain span;
 * it defaults to tol (callers that inflate the Gram gate keep a tight cut).
 */
inline IsometryFit solve_isometry(const Matrix& domain, const Matrix& range,
                                  double tol = kDefaultTol, double rank_tol = -1.0) {
    if (domain.cols() != range.cols())
        throw ValidationError("solve_isometry: domain and range need the same column count");
    IsometryFit fit;
    const Matrix gram_d = domain.adjoint() * domain;
    const Matrix gram_r = range.adjoint() * range;
    fit.gram_deviation = max_abs(gram_d - gram_r);
    const double scale =
        std::max(1.0, std::max(max_abs(gram_d), max_abs(gram_r)));
    if (fit.gram_deviation > tol * scale) {
        std::ostringstream os;
        os << "solve_isometry: Gram mismatch " << fit.gram_deviation
           << " exceeds " << tol * scale
           << " (isometry compatibility condition fails)";
        throw GramMismatchError(os.str(), fit.gram_deviation);
    }
    if (domain.cols() == 0 || max_abs(domain) == 0.0) {
        fit.v = Matrix::Zero(range.rows(), domain.rows());
        fit.residual = range.cols() == 0 ? 0.0 : range.colwise().norm().maxCoeff();
        return fit;
    }

    Eigen::JacobiSVD<Matrix> svd(domain, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    if (rank_tol < 0.0) rank_tol = tol;
    const double cut = std::max(rank_tol, 1e-13) * sv(0);
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    fit.rank = rank;
    if (rank == 0) {
        fit.v = Matrix::Zero(range.rows(), domain.rows());
        fit.residual = range.cols() == 0 ? 0.0 : range.colwise().norm().maxCoeff();
        return fit;
    }

    const Matrix u_r = svd.matrixU().leftCols(rank);
    // Y carries range coordinates of the orthonormal domain basis: Y = R V_r S^-1.
    Matrix y = range * svd.matrixV().leftCols(rank);
    for (Index j = 0; j < rank; ++j) y.col(j) /= sv(j);
    // Re-polarize: closest matrix with exactly orthonormal columns.
    Eigen::JacobiSVD<Matrix> polar(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    y = polar.matrixU() * polar.matrixV().adjoint();

    fit.v = y * u_r.adjoint();
    const Matrix err = fit.v * domain - range;
    fit.residual = err.cols() == 0 ? 0.0 : err.colwise().norm().maxCoeff();
    return fit;
}

enum class CompletionMode { kCoisometric, kUnitary };

/// Unitary or coisometric extension of a partial isometry; padding, when the
/// shape forces it, is reported explicitly and never applied silently.
struct CompletionResult {
    Matrix u;
    Index padded_rows = 0;
    Index padded_cols = 0;
};

/**
 * Extend a partial isometry V (rows x cols) to a full unitary or coisometry
 * agreeing with V on its initial space.
 *
 * - kUnitary: returns a square unitary.  If rows != cols the matrix is
 *   embedded into size max(rows, cols) and padded_rows/padded_cols record
 *   the defect padding.
 * - kCoisometric: returns U of the input shape with U U* = I, which needs
 *   cols >= rows; otherwise columns are padded (reported).
 *
 * Throws ValidationError when V is not a partial isometry within tol
 * (singular values away from {0, 1}).
 */
inline CompletionResult complete_to_unitary(const Matrix& v_partial,
                                            CompletionMode mode = CompletionMode::kCoisometric,
                                            double tol = 1e-10) {
    Matrix v = v_partial;
    CompletionResult result;
    if (mode == CompletionMode::kUnitary && v.rows() != v.cols()) {
        const Index s = std::max(v.rows(), v.cols());
        Matrix padded = Matrix::Zero(s, s);
        padded.topLeftCorner(v.rows(), v.cols()) = v;
        result.padded_rows = s - v.rows();
        result.padded_cols = s - v.cols();
        v = padded;
    } else if (mode == CompletionMode::kCoisometric && v.cols() < v.rows()) {
        Matrix padded = Matrix::Zero(v.rows(), v.rows());
        padded.leftCols(v.cols()) = v;
        result.padded_cols = v.rows() - v.cols();
        v = padded;
    }

    const Index rows = v.rows();
    const Index cols = v.cols();
    if (rows == 0) {
        result.u = Matrix(0, cols);
        return result;
    }
    if (max_abs(v) == 0.0) {
        // Zero map: any unitary/coisometry completes it.
        result.u = Matrix::Identity(rows, cols);
        return result;
    }

    Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 0.5) {
            if (std::abs(sv(i) - 1.0) > tol) {
                std::ostringstream os;
                os << "complete_to_unitary: input is not a partial isometry, "
                      "singular value "
                   << sv(i) << " deviates from 1 beyond " << tol;
                throw ValidationError(os.str());
            }
            ++rank;
        } else if (sv(i) > tol) {
            std::ostringstream os;
            os << "complete_to_unitary: input is not a partial isometry, "
                  "singular value "
               << sv(i) << " is neither ~0 nor ~1 at tol " << tol;
            throw ValidationError(os.str());
        }
    }
    (void)rank;

    if (mode == CompletionMode::kUnitary) {
        result.u = svd.matrixU() * svd.matrixV().adjoint();
    } else {
        // Coisometric: orthonormal rows, first `rows` left singular directions
        // matched against the corresponding right singular directions.
        result.u = svd.matrixU() * svd.matrixV().leftCols(rows).adjoint();
    }
    return result;
}

}  // namespace schurkit
