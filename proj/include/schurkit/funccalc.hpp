/**
 * @file funccalc.hpp
 * @brief Functional calculus S(T): evaluation of formal series and
 *        colligation transfer functions at strict contractions, commuting
 *        row contractions and free (noncommuting) row contractions, plus
 *        von Neumann inequality verdicts.
 *
 * Tensor order is coefficient-first: S(T) = sum s_alpha (x) T^alpha acts on
 * C^p (x) C^k.  Word powers compose in written order,
 * T^w = T_{l_0} T_{l_1} ... for letters (l_0, l_1, ...).
 *
 * Strictness margin: tuples with row norm >= 1 - 1e-12 are rejected rather
 * than extrapolated.  Series truncation for colligation-backed evaluation
 * stops once the certified tail bound  coeff_norm * r^m / (1 - r)  drops
 * below 1e-12.
 */

#pragma once

#include <sstream>
#include <vector>

#include "schurkit/freeseries.hpp"
#include "schurkit/realization.hpp"

namespace schurkit {

inline constexpr double kStrictnessMargin = 1e-12;
inline constexpr double kCommutingTol = 1e-10;
inline constexpr double kSeriesTailEps = 1e-12;

/// d-tuple of k x k operators with a commutativity claim.
struct OperatorTuple {
    int d = 1;
    Index k = 1;
    std::vector<Matrix> blocks;
    bool commuting = false;

    void validate() const {
        if (d < 1 || blocks.size() != static_cast<size_t>(d))
            throw ValidationError("OperatorTuple: need exactly d blocks");
        for (const Matrix& t : blocks) {
            if (t.rows() != k || t.cols() != k)
                throw ValidationError("OperatorTuple: block shape mismatch");
            if (!all_finite(t)) throw ValidationError("OperatorTuple: non-finite entry");
        }
    }

    /// Row block [T_1 ... T_d], k x (d k).
    Matrix row() const {
        Matrix r(k, d * k);
        for (int j = 0; j < d; ++j) r.middleCols(j * k, k) = blocks[static_cast<size_t>(j)];
        return r;
    }

    /// T^w in written word order; T^empty = I.
    Matrix word_power(const Word& w) const {
        Matrix p = Matrix::Identity(k, k);
        for (int l : w.letters()) p = p * blocks[static_cast<size_t>(l - 1)];
        return p;
    }
};

struct RowContractionReport {
    double row_norm = 0.0;
    bool strict = false;
    double commuting_residual = 0.0;
};

/// Largest singular value of the row block, strictness flag and the max
/// commutator norm.
inline RowContractionReport row_contraction_check(const OperatorTuple& t) {
    t.validate();
    RowContractionReport report;
    report.row_norm = operator_norm(t.row());
    report.strict = report.row_norm < 1.0 - kStrictnessMargin;
    for (int i = 0; i < t.d; ++i)
        for (int j = i + 1; j < t.d; ++j)
            report.commuting_residual = std::max(
                report.commuting_residual,
                (t.blocks[static_cast<size_t>(i)] * t.blocks[static_cast<size_t>(j)] -
                 t.blocks[static_cast<size_t>(j)] * t.blocks[static_cast<size_t>(i)])
                    .norm());
    return report;
}

namespace detail {

inline void require_strict(const RowContractionReport& r, const char* who) {
    if (!r.strict) {
        std::ostringstream os;
        os << who << ": operator tuple is not a strict row contraction, row norm "
           << r.row_norm;
        throw StrictnessError(os.str(), r.row_norm);
    }
}

}  // namespace detail

enum class EvalMode { kCommuting, kFree };

/**
 * S(T) = sum over stored terms of s_alpha (x) T^alpha for a finite-support
 * series.  Commuting mode additionally requires the tuple commutators below
 * 1e-10 (seeded commuting tuples are exact; user data gets a clear bar).
 */
inline Matrix eval_at_row_tuple(const FormalSeries& s, const OperatorTuple& t,
                                EvalMode mode) {
    if (s.d() != t.d)
        throw ValidationError("eval_at_row_tuple: alphabet size mismatch");
    const RowContractionReport report = row_contraction_check(t);
    detail::require_strict(report, "eval_at_row_tuple");
    if (mode == EvalMode::kCommuting && report.commuting_residual > kCommutingTol) {
        std::ostringstream os;
        os << "eval_at_row_tuple: commuting mode but commutator residual "
           << report.commuting_residual;
        throw ValidationError(os.str());
    }
    Matrix out = Matrix::Zero(s.coeff_rows() * t.k, s.coeff_cols() * t.k);
    for (const auto& [w, coeff] : s.terms())
        out += kron(coeff, t.word_power(w));
    return out;
}

/// Single-contraction evaluation (d = 1 series at one strict operator).
inline Matrix eval_at_contraction(const FormalSeries& s, const Matrix& t) {
    if (s.d() != 1)
        throw ValidationError("eval_at_contraction: series must have d = 1");
    OperatorTuple tuple{1, t.rows(), {t}, true};
    return eval_at_row_tuple(s, tuple, EvalMode::kFree);
}

/**
 * Closed resolvent form of a colligation transfer function at an operator
 * tuple:  D (x) I + (C (x) I) (I - sum_j A_j (x) T_j)^-1 (sum_j B_j (x) T_j).
 * This mirrors Z(z) with scalar coordinates replaced by the T_j blocks.
 */
inline Matrix eval_colligation_at_tuple(const Colligation& u, const OperatorTuple& t) {
    if (u.d() != t.d)
        throw ValidationError("eval_colligation_at_tuple: d mismatch");
    const RowContractionReport report = row_contraction_check(t);
    detail::require_strict(report, "eval_colligation_at_tuple");
    const Index n = u.state_dim();
    const Index k = t.k;
    const Matrix eye_k = Matrix::Identity(k, k);
    const Matrix d_term = kron(u.d_block(), eye_k);
    if (n == 0) return d_term;
    Matrix lambda_a = Matrix::Zero(n * k, n * k);
    Matrix lambda_b = Matrix::Zero(n * k, u.input_dim() * k);
    for (int j = 1; j <= u.d(); ++j) {
        lambda_a += kron(u.a_block(j), t.blocks[static_cast<size_t>(j - 1)]);
        lambda_b += kron(u.b_block(j), t.blocks[static_cast<size_t>(j - 1)]);
    }
    return d_term + kron(u.c(), eye_k) *
                        detail::resolvent_solve(lambda_a, lambda_b,
                                                "eval_colligation_at_tuple");
}

/**
 * Degree-grouped series evaluation of a colligation transfer function:
 * partial sums of sum_m (C (x) I) M^(m-1) (B-term) with M = sum A_j (x) T_j,
 * which equals the word-wise series sum_alpha s_alpha (x) T^alpha grouped by
 * degree.  Stops when the certified tail bound falls below eps.
 */
inline Matrix eval_colligation_series_at_tuple(const Colligation& u,
                                               const OperatorTuple& t,
                                               double eps = kSeriesTailEps,
                                               int max_degree = 100000) {
    if (u.d() != t.d)
        throw ValidationError("eval_colligation_series_at_tuple: d mismatch");
    const RowContractionReport report = row_contraction_check(t);
    detail::require_strict(report, "eval_colligation_series_at_tuple");
    const Index k = t.k;
    const Matrix eye_k = Matrix::Identity(k, k);
    Matrix sum = kron(u.d_block(), eye_k);
    const Index n = u.state_dim();
    if (n == 0) return sum;
    Matrix m_op = Matrix::Zero(n * k, n * k);
    Matrix b_term = Matrix::Zero(n * k, u.input_dim() * k);
    for (int j = 1; j <= u.d(); ++j) {
        m_op += kron(u.a_block(j), t.blocks[static_cast<size_t>(j - 1)]);
        b_term += kron(u.b_block(j), t.blocks[static_cast<size_t>(j - 1)]);
    }
    const Matrix c_term = kron(u.c(), eye_k);
    // contraction ratio of the state recursion: ||M|| <= ||A|| * row_norm
    const double ratio =
        std::min(operator_norm(m_op),
                 operator_norm(u.a()) * report.row_norm);
    Matrix state = b_term;  // M^(m-1) B-term
    double state_bound = operator_norm(b_term);
    for (int degree = 1; degree <= max_degree; ++degree) {
        sum += c_term * state;
        if (ratio >= 1.0)
            throw StrictnessError(
                "eval_colligation_series_at_tuple: state recursion is not a "
                "contraction, no certified tail bound",
                ratio);
        state_bound *= ratio;
        if (operator_norm(c_term) * state_bound / (1.0 - ratio) < eps) break;
        state = m_op * state;
    }
    return sum;
}

struct VonNeumannReport {
    double norm = 0.0;
    bool pass = false;
    double certificate = 0.0;  ///< coisometry residual or truncated multiplier norm
};

/**
 * von Neumann verdict for a colligation-certified Schur function: requires
 * flavor coisometric or unitary (the implication direction needs the
 * hypothesis), evaluates through the closed resolvent form and compares
 * ||S(T)|| against 1 + 1e-8.
 */
inline VonNeumannReport von_neumann_check(const Colligation& u, const OperatorTuple& t) {
    if (u.flavor() == Flavor::kContractive)
        throw ValidationError(
            "von_neumann_check: colligation is not certified coisometric; "
            "refusing the uncertified hypothesis");
    VonNeumannReport report;
    report.certificate = u.flavor_residuals().first;
    report.norm = operator_norm(eval_colligation_at_tuple(u, t));
    report.pass = report.norm <= 1.0 + 1e-8;
    return report;
}

/**
 * von Neumann verdict for a finite noncommutative series certified by its
 * truncated multiplier norm: refuses when ||M_S|| on the degree-N truncation
 * exceeds 1 (within 1e-9), otherwise evaluates the series at the tuple.
 */
inline VonNeumannReport von_neumann_check(const FormalSeries& s, const OperatorTuple& t,
                                          EvalMode mode) {
    const int degree = static_cast<int>(s.max_degree());
    const double mult_norm = operator_norm(mult_operator(s, degree));
    if (mult_norm > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "von_neumann_check: series not certified Schur, truncated "
              "multiplier norm "
           << mult_norm;
        throw ValidationError(os.str());
    }
    VonNeumannReport report;
    report.certificate = mult_norm;
    report.norm = operator_norm(eval_at_row_tuple(s, t, mode));
    report.pass = report.norm <= 1.0 + 1e-8;
    return report;
}

}  // namespace schurkit
