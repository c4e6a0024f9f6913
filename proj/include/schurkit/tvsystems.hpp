/**
 * @file tvsystems.hpp
 * @brief Time-varying setting on finite windows [0, L): diagonal expansions
 *        of lower-triangular operators, point evaluation at weighted shifts,
 *        system simulation, aggregate colligations, input-output maps, and
 *        conservative realization of lower-triangular contractions.
 *
 * The finite window with x(0) = 0 replaces the bi-infinite setting; every
 * object restricts consistently.  The window shift U is the L x L nilpotent
 * lower shift, so resolvents are finite geometric sums and no convergence
 * questions arise.
 */

#pragma once

#include <sstream>
#include <vector>

#include "schurkit/matops.hpp"

namespace schurkit {

/// Lower-triangular operator window.  Strict upper entries must be exactly
/// zero; that is an exact structural statement, not a tolerance.
struct LowerTriWindow {
    Matrix t;

    explicit LowerTriWindow(Matrix m) : t(std::move(m)) { validate(); }

    Index window() const { return t.rows(); }

    void validate() const {
        if (t.rows() != t.cols())
            throw ValidationError("LowerTriWindow: matrix must be square");
        if (!all_finite(t)) throw ValidationError("LowerTriWindow: non-finite entry");
        for (Index i = 0; i < t.rows(); ++i)
            for (Index j = i + 1; j < t.cols(); ++j)
                if (t(i, j) != Complex(0.0, 0.0)) {
                    std::ostringstream os;
                    os << "LowerTriWindow: strict upper entry (" << i << ", " << j
                       << ") is not exactly zero";
                    throw ValidationError(os.str());
                }
    }
};

/// Subdiagonal data d_0..d_{L-1}: d_n is the length-(L-n) vector of the
/// n-th subdiagonal, read column-major along the diagonal.
struct DiagonalExpansion {
    Index window = 0;
    std::vector<Vector> diagonals;
};

inline DiagonalExpansion diag_expand(const LowerTriWindow& t) {
    const Index l = t.window();
    DiagonalExpansion out;
    out.window = l;
    out.diagonals.reserve(static_cast<size_t>(l));
    for (Index n = 0; n < l; ++n) {
        Vector d(l - n);
        for (Index i = 0; i < l - n; ++i) d(i) = t.t(i + n, i);
        out.diagonals.push_back(std::move(d));
    }
    return out;
}

inline LowerTriWindow diag_assemble(const DiagonalExpansion& e) {
    const Index l = e.window;
    if (e.diagonals.size() != static_cast<size_t>(l))
        throw ValidationError("diag_assemble: need exactly L subdiagonals");
    Matrix t = Matrix::Zero(l, l);
    for (Index n = 0; n < l; ++n) {
        const Vector& d = e.diagonals[static_cast<size_t>(n)];
        if (d.size() != l - n)
            throw ValidationError("diag_assemble: subdiagonal length mismatch");
        for (Index i = 0; i < l - n; ++i) t(i + n, i) = d(i);
    }
    return LowerTriWindow(std::move(t));
}

/// Weighted shift argument eta = D_eta U restricted to the window; all
/// weights must satisfy |w| <= 1 - 1e-12 (strict contraction).
struct WeightedShiftArg {
    Vector weights;

    explicit WeightedShiftArg(Vector w) : weights(std::move(w)) {
        for (Index i = 0; i < weights.size(); ++i)
            if (std::abs(weights(i)) > 1.0 - 1e-12) {
                std::ostringstream os;
                os << "WeightedShiftArg: weight " << i << " has modulus "
                   << std::abs(weights(i)) << ", not strictly inside the disk";
                throw StrictnessError(os.str(), std::abs(weights(i)));
            }
    }

    Index window() const { return weights.size(); }

    /// The L x L matrix D_eta U: entry (i+1, i) = w_{i+1}.
    Matrix matrix() const {
        const Index l = window();
        Matrix m = Matrix::Zero(l, l);
        for (Index i = 0; i + 1 < l; ++i) m(i + 1, i) = weights(i + 1);
        return m;
    }
};

/**
 * Point evaluation R^(eta) = sum_{n < L} eta^n diag(d_n zero-padded), a
 * finite exact sum on the window.
 */
inline Matrix tv_point_eval(const LowerTriWindow& t, const WeightedShiftArg& eta) {
    const Index l = t.window();
    if (eta.window() != l)
        throw ValidationError("tv_point_eval: window length mismatch");
    const DiagonalExpansion e = diag_expand(t);
    const Matrix em = eta.matrix();
    Matrix power = Matrix::Identity(l, l);
    Matrix out = Matrix::Zero(l, l);
    for (Index n = 0; n < l; ++n) {
        Matrix padded = Matrix::Zero(l, l);
        for (Index i = 0; i < l - n; ++i)
            padded(i, i) = e.diagonals[static_cast<size_t>(n)](i);
        out += power * padded;
        power = em * power;
    }
    return out;
}

/**
 * Time-varying system window: per-time system matrices
 * U(n) = [A(n) B(n); C(n) D(n)] : (state n) + scalar input ->
 * (state n+1) + scalar output.  Conservative systems have every U(n)
 * unitary within 1e-10 (hence square: constant state dimension).
 */
struct TVSystem {
    Index window = 0;
    std::vector<Index> state_dims;  ///< length window + 1
    std::vector<Matrix> u_seq;      ///< length window
    bool conservative = false;

    void validate() const {
        if (state_dims.size() != static_cast<size_t>(window + 1))
            throw ValidationError("TVSystem: need window+1 state dimensions");
        if (u_seq.size() != static_cast<size_t>(window))
            throw ValidationError("TVSystem: need window system matrices");
        for (Index n = 0; n < window; ++n) {
            const Matrix& u = u_seq[static_cast<size_t>(n)];
            if (u.rows() != state_dims[static_cast<size_t>(n + 1)] + 1 ||
                u.cols() != state_dims[static_cast<size_t>(n)] + 1) {
                std::ostringstream os;
                os << "TVSystem: U(" << n << ") shape " << u.rows() << "x" << u.cols()
                   << " does not match state dims";
                throw ValidationError(os.str());
            }
            if (!all_finite(u)) throw ValidationError("TVSystem: non-finite entry");
            if (conservative) {
                if (u.rows() != u.cols())
                    throw ValidationError("TVSystem: conservative U(n) must be square");
                const double dev =
                    (u * u.adjoint() - Matrix::Identity(u.rows(), u.rows())).norm();
                const double dev2 =
                    (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
                if (std::max(dev, dev2) > 1e-10) {
                    std::ostringstream os;
                    os << "TVSystem: conservative flag but U(" << n
                       << ") unitarity residual " << std::max(dev, dev2);
                    throw ValidationError(os.str());
                }
            }
        }
    }

    Index state_dim(Index n) const { return state_dims[static_cast<size_t>(n)]; }
    Matrix a(Index n) const {
        return u_seq[static_cast<size_t>(n)].topLeftCorner(state_dim(n + 1), state_dim(n));
    }
    Matrix b(Index n) const {
        return u_seq[static_cast<size_t>(n)].topRightCorner(state_dim(n + 1), 1);
    }
    Matrix c(Index n) const {
        return u_seq[static_cast<size_t>(n)].bottomLeftCorner(1, state_dim(n));
    }
    Complex d(Index n) const {
        return u_seq[static_cast<size_t>(n)](state_dim(n + 1), state_dim(n));
    }
};

struct Trajectory {
    std::vector<Vector> states;  ///< x(0..L), x(0) = 0
    Vector outputs;              ///< y(0..L-1)
};

/// Exact recursion x(n+1) = A(n) x(n) + B(n) u(n), y(n) = C(n) x(n) + D(n) u(n)
/// with x(0) = 0.
inline Trajectory simulate(const TVSystem& sys, const Vector& input) {
    sys.validate();
    if (input.size() != sys.window)
        throw ValidationError("simulate: input length != window");
    Trajectory out;
    out.states.reserve(static_cast<size_t>(sys.window + 1));
    out.states.push_back(Vector::Zero(sys.state_dim(0)));
    out.outputs.resize(sys.window);
    for (Index n = 0; n < sys.window; ++n) {
        const Vector& x = out.states.back();
        out.outputs(n) = (sys.c(n) * x)(0) + sys.d(n) * input(n);
        out.states.push_back(sys.a(n) * x + sys.b(n) * input(n));
    }
    return out;
}

/// Aggregate block operator of the window: [A]_{i,j} = A(j) delta_{i,j+1},
/// [B]_{i,j} = B(j) delta_{i,j+1}, [C]_{i,j} = C(j) delta_{i,j},
/// [D]_{i,j} = D(j) delta_{i,j}.  The state blocks run over H(0..L-1), so
/// the aggregate A is strictly block-subdiagonal and nilpotent.
struct AggregateColligation {
    Matrix a, b, c, d;
    std::vector<Index> offsets;  ///< block offsets of H(0..L-1) plus total
};

inline AggregateColligation aggregate_colligation(const TVSystem& sys) {
    sys.validate();
    const Index l = sys.window;
    AggregateColligation agg;
    agg.offsets.resize(static_cast<size_t>(l + 1));
    Index total = 0;
    for (Index n = 0; n < l; ++n) {
        agg.offsets[static_cast<size_t>(n)] = total;
        total += sys.state_dim(n);
    }
    agg.offsets[static_cast<size_t>(l)] = total;
    agg.a = Matrix::Zero(total, total);
    agg.b = Matrix::Zero(total, l);
    agg.c = Matrix::Zero(l, total);
    agg.d = Matrix::Zero(l, l);
    for (Index j = 0; j < l; ++j) {
        if (j + 1 < l) {
            agg.a.block(agg.offsets[static_cast<size_t>(j + 1)],
                        agg.offsets[static_cast<size_t>(j)], sys.state_dim(j + 1),
                        sys.state_dim(j)) = sys.a(j);
            agg.b.block(agg.offsets[static_cast<size_t>(j + 1)], j,
                        sys.state_dim(j + 1), 1) = sys.b(j);
        }
        agg.c.block(j, agg.offsets[static_cast<size_t>(j)], 1, sys.state_dim(j)) =
            sys.c(j);
        agg.d(j, j) = sys.d(j);
    }
    return agg;
}

/**
 * Input-output map T = D + C (I - A)^-1 B of the aggregate colligation.
 * A is nilpotent on the window, so the resolvent is the finite geometric sum
 * and the result is structurally lower triangular (exact zeros above).
 */
inline LowerTriWindow io_map(const TVSystem& sys) {
    const AggregateColligation agg = aggregate_colligation(sys);
    const Index total = agg.a.rows();
    Matrix t = agg.d;
    if (total > 0) {
        Matrix power_b = agg.b;  // A^k B
        for (Index k = 0; k < sys.window; ++k) {
            t += agg.c * power_b;
            power_b = agg.a * power_b;
        }
    }
    return LowerTriWindow(std::move(t));
}

/// Conservative realization output: the system plus the rank decisions made
/// at each cut.
struct TvRealization {
    TVSystem system;
    std::vector<Index> core_ranks;    ///< energy-defect rank at each cut 0..L
    std::vector<Index> hankel_ranks;  ///< numerical rank of T[n:, :n] at each cut
    double reconstruction_residual = 0.0;
};

/**
 * Realize a lower-triangular contraction window as the input-output map of a
 * conservative time-varying system.
 *
 * At each cut n the core state space is the energy defect of the past window
 * (the Gram I - T_n* T_n factored at tol); per-step maps are matched by a
 * lurking isometry and completed to unitaries via complete_to_unitary, with
 * defect padding bringing every cut to the common (maximal) core rank so the
 * per-step matrices can be square.  Reachable trajectories never see the
 * padded directions, so io_map of the result reproduces T within tolerance.
 *
 * Refuses input with ||T|| > 1 + 1e-12, carrying the norm.
 */
inline TvRealization tv_realize(const LowerTriWindow& t, double tol = kDefaultTol) {
    const Index l = t.window();
    const double norm = operator_norm(t.t);
    if (norm > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "tv_realize: window is not a contraction, ||T|| = " << norm;
        throw StrictnessError(os.str(), norm);
    }

    // Energy-defect factors R_n with R_n* R_n = I - T_n* T_n (n x n leading
    // window);  x(n) = R_n u[0:n] is the conservative state encoding.
    std::vector<Matrix> r_factors;
    r_factors.reserve(static_cast<size_t>(l + 1));
    TvRealization out;
    for (Index n = 0; n <= l; ++n) {
        const Matrix tn = t.t.topLeftCorner(n, n);
        Matrix gram = Matrix::Identity(n, n) - tn.adjoint() * tn;
        // Clamp the symmetric part; boundary contractions sit at exactly 0.
        gram = 0.5 * (gram + gram.adjoint());
        r_factors.push_back(detail::floored_factor(gram, tol).h.adjoint());
        out.core_ranks.push_back(r_factors.back().rows());

        Index hankel_rank = 0;
        if (n > 0 && n < l) {
            const Matrix hankel = t.t.block(n, 0, l - n, n);
            Eigen::JacobiSVD<Matrix> svd(hankel);
            const RealVector& sv = svd.singularValues();
            if (sv.size() > 0 && sv(0) > 0)
                for (Index i = 0; i < sv.size(); ++i)
                    if (sv(i) > tol * sv(0)) ++hankel_rank;
        }
        out.hankel_ranks.push_back(hankel_rank);
    }
    const Index m = *std::max_element(out.core_ranks.begin(), out.core_ranks.end());

    TVSystem sys;
    sys.window = l;
    sys.state_dims.assign(static_cast<size_t>(l + 1), m);
    sys.conservative = true;
    for (Index n = 0; n < l; ++n) {
        const Index rn = out.core_ranks[static_cast<size_t>(n)];
        const Index rn1 = out.core_ranks[static_cast<size_t>(n + 1)];
        // Domain columns [x(n); u(n)] and range columns [x(n+1); y(n)] over
        // the basis of past inputs u[0:n+1].
        Matrix domain = Matrix::Zero(rn + 1, n + 1);
        domain.topLeftCorner(rn, n) = r_factors[static_cast<size_t>(n)];
        domain(rn, n) = 1.0;
        Matrix range = Matrix::Zero(rn1 + 1, n + 1);
        range.topRows(rn1) = r_factors[static_cast<size_t>(n + 1)];
        range.row(rn1) = t.t.row(n).head(n + 1);

        const IsometryFit fit =
            solve_isometry(domain, range, std::max(50.0 * tol, 1e-12), tol);

        // Embed into the padded square shape with the io channel last.
        Matrix embedded = Matrix::Zero(m + 1, m + 1);
        embedded.topLeftCorner(rn1, rn) = fit.v.topLeftCorner(rn1, rn);
        embedded.block(0, m, rn1, 1) = fit.v.block(0, rn, rn1, 1);
        embedded.block(m, 0, 1, rn) = fit.v.block(rn1, 0, 1, rn);
        embedded(m, m) = fit.v(rn1, rn);
        sys.u_seq.push_back(
            complete_to_unitary(embedded, CompletionMode::kUnitary).u);
    }
    sys.validate();
    out.system = std::move(sys);
    out.reconstruction_residual = (io_map(out.system).t - t.t).norm();
    return out;
}

}  // namespace schurkit
