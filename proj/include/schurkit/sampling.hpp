/**
 * @file sampling.hpp
 * @brief Seeded instance generators shared by the property suites, the
 *        acceptance harness and the CLI held-out grids: Haar unitaries,
 *        coisometric colligations, interior point clouds, strict row tuples,
 *        PSD matrices, CP kernels and time-varying windows.
 *
 * Interior points are drawn by rejection inside the radius-0.95 closed
 * sub-disk/ball by default, keeping automated grids away from the boundary
 * blow-up of the Szego kernels.
 */

#pragma once

#include <string>
#include <vector>

#include "schurkit/funccalc.hpp"
#include "schurkit/kernels.hpp"
#include "schurkit/realization.hpp"
#include "schurkit/tvsystems.hpp"

namespace schurkit {

inline constexpr double kSampleRadius = 0.95;

/// Haar-distributed unitary via phase-fixed QR of a complex Ginibre matrix.
inline Matrix random_unitary(Index n, Rng& rng) {
    if (n == 0) return Matrix(0, 0);
    const Matrix g = rng.gaussian_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const Complex diag = r(j, j);
        if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
    }
    return q;
}

/// Unitary colligation with d stacked state blocks; the input dimension is
/// forced to p = (d-1) n + q so the connecting operator can be square.
inline Colligation random_unitary_colligation(int d, Index n, Index q, Rng& rng) {
    const Index p = (d - 1) * n + q;
    const Index size = d * n + q;
    const Matrix u = random_unitary(size, rng);
    return Colligation(d, u.topLeftCorner(d * n, n), u.topRightCorner(d * n, p),
                       u.bottomLeftCorner(q, n), u.bottomRightCorner(q, p),
                       Flavor::kUnitary);
}

/// Coisometric colligation with chosen input dimension p >= (d-1)n + q:
/// the first dn+q rows of a Haar unitary of size n+p.
inline Colligation random_coisometric_colligation(int d, Index n, Index p, Index q,
                                                  Rng& rng) {
    if (n + p < d * n + q)
        throw ValidationError(
            "random_coisometric_colligation: need n + p >= d n + q");
    const Matrix big = random_unitary(n + p, rng);
    const Matrix u = big.topRows(d * n + q);
    return Colligation(d, u.topLeftCorner(d * n, n), u.topRightCorner(d * n, p),
                       u.bottomLeftCorner(q, n), u.bottomRightCorner(q, p),
                       Flavor::kCoisometric);
}

/// Uniform points in the closed radius-r disk (as complex scalars).
inline std::vector<Complex> random_points_disk(size_t count, Rng& rng,
                                               double radius = kSampleRadius) {
    std::vector<Complex> pts;
    pts.reserve(count);
    while (pts.size() < count) {
        const Complex z(rng.uniform(-radius, radius), rng.uniform(-radius, radius));
        if (std::abs(z) <= radius) pts.push_back(z);
    }
    return pts;
}

/// Uniform points in the closed radius-r ball of C^d.
inline std::vector<Vector> random_points_ball(int d, size_t count, Rng& rng,
                                              double radius = kSampleRadius) {
    std::vector<Vector> pts;
    pts.reserve(count);
    while (pts.size() < count) {
        Vector z(d);
        for (int j = 0; j < d; ++j)
            z(j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if (z.norm() <= radius) pts.push_back(z);
    }
    return pts;
}

/// Random PSD matrix G G* with the given inner dimension.
inline Matrix random_psd(Index n, Index rank, Rng& rng) {
    const Matrix g = rng.gaussian_matrix(n, rank);
    return g * g.adjoint();
}

/**
 * Strict row contraction tuple scaled to the target row norm.  Commuting
 * tuples are built as Q diag(..) Q* with a common unitary Q, which keeps
 * the commutators at machine zero.
 */
inline OperatorTuple random_strict_row_tuple(int d, Index k, double target_norm,
                                             bool commuting, Rng& rng) {
    OperatorTuple t;
    t.d = d;
    t.k = k;
    t.commuting = commuting;
    if (commuting) {
        const Matrix q = random_unitary(k, rng);
        std::vector<Vector> diags(static_cast<size_t>(d));
        for (auto& dg : diags) {
            dg = Vector(k);
            for (Index i = 0; i < k; ++i) dg(i) = rng.complex_normal();
        }
        // scale so that max_i sqrt(sum_j |lambda_j(i)|^2) = target_norm
        double worst = 0.0;
        for (Index i = 0; i < k; ++i) {
            double s = 0.0;
            for (const Vector& dg : diags) s += std::norm(dg(i));
            worst = std::max(worst, std::sqrt(s));
        }
        const double scale = worst > 0 ? target_norm / worst : 0.0;
        for (const Vector& dg : diags) {
            Matrix lambda = Matrix::Zero(k, k);
            for (Index i = 0; i < k; ++i) lambda(i, i) = dg(i) * scale;
            t.blocks.push_back(q * lambda * q.adjoint());
        }
    } else {
        Matrix row(k, d * k);
        for (int j = 0; j < d; ++j) row.middleCols(j * k, k) = rng.gaussian_matrix(k, k);
        const double norm = operator_norm(row);
        const double scale = norm > 0 ? target_norm / norm : 0.0;
        for (int j = 0; j < d; ++j) t.blocks.push_back(scale * row.middleCols(j * k, k));
    }
    return t;
}

/// Lower-triangular window with iid Gaussian lower entries scaled to the
/// target operator norm.
inline LowerTriWindow random_lower_tri_window(Index l, double target_norm, Rng& rng) {
    Matrix t = Matrix::Zero(l, l);
    for (Index i = 0; i < l; ++i)
        for (Index j = 0; j <= i; ++j) t(i, j) = rng.complex_normal();
    const double norm = operator_norm(t);
    if (norm > 0) t *= target_norm / norm;
    return LowerTriWindow(std::move(t));
}

/// Time-varying system with random state dimensions (<= max_state) and
/// Gaussian blocks scaled to keep trajectories tame.
inline TVSystem random_tv_system(Index l, Index max_state, Rng& rng) {
    TVSystem sys;
    sys.window = l;
    sys.conservative = false;
    sys.state_dims.resize(static_cast<size_t>(l + 1));
    for (Index n = 0; n <= l; ++n)
        sys.state_dims[static_cast<size_t>(n)] =
            static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_state + 1)));
    for (Index n = 0; n < l; ++n) {
        Matrix u = rng.gaussian_matrix(sys.state_dim(n + 1) + 1, sys.state_dim(n) + 1);
        u *= 0.7 / std::max(1.0, operator_norm(u));
        sys.u_seq.push_back(std::move(u));
    }
    sys.validate();
    return sys;
}

/// Conservative system: every per-step matrix is a Haar unitary of the
/// common state dimension m.
inline TVSystem random_conservative_tv_system(Index l, Index m, Rng& rng) {
    TVSystem sys;
    sys.window = l;
    sys.conservative = true;
    sys.state_dims.assign(static_cast<size_t>(l + 1), m);
    for (Index n = 0; n < l; ++n) sys.u_seq.push_back(random_unitary(m + 1, rng));
    sys.validate();
    return sys;
}

namespace detail {

/// *-representation of M_k on C^(k t): a (x) I_t conjugated by a Haar unitary.
inline std::vector<Matrix> random_rep(Index k, Index t, Rng& rng, Matrix* basis = nullptr) {
    const Matrix w = random_unitary(k * t, rng);
    std::vector<Matrix> pi;
    pi.reserve(static_cast<size_t>(k * k));
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            Matrix unit = Matrix::Zero(k, k);
            unit(a, b) = 1.0;
            pi.push_back(w * kron(unit, Matrix::Identity(t, t)) * w.adjoint());
        }
    if (basis) *basis = w;
    return pi;
}

}  // namespace detail

/// Random completely positive kernel K(w_i, w_j)[a] = H_i pi(a) H_j* over N
/// abstract points, with pi a random representation of M_k on C^(k t).
inline CPKernelSample random_cp_kernel(Index n_points, Index k, Index m, Index t,
                                       Rng& rng) {
    const std::vector<Matrix> pi = detail::random_rep(k, t, rng);
    std::vector<Matrix> h;
    h.reserve(static_cast<size_t>(n_points));
    for (Index i = 0; i < n_points; ++i) h.push_back(rng.gaussian_matrix(m, k * t));
    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<Matrix>>> values;
    for (Index i = 0; i < n_points; ++i) {
        labels.push_back("w" + std::to_string(i));
        std::vector<std::vector<Matrix>> row;
        for (Index j = 0; j < n_points; ++j) {
            std::vector<Matrix> units;
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b < k; ++b)
                    units.push_back(h[static_cast<size_t>(i)] *
                                    pi[static_cast<size_t>(a * k + b)] *
                                    h[static_cast<size_t>(j)].adjoint());
            row.push_back(std::move(units));
        }
        values.push_back(std::move(row));
    }
    return CPKernelSample(std::move(labels), k, m, std::move(values));
}

/// Module-map kernel K[a] = pi_E(a) K0 with K0 in the commutant of pi_E.
/// psd=false plants an indefinite K0 so both positivity verdicts must reject.
struct ModuleMapInstance {
    CPKernelSample kernel;
    std::vector<Matrix> pi_e;
};

inline ModuleMapInstance random_modulemap_kernel(Index n_points, Index k, Index t,
                                                 bool psd, Rng& rng) {
    Matrix w;
    const std::vector<Matrix> pi = detail::random_rep(k, t, rng, &w);
    // commutant kernel blocks: G(w_i, w_j) = F_i F_j* on C^t (or indefinite)
    std::vector<Matrix> f;
    for (Index i = 0; i < n_points; ++i) f.push_back(rng.gaussian_matrix(t, t + 1));
    Matrix flip = Matrix::Identity(t + 1, t + 1);
    if (!psd) flip(0, 0) = -3.0;  // makes the kernel indefinite
    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<Matrix>>> values;
    for (Index i = 0; i < n_points; ++i) {
        labels.push_back("w" + std::to_string(i));
        std::vector<std::vector<Matrix>> row;
        for (Index j = 0; j < n_points; ++j) {
            const Matrix g = f[static_cast<size_t>(i)] * flip * f[static_cast<size_t>(j)].adjoint();
            const Matrix k0 = w * kron(Matrix::Identity(k, k), g) * w.adjoint();
            std::vector<Matrix> units;
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b < k; ++b)
                    units.push_back(pi[static_cast<size_t>(a * k + b)] * k0);
            row.push_back(std::move(units));
        }
        values.push_back(std::move(row));
    }
    return ModuleMapInstance{
        CPKernelSample(std::move(labels), k, k * t, std::move(values)), pi};
}

}  // namespace schurkit
