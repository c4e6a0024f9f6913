/**
 * @file realization.hpp
 * @brief Colligations U = [A B; C D] with d-fold stacked state blocks,
 *        transfer-function evaluation on the disk / ball / free settings,
 *        the coisometry kernel identity, lurking-isometry synthesis from
 *        sampled data, and tensored (inflated) realizations.
 *
 * Shapes: A is (d n) x n (stacked A_1..A_d), B is (d n) x p, C is q x n and
 * D is q x p, so the connecting operator U maps C^(n+p) -> C^(dn+q).
 * Flavors certify operator properties of U:
 *   contractive  ||U|| <= 1, coisometric  U U* = I, unitary both products.
 *
 * Synthesis works in three steps: Kolmogorov-factor the de Branges-Rovnyak
 * kernel of the samples, match the Gram-equal column families by a lurking
 * isometry, and complete its adjoint to a coisometry.  The state dimension is
 * the numerical rank of the sampled kernel Gram; no padding happens beyond
 * the defect completion.  When the block shapes make a finite coisometric
 * completion impossible (wide state stacking against a narrow input space)
 * the partial isometry itself is returned with flavor contractive, which
 * still interpolates the data.
 */

#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "schurkit/freeseries.hpp"
#include "schurkit/kernels.hpp"
#include "schurkit/matops.hpp"

namespace schurkit {

enum class Flavor { kContractive, kCoisometric, kUnitary };

inline const char* flavor_name(Flavor f) {
    switch (f) {
        case Flavor::kContractive: return "contractive";
        case Flavor::kCoisometric: return "coisometric";
        case Flavor::kUnitary: return "unitary";
    }
    return "?";
}

/// Block colligation with shift multiplicity d.
class Colligation {
public:
    Colligation(int d, Matrix a, Matrix b, Matrix c, Matrix dd, Flavor flavor,
                double tol = 1e-9)
        : d_(d),
          a_(std::move(a)),
          b_(std::move(b)),
          c_(std::move(c)),
          d_block_(std::move(dd)),
          flavor_(flavor) {
        validate(tol);
    }

    int d() const { return d_; }
    Index state_dim() const { return a_.cols(); }
    Index input_dim() const { return d_block_.cols(); }
    Index output_dim() const { return d_block_.rows(); }
    Flavor flavor() const { return flavor_; }

    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& c() const { return c_; }
    const Matrix& d_block() const { return d_block_; }

    Matrix a_block(int j) const { return a_.middleRows((j - 1) * state_dim(), state_dim()); }
    Matrix b_block(int j) const { return b_.middleRows((j - 1) * state_dim(), state_dim()); }

    /// Connecting operator [A B; C D] : C^(n+p) -> C^(dn+q).
    Matrix connecting_operator() const {
        const Index n = state_dim(), p = input_dim(), q = output_dim();
        Matrix u(d_ * n + q, n + p);
        u.topLeftCorner(d_ * n, n) = a_;
        u.topRightCorner(d_ * n, p) = b_;
        u.bottomLeftCorner(q, n) = c_;
        u.bottomRightCorner(q, p) = d_block_;
        return u;
    }

    /// ( ||U U* - I||_F , ||U* U - I||_F )
    std::pair<double, double> flavor_residuals() const {
        const Matrix u = connecting_operator();
        const double co = (u * u.adjoint() -
                           Matrix::Identity(u.rows(), u.rows())).norm();
        const double iso = (u.adjoint() * u -
                            Matrix::Identity(u.cols(), u.cols())).norm();
        return {co, iso};
    }

private:
    void validate(double tol) const {
        if (d_ < 1) throw ValidationError("Colligation: d must be >= 1");
        const Index n = state_dim(), p = input_dim(), q = output_dim();
        if (a_.rows() != d_ * n)
            throw ValidationError("Colligation: A must stack d blocks of n rows");
        if (b_.rows() != d_ * n || b_.cols() != p)
            throw ValidationError("Colligation: B shape mismatch");
        if (c_.cols() != n || c_.rows() != q)
            throw ValidationError("Colligation: C shape mismatch");
        if (!all_finite(a_) || !all_finite(b_) || !all_finite(c_) || !all_finite(d_block_))
            throw ValidationError("Colligation: non-finite entry");
        const auto [co, iso] = flavor_residuals();
        if (flavor_ == Flavor::kCoisometric && co > tol) {
            std::ostringstream os;
            os << "Colligation: claimed coisometric but ||UU* - I||_F = " << co;
            throw ValidationError(os.str());
        }
        if (flavor_ == Flavor::kUnitary && (co > tol || iso > tol)) {
            std::ostringstream os;
            os << "Colligation: claimed unitary but residuals " << co << ", " << iso;
            throw ValidationError(os.str());
        }
        if (flavor_ == Flavor::kContractive) {
            const double norm = operator_norm(connecting_operator());
            if (norm > 1.0 + tol) {
                std::ostringstream os;
                os << "Colligation: claimed contractive but ||U|| = " << norm;
                throw ValidationError(os.str());
            }
        }
    }

    int d_;
    Matrix a_, b_, c_, d_block_;
    Flavor flavor_;
};

namespace detail {

/// Solves (I - M) X = RHS, throwing ResolventError when near-singular.
inline Matrix resolvent_solve(const Matrix& m, const Matrix& rhs, const char* who) {
    const Index n = m.rows();
    if (n == 0) return Matrix(0, rhs.cols());
    const Matrix lhs = Matrix::Identity(n, n) - m;
    Eigen::JacobiSVD<Matrix> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(n - 1);
    if (smin <= 1e-14 * smax) {
        std::ostringstream os;
        os << who << ": resolvent is singular, condition estimate "
           << (smin > 0 ? smax / smin : std::numeric_limits<double>::infinity());
        throw ResolventError(os.str(), smin > 0 ? smax / smin : INFINITY);
    }
    return svd.solve(rhs);
}

}  // namespace detail

/**
 * Transfer function at a ball point: S(z) = D + C (I - Z(z) A)^-1 Z(z) B
 * with Z(z) A = sum_j z_j A_j.  Exact linear solve, no series expansion.
 */
inline Matrix eval_ball(const Colligation& u, const Vector& z) {
    if (z.size() != u.d())
        throw ValidationError("eval_ball: point dimension != colligation d");
    if (z.norm() >= 1.0) {
        std::ostringstream os;
        os << "eval_ball: point outside the open ball, ||z|| = " << z.norm();
        throw DomainError(os.str());
    }
    const Index n = u.state_dim();
    if (n == 0) return u.d_block();
    Matrix za = Matrix::Zero(n, n);
    Matrix zb = Matrix::Zero(n, u.input_dim());
    for (int j = 1; j <= u.d(); ++j) {
        za += z(j - 1) * u.a_block(j);
        zb += z(j - 1) * u.b_block(j);
    }
    return u.d_block() + u.c() * detail::resolvent_solve(za, zb, "eval_ball");
}

/// Disk specialization (d = 1): S(z) = D + z C (I - z A)^-1 B.
inline Matrix eval_disk(const Colligation& u, Complex z) {
    if (u.d() != 1) throw ValidationError("eval_disk: colligation must have d = 1");
    Vector pt(1);
    pt(0) = z;
    return eval_ball(u, pt);
}

/**
 * Transfer-function coefficients as a formal power series up to degree N:
 * s_empty = D and s_(v j) = C A^v B_j, the state-block product taken in
 * written word order.
 */
inline FormalSeries free_transfer_coeffs(const Colligation& u, int degree_cap) {
    FormalSeries s(u.d(), u.output_dim(), u.input_dim(), /*commutative=*/false);
    s.add_term(Word{}, u.d_block());
    if (u.state_dim() == 0 || degree_cap < 1) return s;
    // prefix[w] = C A^w, built degree by degree
    std::vector<std::pair<Word, Matrix>> layer{{Word{}, u.c()}};
    for (int len = 1; len <= degree_cap; ++len) {
        std::vector<std::pair<Word, Matrix>> next;
        next.reserve(layer.size() * static_cast<size_t>(u.d()));
        for (const auto& [v, cav] : layer)
            for (int j = 1; j <= u.d(); ++j) {
                s.add_term(v.concat(Word{j}), cav * u.b_block(j));
                if (len < degree_cap) next.emplace_back(v.concat(Word{j}), cav * u.a_block(j));
            }
        layer = std::move(next);
    }
    return s;
}

/**
 * Max deviation of the coisometry kernel identity
 *   I - S(z) S(w)* = (1 - z conj(w)) C (I - z A)^-1 (I - conj(w) A*)^-1 C*
 * over all pairs of the given points.  Reports only; never throws on a
 * non-coisometric colligation (the deviation simply shows it).
 */
inline double kernel_identity_check(const Colligation& u,
                                    const std::vector<Complex>& points) {
    if (u.d() != 1)
        throw ValidationError("kernel_identity_check: requires d = 1");
    const Index n = u.state_dim();
    const Index q = u.output_dim();
    std::vector<Matrix> s_vals, resolvents;
    s_vals.reserve(points.size());
    resolvents.reserve(points.size());
    for (Complex z : points) {
        s_vals.push_back(eval_disk(u, z));
        if (n > 0)
            resolvents.push_back(
                detail::resolvent_solve(z * u.a_block(1), Matrix::Identity(n, n),
                                        "kernel_identity_check"));
    }
    double dev = 0.0;
    const Matrix eye = Matrix::Identity(q, q);
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = 0; j < points.size(); ++j) {
            const Matrix lhs = eye - s_vals[i] * s_vals[j].adjoint();
            Matrix rhs = Matrix::Zero(q, q);  // n = 0: H(z) has no columns
            if (n > 0) {
                const Complex factor =
                    1.0 - points[i] * std::conj(points[j]);
                rhs = u.c() * resolvents[i] * factor * resolvents[j].adjoint() *
                      u.c().adjoint();
            }
            dev = std::max(dev, max_abs(lhs - rhs));
        }
    return dev;
}

/// Synthesized colligation together with its fit diagnostics.  Rank-threshold
/// decisions made during synthesis are reported so residual failures can be
/// traced.
struct RealizationResult {
    Colligation colligation;
    double fit_residual = 0.0;      ///< max |S - S_hat| over training samples
    double heldout_residual = 0.0;  ///< same over the held-out set / fresh grid
    Index gram_rank = 0;            ///< numerical rank of the kernel Gram = state dim
    double kept_min_eigenvalue = 0.0;
    double dropped_max_eigenvalue = 0.0;
};

/// How the held-out residual of a synthesis is produced: against a fresh
/// seeded grid when an oracle for the true function is available, otherwise
/// against a deterministic subset of samples excluded from the fit.
struct HeldoutSpec {
    std::function<Matrix(const Vector&)> oracle;  ///< empty -> split mode
    int grid_points = 25;
    double radius = 0.9;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<Vector> heldout_grid(int d, const HeldoutSpec& spec) {
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<Vector> pts;
    pts.reserve(static_cast<size_t>(spec.grid_points));
    while (pts.size() < static_cast<size_t>(spec.grid_points)) {
        Vector z(d);
        for (int j = 0; j < d; ++j)
            z(j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if (z.norm() <= spec.radius) pts.push_back(z);
    }
    return pts;
}

/// Shared disk/ball synthesis core (points given as d-vectors).
inline RealizationResult lurking_isometry_core(const std::vector<Vector>& points,
                                               const std::vector<Matrix>& values,
                                               KernelSetting setting, int d,
                                               double tol,
                                               const HeldoutSpec& heldout) {
    if (points.size() != values.size() || points.empty())
        throw ValidationError("lurking_isometry: need matching nonempty samples");

    // Train/holdout split: every 4th sample is held out when no oracle is
    // available and there is enough data.
    std::vector<Vector> train_pts;
    std::vector<Matrix> train_vals;
    std::vector<size_t> holdout_idx;
    const bool split_mode = !heldout.oracle && points.size() >= 8;
    for (size_t i = 0; i < points.size(); ++i) {
        if (split_mode && i % 4 == 3) {
            holdout_idx.push_back(i);
        } else {
            train_pts.push_back(points[i]);
            train_vals.push_back(values[i]);
        }
    }

    const Index q = values[0].rows();
    const Index p = values[0].cols();
    const size_t nt = train_pts.size();

    // Constant data has no finite-dimensional coisometric realization unless
    // the value is inner (the kernel identity would force a finite-rank
    // factorization of the Szego kernel).  The zero-state model is the
    // faithful answer: S == D, flavor by the defect I - D D*.
    double const_dev = 0.0;
    for (size_t i = 1; i < nt; ++i)
        const_dev = std::max(const_dev, max_abs(train_vals[i] - train_vals[0]));
    if (const_dev <= std::max(tol, 1e-12) * std::max(1.0, max_abs(train_vals[0]))) {
        const Matrix d_val = train_vals[0];
        const double defect =
            (Matrix::Identity(q, q) - d_val * d_val.adjoint()).norm();
        const double norm = operator_norm(d_val);
        if (norm > 1.0 + 100.0 * tol)
            throw NotSchurError(
                "lurking_isometry: constant samples exceed the Schur bound",
                norm - 1.0);
        Colligation constant(d, Matrix(0, 0), Matrix(0, p), Matrix(q, 0), d_val,
                             defect <= 1e-9 ? Flavor::kCoisometric
                                            : Flavor::kContractive);
        RealizationResult result{constant, const_dev, 0.0, 0, 0.0, 0.0};
        if (heldout.oracle) {
            for (const Vector& z : heldout_grid(d, heldout))
                result.heldout_residual = std::max(
                    result.heldout_residual, max_abs(d_val - heldout.oracle(z)));
        } else {
            for (size_t i = 0; i < points.size(); ++i)
                result.heldout_residual =
                    std::max(result.heldout_residual, max_abs(d_val - values[i]));
        }
        return result;
    }

    const KernelSample kernel = debranges_kernel(train_pts, train_vals, setting);
    const PsdReport psd = positivity_check(kernel, tol);
    if (!psd.is_psd) {
        std::ostringstream os;
        os << "lurking_isometry: samples are not in the Schur class (kernel min "
              "eigenvalue "
           << psd.min_eigenvalue << ")";
        throw NotSchurError(os.str(), -psd.min_eigenvalue);
    }
    const FactorDecision factor = floored_factor(kernel.gram(), tol);
    const Matrix& h_big = factor.h;
    const Index rank = factor.rank;
    const double kept_min = factor.kept_min;
    const double dropped_max = factor.dropped_max;

    std::vector<Matrix> h_adj;  // H(z_i)* as rank x q
    h_adj.reserve(nt);
    for (size_t i = 0; i < nt; ++i)
        h_adj.push_back(h_big.middleRows(static_cast<Index>(i) * q, q).adjoint());

    // Column family per (sample, output basis vector):
    //   domain [conj(z_j) smeared H* y ; y]  vs  range [H* y ; S* y].
    Matrix domain = Matrix::Zero(d * rank + q, static_cast<Index>(nt) * q);
    Matrix range = Matrix::Zero(rank + p, static_cast<Index>(nt) * q);
    for (size_t i = 0; i < nt; ++i) {
        const Index col0 = static_cast<Index>(i) * q;
        for (int j = 0; j < d; ++j)
            domain.block(j * rank, col0, rank, q) =
                std::conj(train_pts[i](j)) * h_adj[i];
        domain.block(d * rank, col0, q, q) = Matrix::Identity(q, q);
        range.block(0, col0, rank, q) = h_adj[i];
        range.block(rank, col0, p, q) = train_vals[i].adjoint();
    }

    // The Gram identity holds up to the factorization truncation; gate it
    // against that scale rather than the raw tol.
    const double gate = 50.0 * tol * std::max(1.0, factor.lambda_max);
    const Matrix gd = domain.adjoint() * domain;
    const Matrix gr = range.adjoint() * range;
    const double gram_dev = max_abs(gd - gr);
    if (gram_dev > gate) {
        std::ostringstream os;
        os << "lurking_isometry: Gram identity deviation " << gram_dev
           << " exceeds " << gate << "; samples are not in the Schur class";
        throw NotSchurError(os.str(), gram_dev);
    }
    const IsometryFit fit = solve_isometry(domain, range, 1.0, tol);  // gated above

    // Complete V* to a coisometry when the shape allows a finite one.
    Flavor flavor = Flavor::kCoisometric;
    Matrix u_mat;
    if (rank + p >= d * rank + q) {
        u_mat = complete_to_unitary(fit.v.adjoint(), CompletionMode::kCoisometric).u;
    } else {
        u_mat = fit.v.adjoint();
        flavor = Flavor::kContractive;
    }

    Colligation colligation(
        d, u_mat.topLeftCorner(d * rank, rank), u_mat.topRightCorner(d * rank, p),
        u_mat.bottomLeftCorner(q, rank), u_mat.bottomRightCorner(q, p), flavor);

    RealizationResult result{colligation, 0.0, 0.0, rank, kept_min, dropped_max};
    for (size_t i = 0; i < nt; ++i)
        result.fit_residual =
            std::max(result.fit_residual,
                     max_abs(eval_ball(colligation, train_pts[i]) - train_vals[i]));

    if (heldout.oracle) {
        for (const Vector& z : heldout_grid(d, heldout))
            result.heldout_residual =
                std::max(result.heldout_residual,
                         max_abs(eval_ball(colligation, z) - heldout.oracle(z)));
    } else if (split_mode) {
        for (size_t i : holdout_idx)
            result.heldout_residual =
                std::max(result.heldout_residual,
                         max_abs(eval_ball(colligation, points[i]) - values[i]));
    } else {
        result.heldout_residual = result.fit_residual;
    }
    return result;
}

}  // namespace detail

/// Disk synthesis from samples (z_i, S(z_i)).
inline RealizationResult lurking_isometry_disk(const std::vector<Complex>& points,
                                               const std::vector<Matrix>& values,
                                               double tol = kDefaultTol,
                                               const HeldoutSpec& heldout = {}) {
    std::vector<Vector> pts;
    pts.reserve(points.size());
    for (Complex z : points) {
        Vector v(1);
        v(0) = z;
        pts.push_back(v);
    }
    return detail::lurking_isometry_core(pts, values, KernelSetting::kDisk, 1, tol,
                                         heldout);
}

/// Ball synthesis from samples (z_i, S(z_i)), z_i in B^d.
inline RealizationResult lurking_isometry_ball(const std::vector<Vector>& points,
                                               const std::vector<Matrix>& values,
                                               double tol = kDefaultTol,
                                               const HeldoutSpec& heldout = {}) {
    if (points.empty()) throw ValidationError("lurking_isometry_ball: empty sample");
    const int d = static_cast<int>(points[0].size());
    return detail::lurking_isometry_core(points, values, KernelSetting::kBall, d,
                                         tol, heldout);
}

/**
 * Free-setting synthesis from the coefficients of S up to degree N.  The NC
 * kernel coefficients are factored, the word-shifted column pairing induced
 * by the kernel identity is matched by a lurking isometry, and the adjoint is
 * completed to a coisometry (shape permitting).  Fit and heldout residual
 * both measure the coefficient mismatch of the resynthesized transfer series
 * through degree N; no fresh-grid notion exists for formal data.
 */
inline RealizationResult lurking_isometry_free(const FormalSeries& s, int degree_cap,
                                               double tol = kDefaultTol) {
    if (s.commutative())
        throw ValidationError("lurking_isometry_free: series must be noncommutative");
    const int d = s.d();
    const Index q = s.coeff_rows();
    const Index p = s.coeff_cols();

    const NcKernelCoeffs kc = nc_debranges_coeffs(s, degree_cap);
    const PsdReport psd = psd_check(kc.gram, tol);
    if (!psd.is_psd) {
        std::ostringstream os;
        os << "lurking_isometry_free: NC kernel coefficients not PSD (min "
              "eigenvalue "
           << psd.min_eigenvalue << ")";
        throw NotSchurError(os.str(), -psd.min_eigenvalue);
    }
    const detail::FactorDecision factor = detail::floored_factor(kc.gram, tol);
    const Matrix& h_big = factor.h;
    const Index rank = factor.rank;
    const double kept_min = factor.kept_min;
    const double dropped_max = factor.dropped_max;

    const std::vector<Word> words = words_up_to(d, degree_cap);
    auto h_adj = [&](const Word& w) {  // H_w* as rank x q
        return h_big.middleRows(word_index(w, d) * q, q).adjoint();
    };

    // Column family per (word, output basis vector): the kernel recursion
    //   H_w H_v* + s_w s_v* = delta_{w,0} delta_{v,0} I + sum_j [last letter j]
    //   H_w'' H_v''*
    // pairs domain [slot_j = H_(w minus last j)* y ; delta_{w,0} y] with
    // range [H_w* y ; s_w* y].
    const Index cols = static_cast<Index>(words.size()) * q;
    Matrix domain = Matrix::Zero(d * rank + q, cols);
    Matrix range = Matrix::Zero(rank + p, cols);
    for (size_t wi = 0; wi < words.size(); ++wi) {
        const Word& w = words[wi];
        const Index col0 = static_cast<Index>(wi) * q;
        if (w.empty()) {
            domain.block(d * rank, col0, q, q) = Matrix::Identity(q, q);
        } else {
            const int j = w.letters().back();
            const Word prefix(
                std::vector<int>(w.letters().begin(), w.letters().end() - 1));
            domain.block((j - 1) * rank, col0, rank, q) = h_adj(prefix);
        }
        range.block(0, col0, rank, q) = h_adj(w);
        range.block(rank, col0, p, q) = s.coeff(w).adjoint();
    }

    const double gate = 50.0 * tol * std::max(1.0, factor.lambda_max);
    const double gram_dev =
        max_abs(domain.adjoint() * domain - range.adjoint() * range);
    if (gram_dev > gate) {
        std::ostringstream os;
        os << "lurking_isometry_free: Gram identity deviation " << gram_dev
           << " exceeds " << gate;
        throw NotSchurError(os.str(), gram_dev);
    }
    const IsometryFit fit = solve_isometry(domain, range, 1.0, tol);

    Flavor flavor = Flavor::kCoisometric;
    Matrix u_mat;
    if (rank + p >= d * rank + q) {
        u_mat = complete_to_unitary(fit.v.adjoint(), CompletionMode::kCoisometric).u;
    } else {
        u_mat = fit.v.adjoint();
        flavor = Flavor::kContractive;
    }
    Colligation colligation(
        d, u_mat.topLeftCorner(d * rank, rank), u_mat.topRightCorner(d * rank, p),
        u_mat.bottomLeftCorner(q, rank), u_mat.bottomRightCorner(q, p), flavor);

    RealizationResult result{colligation, 0.0, 0.0, rank, kept_min, dropped_max};
    const FormalSeries resynth = free_transfer_coeffs(colligation, degree_cap);
    for (const Word& w : words)
        result.fit_residual =
            std::max(result.fit_residual, max_abs(resynth.coeff(w) - s.coeff(w)));
    result.heldout_residual = result.fit_residual;
    return result;
}

/// Tensored (inflated) realization U0 (x) I_m with its representation data.
struct TensoredRealization {
    Colligation colligation;
    std::vector<Matrix> pi;  ///< pi(E_ab) = I_state (x) E_ab, index a*m+b
    double module_map_deviation = 0.0;
};

/**
 * Max deviation of the module-map intertwining of a colligation whose
 * dimensions factor through m: each block must commute with I (x) b for every
 * m x m matrix unit b (with the appropriate identity inflation on each side).
 */
inline double tensored_module_map_deviation(const Colligation& u, Index m) {
    const Index n = u.state_dim(), p = u.input_dim(), q = u.output_dim();
    if (m < 1 || n % m || p % m || q % m)
        throw ValidationError(
            "tensored_module_map_deviation: dimensions do not factor through m");
    const Index n0 = n / m, p0 = p / m, q0 = q / m;
    double dev = 0.0;
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b) {
            Matrix unit = Matrix::Zero(m, m);
            unit(a, b) = 1.0;
            const Matrix bn = kron(Matrix::Identity(n0, n0), unit);
            const Matrix bp = kron(Matrix::Identity(p0, p0), unit);
            const Matrix bq = kron(Matrix::Identity(q0, q0), unit);
            for (int j = 1; j <= u.d(); ++j) {
                dev = std::max(dev, max_abs(u.a_block(j) * bn - bn * u.a_block(j)));
                dev = std::max(dev, max_abs(u.b_block(j) * bp - bn * u.b_block(j)));
            }
            dev = std::max(dev, max_abs(u.c() * bn - bq * u.c()));
            dev = std::max(dev, max_abs(u.d_block() * bp - bq * u.d_block()));
        }
    return dev;
}

/**
 * Inflates a coisometric colligation to U0 (x) I_m with pi(b) = I (x) b.
 * The module-map intertwining is verified on the m x m matrix units; the
 * deviation is carried in the result (machine-zero for a genuine inflation).
 * Evaluation at operator arguments goes through the functional calculus.
 */
inline TensoredRealization tensored_realization(const Colligation& u0, Index m) {
    if (m < 1) throw ValidationError("tensored_realization: m must be >= 1");
    const Matrix eye = Matrix::Identity(m, m);
    const Index n0 = u0.state_dim();
    Matrix a(u0.d() * n0 * m, n0 * m);
    Matrix b(u0.d() * n0 * m, u0.input_dim() * m);
    for (int j = 1; j <= u0.d(); ++j) {
        a.middleRows((j - 1) * n0 * m, n0 * m) = kron(u0.a_block(j), eye);
        b.middleRows((j - 1) * n0 * m, n0 * m) = kron(u0.b_block(j), eye);
    }
    TensoredRealization out{
        Colligation(u0.d(), std::move(a), std::move(b),
                    kron(u0.c(), eye), kron(u0.d_block(), eye),
                    u0.flavor()),
        {},
        0.0};
    out.pi.reserve(static_cast<size_t>(m * m));
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            Matrix unit = Matrix::Zero(m, m);
            unit(i, j) = 1.0;
            out.pi.push_back(kron(Matrix::Identity(n0, n0), unit));
        }
    out.module_map_deviation = tensored_module_map_deviation(out.colligation, m);
    return out;
}

}  // namespace schurkit
