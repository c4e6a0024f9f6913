/**
 * @file kernels.hpp
 * @brief Kernel machinery: classical and ball Szego kernels, de Branges-
 *        Rovnyak kernels K_S on finite point sets, Aronszajn positivity,
 *        Kolmogorov factorization, and completely positive kernels over a
 *        full matrix algebra M_k with their GNS-style decomposition.
 *
 * Kernel samples are finite and dense: N stays small at desk scale, so every
 * block is materialized and the Gram tests are plain Hermitian
 * eigenproblems.  Orientation convention: the assembled Gram has block (i, j)
 * equal to K(omega_i, omega_j), and Kolmogorov factors satisfy
 * K(omega_i, omega_j) = H_i H_j*.
 */

#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "schurkit/matops.hpp"

namespace schurkit {

enum class KernelSetting { kDisk, kBall };

/// Szego kernel of the disk, 1 / (1 - z conj(w)).  Points must be strictly
/// inside the disk.
inline Complex szego_disk(Complex z, Complex w) {
    if (std::abs(z) >= 1.0 || std::abs(w) >= 1.0) {
        std::ostringstream os;
        os << "szego_disk: point on or outside the unit disk, |z|=" << std::abs(z)
           << " |w|=" << std::abs(w);
        throw DomainError(os.str());
    }
    return 1.0 / (1.0 - z * std::conj(w));
}

/// Szego kernel of the unit ball, 1 / (1 - <z, w>).
inline Complex szego_ball(const Vector& z, const Vector& w) {
    if (z.size() != w.size())
        throw ValidationError("szego_ball: dimension mismatch between points");
    if (z.norm() >= 1.0 || w.norm() >= 1.0) {
        std::ostringstream os;
        os << "szego_ball: point on or outside the unit ball, ||z||=" << z.norm()
           << " ||w||=" << w.norm();
        throw DomainError(os.str());
    }
    Complex ip = 0.0;
    for (Index j = 0; j < z.size(); ++j) ip += z(j) * std::conj(w(j));
    return 1.0 / (1.0 - ip);
}

/**
 * Finite sample of an operator-valued kernel: N evaluation points (d-tuples;
 * d = 1 in the disk setting) and the N x N array of block values
 * K(omega_i, omega_j).
 */
class KernelSample {
public:
    KernelSample(KernelSetting setting, std::vector<Vector> points, Index block_dim,
                 std::vector<std::vector<Matrix>> blocks)
        : setting_(setting),
          points_(std::move(points)),
          block_dim_(block_dim),
          blocks_(std::move(blocks)) {
        validate();
    }

    KernelSetting setting() const { return setting_; }
    Index size() const { return static_cast<Index>(points_.size()); }
    Index block_dim() const { return block_dim_; }
    Index point_dim() const { return points_.empty() ? 1 : points_[0].size(); }
    const std::vector<Vector>& points() const { return points_; }
    const Matrix& block(Index i, Index j) const {
        return blocks_[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }

    /// Assembled (N * block_dim) Gram matrix with block (i, j) = K(w_i, w_j).
    Matrix gram() const {
        const Index n = size();
        Matrix g(n * block_dim_, n * block_dim_);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                g.block(i * block_dim_, j * block_dim_, block_dim_, block_dim_) =
                    block(i, j);
        return g;
    }

private:
    void validate() const {
        const size_t n = points_.size();
        if (blocks_.size() != n)
            throw ValidationError("KernelSample: block row count != point count");
        const Index pdim = points_.empty() ? 1 : points_[0].size();
        for (const Vector& p : points_) {
            if (p.size() != pdim)
                throw ValidationError("KernelSample: inconsistent point dimension");
            if (setting_ == KernelSetting::kDisk && pdim != 1)
                throw ValidationError("KernelSample: disk points must be scalar");
            if (p.norm() >= 1.0)
                throw ValidationError(
                    "KernelSample: point on or outside the open domain");
        }
        double herm_dev = 0.0;
        double scale = 1.0;
        for (size_t i = 0; i < n; ++i) {
            if (blocks_[i].size() != n)
                throw ValidationError("KernelSample: ragged block array");
            for (size_t j = 0; j < n; ++j) {
                const Matrix& b = blocks_[i][j];
                if (b.rows() != block_dim_ || b.cols() != block_dim_)
                    throw ValidationError("KernelSample: block shape mismatch");
                if (!all_finite(b))
                    throw ValidationError("KernelSample: non-finite block entry");
                herm_dev = std::max(herm_dev, max_abs(b - blocks_[j][i].adjoint()));
                scale = std::max(scale, max_abs(b));
            }
        }
        if (herm_dev > 1e-12 * scale) {
            std::ostringstream os;
            os << "KernelSample: Hermitian symmetry violated, max |K(i,j) - K(j,i)*| = "
               << herm_dev;
            throw ValidationError(os.str());
        }
    }

    KernelSetting setting_;
    std::vector<Vector> points_;
    Index block_dim_;
    std::vector<std::vector<Matrix>> blocks_;
};

/// Szego value for either setting; points are stored as d-vectors.
inline Complex szego_value(KernelSetting setting, const Vector& z, const Vector& w) {
    if (setting == KernelSetting::kDisk) return szego_disk(z(0), w(0));
    return szego_ball(z, w);
}

/**
 * de Branges-Rovnyak kernel sample: block (i, j) is
 * (I - S(z_i) S(z_j)*) * szego(z_i, z_j).  The values S(z_i) may be
 * rectangular; blocks are square of the output dimension.  Nothing here
 * requires S to be contractive -- non-Schur data simply yields a non-PSD
 * sample.
 */
inline KernelSample debranges_kernel(const std::vector<Vector>& points,
                                     const std::vector<Matrix>& s_values,
                                     KernelSetting setting) {
    if (points.size() != s_values.size())
        throw ValidationError("debranges_kernel: point/value count mismatch");
    if (points.empty()) throw ValidationError("debranges_kernel: empty sample");
    const Index q = s_values[0].rows();
    const Index p = s_values[0].cols();
    for (const Matrix& s : s_values)
        if (s.rows() != q || s.cols() != p)
            throw ValidationError("debranges_kernel: S values have mixed shapes");
    const size_t n = points.size();
    std::vector<std::vector<Matrix>> blocks(n, std::vector<Matrix>(n));
    const Matrix eye = Matrix::Identity(q, q);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            blocks[i][j] = (eye - s_values[i] * s_values[j].adjoint()) *
                           szego_value(setting, points[i], points[j]);
    return KernelSample(setting, points, q, std::move(blocks));
}

/// Aronszajn positivity test: PSD check of the assembled Gram matrix.
inline PsdReport positivity_check(const KernelSample& k, double tol = kDefaultTol) {
    return psd_check(k.gram(), tol);
}

/**
 * Kolmogorov factorization K(w_i, w_j) = H_i H_j*: block rows of the
 * psd_factor of the Gram, partitioned per point.  All factors share the
 * column count (the numerical rank of the Gram).
 */
inline std::vector<Matrix> kolmogorov(const KernelSample& k, double tol = kDefaultTol) {
    const PsdReport report = positivity_check(k, tol);
    if (!report.is_psd) {
        std::ostringstream os;
        os << "kolmogorov: kernel sample is not PSD, min eigenvalue "
           << report.min_eigenvalue;
        throw NotPsdError(os.str(), report.min_eigenvalue);
    }
    const Matrix h = psd_factor(k.gram(), tol);
    std::vector<Matrix> factors;
    factors.reserve(static_cast<size_t>(k.size()));
    for (Index i = 0; i < k.size(); ++i)
        factors.push_back(h.middleRows(i * k.block_dim(), k.block_dim()));
    return factors;
}

// ---------------------------------------------------------------------------
// Completely positive kernels over A = M_k
// ---------------------------------------------------------------------------

/**
 * Sample of a completely positive kernel K(w, w')[a] with a ranging over the
 * full matrix algebra M_k and values acting on C^m.  The primitive data is
 * the value on each matrix unit E_ab; values on unit products (and on all of
 * M_k) follow by linearity, so the quantized Gram with blocks
 * K(w_i, w_j)[E_mu* E_nu] is assembled on demand.
 *
 * Unit index convention: mu = a * k + b  <->  E_ab (row a, column b), 0-based.
 */
class CPKernelSample {
public:
    CPKernelSample(std::vector<std::string> labels, Index alg_dim, Index rep_dim,
                   std::vector<std::vector<std::vector<Matrix>>> unit_values)
        : labels_(std::move(labels)),
          k_(alg_dim),
          m_(rep_dim),
          unit_values_(std::move(unit_values)) {
        validate();
    }

    Index size() const { return static_cast<Index>(labels_.size()); }
    Index alg_dim() const { return k_; }
    Index rep_dim() const { return m_; }
    const std::vector<std::string>& labels() const { return labels_; }

    /// K(w_i, w_j)[E_ab]
    const Matrix& unit_value(Index i, Index j, Index a, Index b) const {
        return unit_values_[static_cast<size_t>(i)][static_cast<size_t>(j)]
                           [static_cast<size_t>(a * k_ + b)];
    }

    /// K(w_i, w_j)[arg] for an arbitrary algebra element (k x k matrix).
    Matrix apply(Index i, Index j, const Matrix& arg) const {
        if (arg.rows() != k_ || arg.cols() != k_)
            throw ValidationError("CPKernelSample::apply: argument must be k x k");
        Matrix out = Matrix::Zero(m_, m_);
        for (Index a = 0; a < k_; ++a)
            for (Index b = 0; b < k_; ++b) out += arg(a, b) * unit_value(i, j, a, b);
        return out;
    }

    /// K(w_i, w_j)[1_A]
    Matrix unit_of_algebra_value(Index i, Index j) const {
        Matrix out = Matrix::Zero(m_, m_);
        for (Index a = 0; a < k_; ++a) out += unit_value(i, j, a, a);
        return out;
    }

    /**
     * The big (N k^2 m)-dimensional Gram matrix with blocks
     * K(w_i, w_j)[E_mu* E_nu] = delta_{a,c} K(w_i, w_j)[E_bd]
     * for mu = (a,b), nu = (c,d).  By bilinearity its PSD-ness is the
     * quantified complete positivity condition.
     */
    Matrix choi_gram() const {
        const Index n = size();
        const Index units = k_ * k_;
        Matrix g = Matrix::Zero(n * units * m_, n * units * m_);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                for (Index a = 0; a < k_; ++a)
                    for (Index b = 0; b < k_; ++b)
                        for (Index d = 0; d < k_; ++d) {
                            // mu = (a,b), nu = (a,d): E_mu* E_nu = E_bd
                            const Index row = (i * units + (a * k_ + b)) * m_;
                            const Index col = (j * units + (a * k_ + d)) * m_;
                            g.block(row, col, m_, m_) = unit_value(i, j, b, d);
                        }
        return g;
    }

    /// Classical Choi matrix of the map a -> K(w_i, w_j)[a]:
    /// sum_ab E_ab (x) K[E_ab], a (k m) x (k m) matrix.  Test oracle for the
    /// single-point examples.
    Matrix choi_matrix(Index i, Index j) const {
        Matrix c = Matrix::Zero(k_ * m_, k_ * m_);
        for (Index a = 0; a < k_; ++a)
            for (Index b = 0; b < k_; ++b)
                c.block(a * m_, b * m_, m_, m_) = unit_value(i, j, a, b);
        return c;
    }

private:
    void validate() const {
        const size_t n = labels_.size();
        if (k_ < 1 || m_ < 1)
            throw ValidationError("CPKernelSample: alg_dim and rep_dim must be >= 1");
        if (unit_values_.size() != n)
            throw ValidationError("CPKernelSample: value rows != label count");
        for (size_t i = 0; i < n; ++i) {
            if (unit_values_[i].size() != n)
                throw ValidationError("CPKernelSample: ragged value array");
            for (size_t j = 0; j < n; ++j) {
                if (unit_values_[i][j].size() != static_cast<size_t>(k_ * k_))
                    throw ValidationError("CPKernelSample: expected k^2 unit values");
                for (const Matrix& v : unit_values_[i][j]) {
                    if (v.rows() != m_ || v.cols() != m_)
                        throw ValidationError("CPKernelSample: unit value shape mismatch");
                    if (!all_finite(v))
                        throw ValidationError("CPKernelSample: non-finite unit value");
                }
            }
        }
        // Hermitian symmetry of the quantized Gram in primitive terms:
        // K(w_i, w_j)[E_bd] = (K(w_j, w_i)[E_db])*.
        double dev = 0.0;
        double scale = 1.0;
        for (Index i = 0; i < size(); ++i)
            for (Index j = 0; j < size(); ++j)
                for (Index b = 0; b < k_; ++b)
                    for (Index d = 0; d < k_; ++d) {
                        dev = std::max(dev, max_abs(unit_value(i, j, b, d) -
                                                    unit_value(j, i, d, b).adjoint()));
                        scale = std::max(scale, max_abs(unit_value(i, j, b, d)));
                    }
        if (dev > 1e-12 * scale) {
            std::ostringstream os;
            os << "CPKernelSample: Hermitian symmetry violated, deviation " << dev;
            throw ValidationError(os.str());
        }
    }

    std::vector<std::string> labels_;
    Index k_, m_;
    // unit_values_[i][j][a*k+b] = K(w_i, w_j)[E_ab]
    std::vector<std::vector<std::vector<Matrix>>> unit_values_;
};

/// Complete positivity test: PSD check of the quantized Gram.  For k = 1 this
/// is exactly the scalar-algebra Aronszajn test on the same blocks.
inline PsdReport cp_positivity_check(const CPKernelSample& k, double tol = kDefaultTol) {
    return psd_check(k.choi_gram(), tol);
}

/**
 * GNS-style Kolmogorov decomposition of a CP kernel:
 * K(w_i, w_j)[a] = H_i pi(a) H_j* with pi a *-representation of M_k.
 */
struct CPDecomposition {
    Index hilbert_dim = 0;
    std::vector<Matrix> h_maps;  ///< per point, m x hilbert_dim
    std::vector<Matrix> pi;      ///< per matrix unit (index a*k+b), hilbert_dim^2
    double star_hom_residual = 0.0;
    double reconstruction_residual = 0.0;
};

/**
 * Finite-dimensional GNS construction on the formal symbols (w_i, E_mu, e_s):
 * the quantized Gram is factored, the numerical kernel is quotiented away by
 * the rank cut, and pi acts by left multiplication on the symbols.
 *
 * Throws NotPsdError when the kernel fails complete positivity at tol, and a
 * plain Error when the resulting pi misses the *-homomorphism bound (which
 * signals an inconsistent input or a tolerance that is too loose).
 */
inline CPDecomposition cp_kolmogorov(const CPKernelSample& kernel,
                                     double tol = kDefaultTol) {
    const PsdReport psd = cp_positivity_check(kernel, tol);
    if (!psd.is_psd) {
        std::ostringstream os;
        os << "cp_kolmogorov: kernel is not completely positive, min eigenvalue "
           << psd.min_eigenvalue;
        throw NotPsdError(os.str(), psd.min_eigenvalue);
    }
    const Index n = kernel.size();
    const Index k = kernel.alg_dim();
    const Index m = kernel.rep_dim();
    const Index units = k * k;

    const Matrix gram = kernel.choi_gram();
    const Matrix f = psd_factor(gram, tol);  // gram = f f*
    const Index rank = f.cols();

    // Column r of `vecs` is the GNS vector of the r-th symbol.
    const Matrix vecs = f.adjoint();  // rank x (n*units*m)
    auto symbol = [&](Index i, Index a, Index b, Index s) {
        return (i * units + (a * k + b)) * m + s;
    };

    CPDecomposition out;
    out.hilbert_dim = rank;

    // pi(E_ab): maps the symbol (i, E_cd, s) to delta_{b,c} (i, E_ad, s).
    // Solved in least squares against the spanning family of GNS vectors.
    const Matrix normal = vecs * vecs.adjoint();  // rank x rank, = diag of kept eigenvalues
    Eigen::LLT<Matrix> llt(normal);
    if (llt.info() != Eigen::Success)
        throw Error("cp_kolmogorov: GNS normal matrix not positive definite");
    out.pi.reserve(static_cast<size_t>(units));
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            Matrix mapped = Matrix::Zero(rank, n * units * m);
            for (Index i = 0; i < n; ++i)
                for (Index c = 0; c < k; ++c)
                    for (Index d = 0; d < k; ++d)
                        if (b == c)
                            for (Index s = 0; s < m; ++s)
                                mapped.col(symbol(i, c, d, s)) =
                                    vecs.col(symbol(i, a, d, s));
            // pi = mapped * pinv(vecs) = mapped * vecs* * (vecs vecs*)^-1
            out.pi.push_back(llt.solve(vecs * mapped.adjoint()).adjoint());
        }

    // H(w_i)* e_s = GNS vector of (w_i, 1_A, e_s) = sum_a symbol (i, E_aa, s).
    out.h_maps.reserve(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) {
        Matrix h_adj = Matrix::Zero(rank, m);
        for (Index s = 0; s < m; ++s)
            for (Index a = 0; a < k; ++a) h_adj.col(s) += vecs.col(symbol(i, a, a, s));
        out.h_maps.push_back(h_adj.adjoint());
    }

    // *-homomorphism residuals on matrix units.
    double hom = 0.0;
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            const Matrix& pab = out.pi[static_cast<size_t>(a * k + b)];
            hom = std::max(hom,
                           max_abs(pab.adjoint() - out.pi[static_cast<size_t>(b * k + a)]));
            for (Index c = 0; c < k; ++c)
                for (Index d = 0; d < k; ++d) {
                    const Matrix prod = pab * out.pi[static_cast<size_t>(c * k + d)];
                    const Matrix expect =
                        (b == c) ? out.pi[static_cast<size_t>(a * k + d)]
                                 : Matrix::Zero(rank, rank);
                    hom = std::max(hom, max_abs(prod - expect));
                }
        }
    out.star_hom_residual = hom;

    // Reconstruction residual on all matrix units and point pairs.
    double rec = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b < k; ++b)
                    rec = std::max(
                        rec, max_abs(out.h_maps[static_cast<size_t>(i)] *
                                         out.pi[static_cast<size_t>(a * k + b)] *
                                         out.h_maps[static_cast<size_t>(j)].adjoint() -
                                     kernel.unit_value(i, j, a, b)));
    out.reconstruction_residual = rec;

    if (out.star_hom_residual > std::max(1e-9, tol)) {
        std::ostringstream os;
        os << "cp_kolmogorov: *-homomorphism residual " << out.star_hom_residual
           << " exceeds bound (tolerance too loose or input inconsistent)";
        throw Error(os.str());
    }
    return out;
}

/// Outcome of the module-map reduction test (kernels with
/// K[a*a'] = pi_E(a)* K[1] pi_E(a')).
struct ModuleMapReduction {
    bool holds = false;
    double max_deviation = 0.0;
    bool cp_psd = false;   ///< complete-positivity verdict of the kernel
    bool k0_psd = false;   ///< Aronszajn verdict of K0 = K[1]
    bool verdicts_agree = false;
};

namespace detail {

inline void require_star_rep(const std::vector<Matrix>& pi_e, Index k, Index m,
                             double tol) {
    if (pi_e.size() != static_cast<size_t>(k * k))
        throw ValidationError("modulemap_reduction_check: need k^2 unit images");
    double dev = 0.0;
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            const Matrix& pab = pi_e[static_cast<size_t>(a * k + b)];
            if (pab.rows() != m || pab.cols() != m)
                throw ValidationError("modulemap_reduction_check: rep shape mismatch");
            dev = std::max(dev,
                           max_abs(pab.adjoint() - pi_e[static_cast<size_t>(b * k + a)]));
            for (Index c = 0; c < k; ++c)
                for (Index d = 0; d < k; ++d) {
                    const Matrix prod = pab * pi_e[static_cast<size_t>(c * k + d)];
                    const Matrix expect = (b == c)
                                              ? pi_e[static_cast<size_t>(a * k + d)]
                                              : Matrix::Zero(m, m);
                    dev = std::max(dev, max_abs(prod - expect));
                }
        }
    if (dev > tol) {
        std::ostringstream os;
        os << "modulemap_reduction_check: pi_E is not a *-representation, residual "
           << dev;
        throw ValidationError(os.str());
    }
}

}  // namespace detail

/**
 * Checks the module-map identity K[E_mu* E_nu] = pi_E(E_mu)* K[1] pi_E(E_nu)
 * on every matrix-unit pair and point pair.  When the identity holds within
 * tol, also verifies that complete positivity of K is equivalent to plain
 * Aronszajn positivity of K0 = K[1].  Never throws on deviation; the result
 * carries the numbers.
 */
inline ModuleMapReduction modulemap_reduction_check(const CPKernelSample& kernel,
                                                    const std::vector<Matrix>& pi_e,
                                                    double tol = kDefaultTol) {
    const Index n = kernel.size();
    const Index k = kernel.alg_dim();
    const Index m = kernel.rep_dim();
    detail::require_star_rep(pi_e, k, m, 1e-10);

    ModuleMapReduction out;
    double dev = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const Matrix k0 = kernel.unit_of_algebra_value(i, j);
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b < k; ++b)
                    for (Index c = 0; c < k; ++c)
                        for (Index d = 0; d < k; ++d) {
                            // E_mu = E_ab, E_nu = E_cd; E_mu* E_nu = delta_ac E_bd
                            const Matrix lhs = (a == c)
                                                   ? kernel.unit_value(i, j, b, d)
                                                   : Matrix::Zero(m, m);
                            const Matrix rhs =
                                pi_e[static_cast<size_t>(a * k + b)].adjoint() * k0 *
                                pi_e[static_cast<size_t>(c * k + d)];
                            dev = std::max(dev, max_abs(lhs - rhs));
                        }
        }
    out.max_deviation = dev;
    out.holds = dev <= tol * 10.0 + 1e-12;

    if (out.holds) {
        out.cp_psd = cp_positivity_check(kernel, tol).is_psd;
        Matrix k0_gram(n * m, n * m);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                k0_gram.block(i * m, j * m, m, m) = kernel.unit_of_algebra_value(i, j);
        out.k0_psd = psd_check(k0_gram, tol).is_psd;
        out.verdicts_agree = (out.cp_psd == out.k0_psd);
    }
    return out;
}

}  // namespace schurkit
