/**
 * @file freeseries.hpp
 * @brief Formal power series over the free semigroup F_d and over commutative
 *        multi-indices: words, transpose, convolution, the noncommutative
 *        Szego kernel, truncated Fock spaces and shift / multiplication
 *        operators.
 *
 * Conventions, fixed once for the whole library:
 *  - letters are 1-indexed (1..d);
 *  - a word stores its letters in written order, so concatenation appends and
 *    the transpose reverses;
 *  - operator powers compose in written order as well: for a word with
 *    letters (l_0, ..., l_{k-1}), T^w = T_{l_0} T_{l_1} ... T_{l_{k-1}};
 *  - truncated bases are graded lexicographic (degree-major, letters
 *    ascending), which pins every matrix layout and the serialization.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "schurkit/common.hpp"

namespace schurkit {

/// Word over the alphabet {1..d}; empty sequence is the semigroup unit.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
    Word(std::initializer_list<int> letters) : letters_(letters) {}

    const std::vector<int>& letters() const { return letters_; }
    Index length() const { return static_cast<Index>(letters_.size()); }
    bool empty() const { return letters_.empty(); }

    /// Letters must lie in 1..d.
    void validate(int d) const {
        for (int l : letters_)
            if (l < 1 || l > d) {
                std::ostringstream os;
                os << "Word: letter " << l << " outside 1.." << d;
                throw ValidationError(os.str());
            }
    }

    Word concat(const Word& other) const {
        std::vector<int> ls = letters_;
        ls.insert(ls.end(), other.letters_.begin(), other.letters_.end());
        return Word(std::move(ls));
    }

    /// Reversal of the letter sequence (an involution).
    Word transpose() const {
        return Word(std::vector<int>(letters_.rbegin(), letters_.rend()));
    }

    /// Canonical commutative representative: letters sorted ascending.
    Word sorted() const {
        std::vector<int> ls = letters_;
        std::sort(ls.begin(), ls.end());
        return Word(std::move(ls));
    }

    /// Multiplicity of each letter, as a multi-index of length d.
    std::vector<int> multi_index(int d) const {
        std::vector<int> n(static_cast<size_t>(d), 0);
        for (int l : letters_) ++n[static_cast<size_t>(l - 1)];
        return n;
    }

    bool operator==(const Word& o) const { return letters_ == o.letters_; }

    /// Graded lexicographic: degree first, then letters left to right.
    std::strong_ordering operator<=>(const Word& o) const {
        if (letters_.size() != o.letters_.size())
            return letters_.size() <=> o.letters_.size();
        return letters_ <=> o.letters_;
    }

private:
    std::vector<int> letters_;
};

inline Word word_transpose(const Word& w) { return w.transpose(); }

/// Coefficient of z^alpha w^(beta^T) in the NC Szego kernel: 1 iff alpha == beta.
inline double nc_szego_coeff(const Word& alpha, const Word& beta) {
    return alpha == beta ? 1.0 : 0.0;
}

/// Number of words of length <= N over d letters.
inline Index word_count(int d, int degree_cap) {
    Index total = 0;
    Index layer = 1;
    for (int n = 0; n <= degree_cap; ++n) {
        total += layer;
        layer *= d;
    }
    return total;
}

/// All words of length <= N in graded-lex order.
inline std::vector<Word> words_up_to(int d, int degree_cap) {
    std::vector<Word> out;
    out.reserve(static_cast<size_t>(word_count(d, degree_cap)));
    out.emplace_back();
    size_t layer_begin = 0;
    for (int n = 1; n <= degree_cap; ++n) {
        const size_t layer_end = out.size();
        for (size_t i = layer_begin; i < layer_end; ++i)
            for (int l = 1; l <= d; ++l) out.push_back(out[i].concat(Word{l}));
        layer_begin = layer_end;
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Position of a word in the graded-lex basis.
inline Index word_index(const Word& w, int d) {
    Index offset = 0;
    Index layer = 1;
    for (Index n = 0; n < w.length(); ++n) {
        offset += layer;
        layer *= d;
    }
    Index within = 0;
    for (int l : w.letters()) within = within * d + (l - 1);
    return offset + within;
}

/// Exact rational, used for the Drury-Arveson weights.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

/**
 * Drury-Arveson weight n!/|n|! for a multi-index, returned exactly as
 * 1 / multinomial(|n|; n).  Throws ValidationError on 64-bit overflow
 * (far beyond desk scale).
 */
inline Rational da_weight(const std::vector<int>& n) {
    for (int v : n)
        if (v < 0) throw ValidationError("da_weight: negative multi-index entry");
    std::uint64_t multinomial = 1;
    std::uint64_t cumulative = 0;
    for (int v : n) {
        // multiply by C(cumulative + v, v), exactly
        for (int i = 1; i <= v; ++i) {
            ++cumulative;
            const auto hi = static_cast<unsigned __int128>(multinomial) * cumulative;
            if (hi / i > UINT64_MAX)
                throw ValidationError("da_weight: multinomial exceeds 64 bits");
            multinomial = static_cast<std::uint64_t>(hi / i);
        }
    }
    return Rational{1, multinomial};
}

/**
 * Formal power series sum_alpha s_alpha z^alpha with matrix coefficients of a
 * common shape.  In commutative mode words are canonicalized to their sorted
 * representative, so one code path serves both the free semigroup and the
 * multi-index (ball) settings.
 */
class FormalSeries {
public:
    FormalSeries(int d, Index coeff_rows, Index coeff_cols, bool commutative = false)
        : d_(d), rows_(coeff_rows), cols_(coeff_cols), commutative_(commutative) {
        if (d < 1) throw ValidationError("FormalSeries: alphabet size must be >= 1");
        if (coeff_rows < 0 || coeff_cols < 0)
            throw ValidationError("FormalSeries: negative coefficient shape");
    }

    int d() const { return d_; }
    Index coeff_rows() const { return rows_; }
    Index coeff_cols() const { return cols_; }
    bool commutative() const { return commutative_; }
    const std::map<Word, Matrix>& terms() const { return terms_; }

    /// Adds into the coefficient at `w` (canonicalized in commutative mode).
    void add_term(const Word& w, const Matrix& coeff) {
        w.validate(d_);
        if (coeff.rows() != rows_ || coeff.cols() != cols_) {
            std::ostringstream os;
            os << "FormalSeries: coefficient shape " << coeff.rows() << "x"
               << coeff.cols() << " does not match " << rows_ << "x" << cols_;
            throw ValidationError(os.str());
        }
        const Word key = commutative_ ? w.sorted() : w;
        auto it = terms_.find(key);
        if (it == terms_.end())
            terms_.emplace(key, coeff);
        else
            it->second += coeff;
    }

    void set_term(const Word& w, const Matrix& coeff) {
        const Word key = commutative_ ? w.sorted() : w;
        terms_.erase(key);
        add_term(key, coeff);
    }

    /// Coefficient at `w`, zero if absent.
    Matrix coeff(const Word& w) const {
        const Word key = commutative_ ? w.sorted() : w;
        auto it = terms_.find(key);
        return it == terms_.end() ? Matrix::Zero(rows_, cols_) : it->second;
    }

    Index max_degree() const {
        Index deg = 0;
        for (const auto& [w, c] : terms_) deg = std::max(deg, w.length());
        return deg;
    }

    /// Drops terms of degree > N and coefficients that are exactly zero.
    FormalSeries truncate(Index degree_cap) const {
        FormalSeries out(d_, rows_, cols_, commutative_);
        for (const auto& [w, c] : terms_)
            if (w.length() <= degree_cap && max_abs(c) != 0.0) out.add_term(w, c);
        return out;
    }

    /// Scalar constant series c * I.
    static FormalSeries constant(int d, const Matrix& c, bool commutative = false) {
        FormalSeries s(d, c.rows(), c.cols(), commutative);
        s.add_term(Word{}, c);
        return s;
    }

private:
    int d_;
    Index rows_, cols_;
    bool commutative_;
    std::map<Word, Matrix> terms_;
};

/**
 * Noncommutative convolution product (S * f)(z) = sum s_alpha f_beta z^(alpha beta).
 * Commutative mode lands on multi-index addition through canonicalization.
 * Exact on finite supports; nothing is truncated here.
 */
inline FormalSeries series_multiply(const FormalSeries& s, const FormalSeries& f) {
    if (s.d() != f.d())
        throw ValidationError("series_multiply: alphabet size mismatch");
    if (s.commutative() != f.commutative())
        throw ValidationError("series_multiply: commutativity flag mismatch");
    if (s.coeff_cols() != f.coeff_rows())
        throw ValidationError("series_multiply: coefficient shape mismatch");
    FormalSeries out(s.d(), s.coeff_rows(), f.coeff_cols(), s.commutative());
    for (const auto& [alpha, sa] : s.terms())
        for (const auto& [beta, fb] : f.terms())
            out.add_term(alpha.concat(beta), sa * fb);
    return out;
}

/**
 * Fock-space vector truncated at degree N: one block_dim coefficient block per
 * word of length <= N, stacked in graded-lex order.
 */
struct FockVector {
    int d = 1;
    Index degree_cap = 0;
    Index block_dim = 1;
    Vector coefficients;  // length block_dim * word_count(d, degree_cap)

    static FockVector zero(int d, Index degree_cap, Index block_dim) {
        FockVector f;
        f.d = d;
        f.degree_cap = degree_cap;
        f.block_dim = block_dim;
        f.coefficients = Vector::Zero(block_dim * word_count(d, static_cast<int>(degree_cap)));
        return f;
    }

    Eigen::VectorBlock<Vector> block(const Word& w) {
        return coefficients.segment(word_index(w, d) * block_dim, block_dim);
    }
};

/// l2 norm of the stacked coefficients.
inline double fock_norm(const FockVector& f) { return f.coefficients.norm(); }

/// Stacks the coefficients of a series (viewed as column blocks) into a
/// truncated Fock vector; requires coeff_cols == 1.
inline FockVector series_to_fock(const FormalSeries& s, Index degree_cap) {
    if (s.coeff_cols() != 1)
        throw ValidationError("series_to_fock: series must have column coefficients");
    FockVector f = FockVector::zero(s.d(), degree_cap, s.coeff_rows());
    for (const auto& [w, c] : s.terms())
        if (w.length() <= degree_cap) f.block(w) = c.col(0);
    return f;
}

/**
 * Matrix of the right creation operator S_j: f(z) -> f(z) z_j on the truncated
 * Fock space (graded-lex basis, block_dim coefficients).  Words of length N
 * are annihilated by the truncation; the adjoint matrix implements the
 * backward shift f_v <- f_(v j).
 */
inline Matrix shift_matrix(int j, int degree_cap, int d, Index block_dim = 1) {
    if (j < 1 || j > d) throw ValidationError("shift_matrix: letter outside 1..d");
    const Index w = word_count(d, degree_cap);
    Matrix m = Matrix::Zero(w * block_dim, w * block_dim);
    for (const Word& v : words_up_to(d, degree_cap)) {
        if (v.length() == degree_cap) continue;
        const Index src = word_index(v, d);
        const Index dst = word_index(v.concat(Word{j}), d);
        m.block(dst * block_dim, src * block_dim, block_dim, block_dim) =
            Matrix::Identity(block_dim, block_dim);
    }
    return m;
}

/**
 * Matrix of the compressed multiplication operator P_N M_S |_N between
 * truncated Fock spaces: block (v, beta) equals s_alpha when v = alpha beta.
 * Series arithmetic stays exact elsewhere; only the operator picture models
 * the finite-section compression.
 */
inline Matrix mult_operator(const FormalSeries& s, int degree_cap) {
    if (s.commutative())
        throw ValidationError("mult_operator: series must be in noncommutative mode");
    const int d = s.d();
    const Index w = word_count(d, degree_cap);
    const Index br = s.coeff_rows();
    const Index bc = s.coeff_cols();
    Matrix m = Matrix::Zero(w * br, w * bc);
    for (const auto& [alpha, sa] : s.terms()) {
        if (alpha.length() > degree_cap) continue;
        for (const Word& beta : words_up_to(d, degree_cap - static_cast<int>(alpha.length()))) {
            const Word v = alpha.concat(beta);
            m.block(word_index(v, d) * br, word_index(beta, d) * bc, br, bc) = sa;
        }
    }
    return m;
}

/// Coefficients K_{alpha,beta} of the NC de Branges-Rovnyak kernel on the
/// degree-N truncation, with the assembled Gram matrix alongside.
struct NcKernelCoeffs {
    int d = 1;
    int degree_cap = 0;
    Index block_dim = 1;
    std::vector<Word> words;  ///< graded-lex basis
    Matrix gram;              ///< (words * block_dim)^2, block (a,b) = K_{alpha_a, alpha_b}

    Matrix block(const Word& alpha, const Word& beta) const {
        return gram.block(word_index(alpha, d) * block_dim,
                          word_index(beta, d) * block_dim, block_dim, block_dim);
    }
};

/**
 * NC de Branges-Rovnyak kernel coefficients
 *   K_{alpha,beta} = delta_{alpha,beta} I - sum_{alpha=a g, beta=b g} s_a s_b*
 * (sum over common suffixes g), equivalently the Gram blocks of
 * I - M_S M_S* in the truncated basis.
 */
inline NcKernelCoeffs nc_debranges_coeffs(const FormalSeries& s, int degree_cap) {
    if (s.commutative())
        throw ValidationError("nc_debranges_coeffs: series must be in noncommutative mode");
    if (s.coeff_rows() == 0)
        throw ValidationError("nc_debranges_coeffs: empty coefficient blocks");
    NcKernelCoeffs out;
    out.d = s.d();
    out.degree_cap = degree_cap;
    out.block_dim = s.coeff_rows();
    out.words = words_up_to(s.d(), degree_cap);
    const Index q = out.block_dim;
    const Index n = static_cast<Index>(out.words.size());
    out.gram = Matrix::Zero(n * q, n * q);
    for (Index a = 0; a < n; ++a)
        out.gram.block(a * q, a * q, q, q) = Matrix::Identity(q, q);
    // Subtract s_a s_b* over pairs sharing a common suffix.
    for (Index a = 0; a < n; ++a) {
        const auto& wa = out.words[static_cast<size_t>(a)].letters();
        for (Index b = 0; b < n; ++b) {
            const auto& wb = out.words[static_cast<size_t>(b)].letters();
            Matrix acc = Matrix::Zero(q, q);
            const size_t max_suffix = std::min(wa.size(), wb.size());
            for (size_t g = 0; g <= max_suffix; ++g) {
                // common suffix of length g
                if (g > 0 && !std::equal(wa.end() - static_cast<long>(g), wa.end(),
                                         wb.end() - static_cast<long>(g)))
                    break;  // suffixes nest: once they disagree, longer ones do too
                const Word pa(std::vector<int>(wa.begin(), wa.end() - static_cast<long>(g)));
                const Word pb(std::vector<int>(wb.begin(), wb.end() - static_cast<long>(g)));
                acc += s.coeff(pa) * s.coeff(pb).adjoint();
            }
            out.gram.block(a * q, b * q, q, q) -= acc;
        }
    }
    return out;
}

}  // namespace schurkit
