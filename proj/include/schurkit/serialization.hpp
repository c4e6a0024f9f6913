/**
 * @file serialization.hpp
 * @brief JSON schemas for every wire type.  Complex numbers are [re, im]
 *        pairs; matrices carry explicit rows/cols plus a flat row-major entry
 *        list, so empty dimensions round-trip exactly.  Keys are emitted in
 *        insertion order (ordered_json) to keep reports byte-stable.
 */

#pragma once

#include <json.hpp>

#include "schurkit/funccalc.hpp"
#include "schurkit/kernels.hpp"
#include "schurkit/realization.hpp"
#include "schurkit/tvsystems.hpp"

namespace schurkit {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// scalars and matrices
// ---------------------------------------------------------------------------

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError("complex: expected [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json matrix_to_json(const Matrix& m) {
    Json entries = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) entries.push_back(complex_to_json(m(i, j)));
    Json out;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    out["entries"] = std::move(entries);
    return out;
}

inline Matrix matrix_from_json(const Json& j, const char* field = "matrix") {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("entries")) {
        std::ostringstream os;
        os << field << ": expected {rows, cols, entries}";
        throw ValidationError(os.str());
    }
    const Index rows = j["rows"].get<Index>();
    const Index cols = j["cols"].get<Index>();
    if (rows < 0 || cols < 0) throw ValidationError("matrix: negative dimension");
    const Json& entries = j["entries"];
    if (!entries.is_array() || entries.size() != static_cast<size_t>(rows * cols)) {
        std::ostringstream os;
        os << field << ".entries: expected " << rows * cols << " complex pairs";
        throw ValidationError(os.str());
    }
    Matrix m(rows, cols);
    size_t idx = 0;
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(entries[idx++]);
    if (!all_finite(m)) throw ValidationError("matrix: non-finite entry");
    return m;
}

inline Json point_to_json(const Vector& z) {
    Json out = Json::array();
    for (Index i = 0; i < z.size(); ++i) out.push_back(complex_to_json(z(i)));
    return out;
}

inline Vector point_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("point: expected [[re,im],...]");
    Vector z(static_cast<Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) z(static_cast<Index>(i)) = complex_from_json(j[i]);
    return z;
}

// ---------------------------------------------------------------------------
// kernel samples
// ---------------------------------------------------------------------------

inline Json kernel_sample_to_json(const KernelSample& k) {
    Json out;
    out["setting"] = k.setting() == KernelSetting::kDisk ? "disk" : "ball";
    out["d"] = k.point_dim();
    Json pts = Json::array();
    for (const Vector& p : k.points()) pts.push_back(point_to_json(p));
    out["points"] = std::move(pts);
    out["block_dim"] = k.block_dim();
    Json rows = Json::array();
    for (Index i = 0; i < k.size(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < k.size(); ++j) row.push_back(matrix_to_json(k.block(i, j)));
        rows.push_back(std::move(row));
    }
    out["blocks"] = std::move(rows);
    return out;
}

inline KernelSample kernel_sample_from_json(const Json& j) {
    for (const char* key : {"setting", "points", "block_dim", "blocks"})
        if (!j.contains(key)) {
            std::ostringstream os;
            os << "kernel sample: missing field '" << key << "'";
            throw ValidationError(os.str());
        }
    const std::string setting_name = j["setting"].get<std::string>();
    KernelSetting setting;
    if (setting_name == "disk")
        setting = KernelSetting::kDisk;
    else if (setting_name == "ball")
        setting = KernelSetting::kBall;
    else
        throw ValidationError("kernel sample: setting must be 'disk' or 'ball'");
    std::vector<Vector> points;
    for (const Json& p : j["points"]) points.push_back(point_from_json(p));
    const Index block_dim = j["block_dim"].get<Index>();
    std::vector<std::vector<Matrix>> blocks;
    for (const Json& row : j["blocks"]) {
        std::vector<Matrix> r;
        for (const Json& b : row) r.push_back(matrix_from_json(b, "blocks"));
        blocks.push_back(std::move(r));
    }
    return KernelSample(setting, std::move(points), block_dim, std::move(blocks));
}

inline Json cp_kernel_to_json(const CPKernelSample& k) {
    Json out;
    out["points"] = k.labels();
    out["alg_dim"] = k.alg_dim();
    out["rep_dim"] = k.rep_dim();
    Json rows = Json::array();
    for (Index i = 0; i < k.size(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < k.size(); ++j) {
            Json units = Json::array();
            for (Index a = 0; a < k.alg_dim(); ++a)
                for (Index b = 0; b < k.alg_dim(); ++b)
                    units.push_back(matrix_to_json(k.unit_value(i, j, a, b)));
            row.push_back(std::move(units));
        }
        rows.push_back(std::move(row));
    }
    out["unit_blocks"] = std::move(rows);
    return out;
}

inline CPKernelSample cp_kernel_from_json(const Json& j) {
    for (const char* key : {"points", "alg_dim", "rep_dim", "unit_blocks"})
        if (!j.contains(key)) {
            std::ostringstream os;
            os << "cp kernel: missing field '" << key << "'";
            throw ValidationError(os.str());
        }
    std::vector<std::string> labels = j["points"].get<std::vector<std::string>>();
    const Index k = j["alg_dim"].get<Index>();
    const Index m = j["rep_dim"].get<Index>();
    std::vector<std::vector<std::vector<Matrix>>> values;
    for (const Json& row : j["unit_blocks"]) {
        std::vector<std::vector<Matrix>> r;
        for (const Json& cell : row) {
            std::vector<Matrix> units;
            for (const Json& u : cell) units.push_back(matrix_from_json(u, "unit_blocks"));
            r.push_back(std::move(units));
        }
        values.push_back(std::move(r));
    }
    return CPKernelSample(std::move(labels), k, m, std::move(values));
}

// ---------------------------------------------------------------------------
// formal series
// ---------------------------------------------------------------------------

inline Json series_to_json(const FormalSeries& s) {
    Json out;
    out["d"] = s.d();
    out["commutative"] = s.commutative();
    out["rows"] = s.coeff_rows();
    out["cols"] = s.coeff_cols();
    Json terms = Json::array();
    for (const auto& [w, c] : s.terms()) {
        Json term;
        term["word"] = w.letters();
        term["coeff"] = matrix_to_json(c);
        terms.push_back(std::move(term));
    }
    out["terms"] = std::move(terms);
    return out;
}

inline FormalSeries series_from_json(const Json& j) {
    for (const char* key : {"d", "commutative", "rows", "cols", "terms"})
        if (!j.contains(key)) {
            std::ostringstream os;
            os << "series: missing field '" << key << "'";
            throw ValidationError(os.str());
        }
    FormalSeries s(j["d"].get<int>(), j["rows"].get<Index>(), j["cols"].get<Index>(),
                   j["commutative"].get<bool>());
    for (const Json& term : j["terms"]) {
        if (!term.contains("word") || !term.contains("coeff"))
            throw ValidationError("series.terms: expected {word, coeff}");
        s.add_term(Word(term["word"].get<std::vector<int>>()),
                   matrix_from_json(term["coeff"], "terms.coeff"));
    }
    return s;
}

// ---------------------------------------------------------------------------
// colligations
// ---------------------------------------------------------------------------

inline Json colligation_to_json(const Colligation& u) {
    Json out;
    out["d"] = u.d();
    out["n"] = u.state_dim();
    out["p"] = u.input_dim();
    out["q"] = u.output_dim();
    out["A"] = matrix_to_json(u.a());
    out["B"] = matrix_to_json(u.b());
    out["C"] = matrix_to_json(u.c());
    out["D"] = matrix_to_json(u.d_block());
    out["flavor"] = flavor_name(u.flavor());
    return out;
}

inline Colligation colligation_from_json(const Json& j) {
    for (const char* key : {"d", "n", "p", "q", "A", "B", "C", "D", "flavor"})
        if (!j.contains(key)) {
            std::ostringstream os;
            os << "colligation: missing field '" << key << "'";
            throw ValidationError(os.str());
        }
    const std::string fl = j["flavor"].get<std::string>();
    Flavor flavor;
    if (fl == "contractive")
        flavor = Flavor::kContractive;
    else if (fl == "coisometric")
        flavor = Flavor::kCoisometric;
    else if (fl == "unitary")
        flavor = Flavor::kUnitary;
    else
        throw ValidationError("colligation: unknown flavor '" + fl + "'");
    Colligation u(j["d"].get<int>(), matrix_from_json(j["A"], "A"),
                  matrix_from_json(j["B"], "B"), matrix_from_json(j["C"], "C"),
                  matrix_from_json(j["D"], "D"), flavor);
    if (u.state_dim() != j["n"].get<Index>() || u.input_dim() != j["p"].get<Index>() ||
        u.output_dim() != j["q"].get<Index>())
        throw ValidationError("colligation: declared dims disagree with blocks");
    return u;
}

// ---------------------------------------------------------------------------
// time-varying objects
// ---------------------------------------------------------------------------

/// LowerTriWindow as nested row arrays; strict upper entries must be exactly 0.
inline Json window_to_json(const LowerTriWindow& t) {
    Json rows = Json::array();
    for (Index i = 0; i < t.window(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < t.window(); ++j) row.push_back(complex_to_json(t.t(i, j)));
        rows.push_back(std::move(row));
    }
    Json out;
    out["L"] = t.window();
    out["T"] = std::move(rows);
    return out;
}

inline LowerTriWindow window_from_json(const Json& j) {
    if (!j.contains("L") || !j.contains("T"))
        throw ValidationError("window: expected {L, T}");
    const Index l = j["L"].get<Index>();
    const Json& rows = j["T"];
    if (!rows.is_array() || rows.size() != static_cast<size_t>(l))
        throw ValidationError("window.T: expected L rows");
    Matrix t(l, l);
    for (Index i = 0; i < l; ++i) {
        const Json& row = rows[static_cast<size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<size_t>(l))
            throw ValidationError("window.T: ragged row");
        for (Index jj = 0; jj < l; ++jj)
            t(i, jj) = complex_from_json(row[static_cast<size_t>(jj)]);
    }
    return LowerTriWindow(std::move(t));
}

inline Json tv_system_to_json(const TVSystem& sys) {
    Json out;
    out["L"] = sys.window;
    out["state_dims"] = sys.state_dims;
    Json seq = Json::array();
    for (const Matrix& u : sys.u_seq) seq.push_back(matrix_to_json(u));
    out["U_seq"] = std::move(seq);
    out["conservative"] = sys.conservative;
    return out;
}

inline TVSystem tv_system_from_json(const Json& j) {
    for (const char* key : {"L", "state_dims", "U_seq", "conservative"})
        if (!j.contains(key)) {
            std::ostringstream os;
            os << "tv system: missing field '" << key << "'";
            throw ValidationError(os.str());
        }
    TVSystem sys;
    sys.window = j["L"].get<Index>();
    sys.state_dims = j["state_dims"].get<std::vector<Index>>();
    for (const Json& u : j["U_seq"]) sys.u_seq.push_back(matrix_from_json(u, "U_seq"));
    sys.conservative = j["conservative"].get<bool>();
    sys.validate();
    return sys;
}

// ---------------------------------------------------------------------------
// operator tuples
// ---------------------------------------------------------------------------

inline Json tuple_to_json(const OperatorTuple& t) {
    Json out;
    out["d"] = t.d;
    out["k"] = t.k;
    out["commuting"] = t.commuting;
    Json blocks = Json::array();
    for (const Matrix& b : t.blocks) blocks.push_back(matrix_to_json(b));
    out["blocks"] = std::move(blocks);
    return out;
}

inline OperatorTuple tuple_from_json(const Json& j) {
    for (const char* key : {"d", "k", "commuting", "blocks"})
        if (!j.contains(key)) {
            std::ostringstream os;
            os << "operator tuple: missing field '" << key << "'";
            throw ValidationError(os.str());
        }
    OperatorTuple t;
    t.d = j["d"].get<int>();
    t.k = j["k"].get<Index>();
    t.commuting = j["commuting"].get<bool>();
    for (const Json& b : j["blocks"]) t.blocks.push_back(matrix_from_json(b, "blocks"));
    t.validate();
    return t;
}

}  // namespace schurkit
