// Command-line front end: parse JSON inputs, dispatch to the library, emit
// deterministic JSON/CSV reports.  Exit codes: 0 = pass, 1 = input error,
// 2 = mathematical rejection (not PSD / not Schur / strictness violation).
//
// Every numeric in a report comes from a library call; the CLI does no
// arithmetic of its own.  Identical inputs, flags and seed produce
// byte-identical reports.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "schurkit/sampling.hpp"
#include "schurkit/serialization.hpp"

namespace {

using namespace schurkit;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitRejected = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// FNV-1a 64-bit content hash, hex-encoded.
std::string digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

Json parse_json(const std::string& bytes, const std::string& path) {
    try {
        return Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

struct Report {
    std::string command;
    std::string inputs_digest;
    std::uint64_t seed = 0;
    double tolerance = kDefaultTol;
    std::vector<std::pair<std::string, bool>> verdicts;
    std::vector<std::pair<std::string, double>> residuals;

    Json to_json() const {
        Json out;
        out["command"] = command;
        out["inputs_digest"] = inputs_digest;
        out["seed"] = seed;
        out["tolerance"] = tolerance;
        Json vs = Json::array();
        for (const auto& [name, value] : verdicts) {
            Json v;
            v["name"] = name;
            v["value"] = value;
            vs.push_back(std::move(v));
        }
        out["verdicts"] = std::move(vs);
        Json rs = Json::array();
        for (const auto& [name, value] : residuals) {
            Json r;
            r["name"] = name;
            r["value"] = value;
            rs.push_back(std::move(r));
        }
        out["residuals"] = std::move(rs);
        return out;
    }

    std::string to_csv() const {
        std::ostringstream os;
        char buf[32];
        os << "command," << command << "\n";
        os << "inputs_digest," << inputs_digest << "\n";
        os << "seed," << seed << "\n";
        std::snprintf(buf, sizeof(buf), "%.17g", tolerance);
        os << "tolerance," << buf << "\n";
        for (const auto& [name, value] : verdicts)
            os << "verdict," << name << "," << (value ? "true" : "false") << "\n";
        for (const auto& [name, value] : residuals) {
            std::snprintf(buf, sizeof(buf), "%.17g", value);
            os << "residual," << name << "," << buf << "\n";
        }
        return os.str();
    }
};

void emit(const Report& report, const std::string& format) {
    if (format == "csv")
        std::cout << report.to_csv();
    else
        std::cout << report.to_json().dump(2) << "\n";
}

void write_output(const std::string& path, const Json& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << payload.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// kernel-check
// ---------------------------------------------------------------------------

int cmd_kernel_check(const std::string& input, const std::string& setting, double tol,
                     std::uint64_t seed, const std::string& format) {
    const std::string bytes = read_file(input);
    Report report{"kernel-check", digest(bytes), seed, tol, {}, {}};
    const Json j = parse_json(bytes, input);

    PsdReport psd;
    if (setting == "cp") {
        psd = cp_positivity_check(cp_kernel_from_json(j), tol);
    } else {
        const KernelSample sample = kernel_sample_from_json(j);
        const bool is_disk = sample.setting() == KernelSetting::kDisk;
        if ((setting == "disk") != is_disk)
            throw ValidationError("kernel-check: file setting does not match --setting");
        psd = positivity_check(sample, tol);
    }
    report.verdicts.emplace_back("is_psd", psd.is_psd);
    report.residuals.emplace_back("min_eigenvalue", psd.min_eigenvalue);
    report.residuals.emplace_back("tolerance_used", psd.tolerance_used);
    emit(report, format);
    return psd.is_psd ? kExitOk : kExitRejected;
}

// ---------------------------------------------------------------------------
// realize
// ---------------------------------------------------------------------------

std::pair<std::vector<Vector>, std::vector<Matrix>> samples_from_json(const Json& j) {
    if (!j.contains("points") || !j.contains("values"))
        throw ValidationError("realize: expected {points, values}");
    std::vector<Vector> pts;
    for (const Json& p : j["points"]) pts.push_back(point_from_json(p));
    std::vector<Matrix> vals;
    for (const Json& v : j["values"]) vals.push_back(matrix_from_json(v, "values"));
    return {std::move(pts), std::move(vals)};
}

int cmd_realize(const std::string& input, const std::string& setting, double tol,
                std::uint64_t seed, int degree, const std::string& out_path,
                const std::string& format) {
    const std::string bytes = read_file(input);
    Report report{"realize", digest(bytes), seed, tol, {}, {}};
    const Json j = parse_json(bytes, input);

    if (setting == "tv") {
        const LowerTriWindow window = window_from_json(j);
        const TvRealization r = tv_realize(window, tol);
        report.verdicts.emplace_back("conservative", r.system.conservative);
        report.residuals.emplace_back("reconstruction_residual",
                                      r.reconstruction_residual);
        report.residuals.emplace_back(
            "max_state_dim", static_cast<double>(r.system.state_dim(0)));
        if (!out_path.empty()) write_output(out_path, tv_system_to_json(r.system));
        emit(report, format);
        return kExitOk;
    }
    if (setting == "free") {
        const FormalSeries s = series_from_json(j);
        const RealizationResult r = lurking_isometry_free(s, degree, tol);
        report.verdicts.emplace_back(
            "coisometric", r.colligation.flavor() != Flavor::kContractive);
        report.residuals.emplace_back("fit_residual", r.fit_residual);
        report.residuals.emplace_back("heldout_residual", r.heldout_residual);
        report.residuals.emplace_back("state_dim",
                                      static_cast<double>(r.gram_rank));
        if (!out_path.empty())
            write_output(out_path, colligation_to_json(r.colligation));
        emit(report, format);
        return kExitOk;
    }

    auto [pts, vals] = samples_from_json(j);
    HeldoutSpec heldout;  // no oracle: deterministic sample split
    heldout.seed = seed;
    RealizationResult r =
        setting == "disk"
            ? [&] {
                  std::vector<Complex> zs;
                  for (const Vector& p : pts) {
                      if (p.size() != 1)
                          throw ValidationError("realize: disk points must be scalar");
                      zs.push_back(p(0));
                  }
                  return lurking_isometry_disk(zs, vals, tol, heldout);
              }()
            : lurking_isometry_ball(pts, vals, tol, heldout);
    report.verdicts.emplace_back("coisometric",
                                 r.colligation.flavor() != Flavor::kContractive);
    report.residuals.emplace_back("fit_residual", r.fit_residual);
    report.residuals.emplace_back("heldout_residual", r.heldout_residual);
    report.residuals.emplace_back("state_dim", static_cast<double>(r.gram_rank));
    if (!out_path.empty()) write_output(out_path, colligation_to_json(r.colligation));
    emit(report, format);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const std::string& colligation_path, const std::string& arg_path,
             const std::string& mode, double tol, std::uint64_t seed,
             const std::string& out_path, const std::string& format) {
    const std::string cbytes = read_file(colligation_path);
    const std::string abytes = read_file(arg_path);
    Report report{"eval", digest(cbytes + abytes), seed, tol, {}, {}};
    const Colligation u = colligation_from_json(parse_json(cbytes, colligation_path));

    if (mode == "point") {
        const Json pj = parse_json(abytes, arg_path);
        if (!pj.contains("points"))
            throw ValidationError("eval: points file needs a 'points' array");
        Json values = Json::array();
        double max_norm = 0.0;
        for (const Json& p : pj["points"]) {
            const Matrix value = eval_ball(u, point_from_json(p));
            max_norm = std::max(max_norm, operator_norm(value));
            values.push_back(matrix_to_json(value));
        }
        report.residuals.emplace_back("max_value_norm", max_norm);
        if (!out_path.empty()) {
            Json payload;
            payload["values"] = std::move(values);
            write_output(out_path, payload);
        }
        emit(report, format);
        return kExitOk;
    }

    const OperatorTuple t = tuple_from_json(parse_json(abytes, arg_path));
    const RowContractionReport row = row_contraction_check(t);
    report.residuals.emplace_back("row_norm", row.row_norm);
    const Matrix value = eval_colligation_at_tuple(u, t);  // throws if not strict
    const bool certified = u.flavor() != Flavor::kContractive;
    report.verdicts.emplace_back("certified_schur", certified);
    double norm = operator_norm(value);
    bool pass = true;
    if (certified) {
        const VonNeumannReport vn = von_neumann_check(u, t);
        norm = vn.norm;
        pass = vn.pass;
        report.verdicts.emplace_back("von_neumann_pass", vn.pass);
    }
    report.residuals.emplace_back("value_norm", norm);
    if (!out_path.empty()) {
        Json payload;
        payload["value"] = matrix_to_json(value);
        write_output(out_path, payload);
    }
    emit(report, format);
    return certified && !pass ? kExitRejected : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schurkit: Schur-class kernels, realizations and functional calculus"};
    app.require_subcommand(1);

    std::string setting = "disk";
    std::string mode = "point";
    std::string format = "json";
    std::string input, arg_file, out_path;
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    int degree = 4;

    CLI::App* kernel_check =
        app.add_subcommand("kernel-check", "PSD / complete-positivity test of a kernel sample");
    kernel_check->add_option("input", input, "kernel sample JSON file")->required();
    kernel_check->add_option("--setting", setting, "disk|ball|cp")
        ->check(CLI::IsMember({"disk", "ball", "cp"}));
    kernel_check->add_option("--tol", tol, "relative PSD tolerance");
    kernel_check->add_option("--seed", seed, "seed echoed in the report");
    kernel_check->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* realize =
        app.add_subcommand("realize", "synthesize a colligation / TV system from data");
    realize->add_option("input", input, "samples / series / window JSON file")->required();
    std::string r_setting = "disk";
    realize->add_option("--setting", r_setting, "disk|ball|free|tv")
        ->check(CLI::IsMember({"disk", "ball", "free", "tv"}));
    realize->add_option("--tol", tol, "synthesis tolerance");
    realize->add_option("--seed", seed, "seed echoed in the report");
    realize->add_option("--degree", degree, "free-setting truncation degree N");
    realize->add_option("--out", out_path, "output colligation / system JSON file");
    realize->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* eval = app.add_subcommand("eval", "evaluate a realized transfer function");
    eval->add_option("colligation", input, "colligation JSON file")->required();
    eval->add_option("argument", arg_file, "points file or operator-tuple file")
        ->required();
    eval->add_option("--mode", mode, "point|operator")
        ->check(CLI::IsMember({"point", "operator"}));
    eval->add_option("--tol", tol, "tolerance echoed in the report");
    eval->add_option("--seed", seed, "seed echoed in the report");
    eval->add_option("--out", out_path, "output values JSON file");
    eval->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (kernel_check->parsed())
            return cmd_kernel_check(input, setting, tol, seed, format);
        if (realize->parsed())
            return cmd_realize(input, r_setting, tol, seed, degree, out_path, format);
        return cmd_eval(input, arg_file, mode, tol, seed, out_path, format);
    } catch (const NotPsdError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return kExitRejected;
    } catch (const NotSchurError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return kExitRejected;
    } catch (const StrictnessError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return kExitRejected;
    } catch (const Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
}
