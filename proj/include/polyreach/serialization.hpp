#pragma once

#include "polyreach/mat_poly_zonotope.hpp"
#include "polyreach/monte_carlo.hpp"
#include "polyreach/network.hpp"
#include "polyreach/variation.hpp"
#include "polyreach/verifier.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace polyreach {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json imatrix_to_json(const Eigen::MatrixXi& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat matrix_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + ": expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    for (const auto& row : j) {
        if (!row.is_array()) throw FormatError(std::string(what) + ": expected nested arrays");
        if (cols < 0) cols = static_cast<Eigen::Index>(row.size());
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw FormatError(std::string(what) + ": ragged rows");
        }
    }
    Mat m(rows, std::max<Eigen::Index>(cols, 0));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline Eigen::MatrixXi imatrix_from_json(const json& j, const char* what) {
    const Mat m = matrix_from_json(j, what);
    Eigen::MatrixXi out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = static_cast<int>(m(r, c));
    }
    return out;
}

inline json vector_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Vec vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + ": expected an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Polynomial zonotopes
// ---------------------------------------------------------------------------

inline json to_json(const PolyZonotope& p) {
    json j;
    j["center"] = detail::vector_to_json(p.center());
    j["dep_gen"] = detail::matrix_to_json(p.dep_gen());
    j["indep_gen"] = detail::matrix_to_json(p.indep_gen());
    j["exp_mat"] = detail::imatrix_to_json(p.exp_mat());
    j["factor_ids"] = p.factor_ids();
    return j;
}

inline PolyZonotope poly_zonotope_from_json(const json& j) {
    const Vec center = detail::vector_from_json(j.at("center"), "center");
    Mat dep = detail::matrix_from_json(j.at("dep_gen"), "dep_gen");
    Mat indep = detail::matrix_from_json(j.at("indep_gen"), "indep_gen");
    ExpMat e = detail::imatrix_from_json(j.at("exp_mat"), "exp_mat");
    if (dep.rows() == 0) dep = Mat::Zero(center.size(), 0);
    if (indep.rows() == 0) indep = Mat::Zero(center.size(), 0);
    if (e.cols() == 0) e = ExpMat(static_cast<Eigen::Index>(j.at("factor_ids").size()), 0);
    std::vector<FactorId> ids = j.at("factor_ids").get<std::vector<FactorId>>();
    return PolyZonotope(center, std::move(dep), std::move(indep), std::move(e), std::move(ids));
}

/// The entrywise independent radius is expanded into one explicit
/// independent generator per non-zero entry, so the document only uses the
/// standard fields.
inline json to_json(const MatPolyZonotope& w) {
    json j;
    j["center"] = detail::matrix_to_json(w.center());
    json dep = json::array();
    for (const Mat& g : w.dep_gen()) dep.push_back(detail::matrix_to_json(g));
    j["dep_gen"] = std::move(dep);
    json indep = json::array();
    for (const Mat& g : w.indep_gen()) indep.push_back(detail::matrix_to_json(g));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            if (w.entry_radius()(r, c) > 0.0) {
                Mat g = Mat::Zero(w.rows(), w.cols());
                g(r, c) = w.entry_radius()(r, c);
                indep.push_back(detail::matrix_to_json(g));
            }
        }
    }
    j["indep_gen"] = std::move(indep);
    j["exp_mat"] = detail::imatrix_to_json(w.exp_mat());
    j["factor_ids"] = w.factor_ids();
    return j;
}

inline MatPolyZonotope mat_poly_zonotope_from_json(const json& j) {
    Mat center = detail::matrix_from_json(j.at("center"), "center");
    std::vector<Mat> dep, indep;
    for (const auto& g : j.at("dep_gen")) dep.push_back(detail::matrix_from_json(g, "dep_gen"));
    for (const auto& g : j.at("indep_gen")) indep.push_back(detail::matrix_from_json(g, "indep_gen"));
    ExpMat e = detail::imatrix_from_json(j.at("exp_mat"), "exp_mat");
    if (e.cols() == 0) e = ExpMat(static_cast<Eigen::Index>(j.at("factor_ids").size()), 0);
    std::vector<FactorId> ids = j.at("factor_ids").get<std::vector<FactorId>>();
    return MatPolyZonotope(std::move(center), std::move(dep), std::move(indep), std::move(e),
                           std::move(ids));
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

inline json to_json(const NetworkSpec& net) {
    json j;
    j["input_dim"] = net.input_dim;
    json layers = json::array();
    for (const auto& layer : net.layers) {
        json lj;
        lj["kind"] = layer.kind == LayerSpec::Kind::Dense ? "dense" : "conv";
        lj["weight_codes"] = detail::imatrix_to_json(layer.codes);
        lj["bias"] = detail::vector_to_json(layer.bias);
        if (layer.conv.has_value()) {
            lj["conv_meta"] = {{"in_height", layer.conv->in_height},
                               {"in_width", layer.conv->in_width},
                               {"in_channels", layer.conv->in_channels},
                               {"filter", layer.conv->filter},
                               {"stride", layer.conv->stride}};
        }
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    return j;
}

inline NetworkSpec network_from_json(const json& j) {
    NetworkSpec net;
    try {
        net.input_dim = j.at("input_dim").get<Eigen::Index>();
        for (const auto& lj : j.at("layers")) {
            LayerSpec layer;
            const std::string kind = lj.at("kind").get<std::string>();
            if (kind == "dense") {
                layer.kind = LayerSpec::Kind::Dense;
            } else if (kind == "conv") {
                layer.kind = LayerSpec::Kind::Conv;
            } else {
                throw FormatError("network: unknown layer kind '" + kind + "'");
            }
            layer.codes = detail::imatrix_from_json(lj.at("weight_codes"), "weight_codes");
            layer.bias = detail::vector_from_json(lj.at("bias"), "bias");
            if (lj.contains("conv_meta")) {
                const auto& cm = lj.at("conv_meta");
                ConvMeta meta;
                meta.in_height = cm.at("in_height").get<int>();
                meta.in_width = cm.at("in_width").get<int>();
                meta.in_channels = cm.at("in_channels").get<int>();
                meta.filter = cm.at("filter").get<int>();
                meta.stride = cm.at("stride").get<int>();
                layer.conv = meta;
            }
            net.layers.push_back(std::move(layer));
        }
        net.validate();
    } catch (const json::exception& e) {
        throw FormatError(std::string("network: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("network: ") + e.what());
    }
    return net;
}

// ---------------------------------------------------------------------------
// Variation models
// ---------------------------------------------------------------------------

inline json to_json(const VariationModel& model) {
    json j;
    j["sigma1"] = model.sigma1;
    j["sigma2"] = model.sigma2;
    json codes = json::array();
    for (int code = 0; code < kNumWeightCodes; ++code) {
        for (int v = 0; v < kNumVariants; ++v) {
            const CodeModel& cm = model.weights[static_cast<std::size_t>(code)][v];
            if (!cm.present) continue;
            json cj;
            cj["code"] = code;
            cj["variant"] = to_string(static_cast<WeightVariant>(v));
            cj["coeffs"] = cm.coeffs;
            cj["leak_coeffs"] = model.leak_coeffs[static_cast<std::size_t>(code)];
            cj["d3_half_width"] = cm.d3_half_width;
            codes.push_back(std::move(cj));
        }
    }
    j["codes"] = std::move(codes);
    return j;
}

inline VariationModel variation_model_from_json(const json& j) {
    VariationModel model;
    try {
        model.sigma1 = j.at("sigma1").get<double>();
        model.sigma2 = j.at("sigma2").get<double>();
        for (const auto& cj : j.at("codes")) {
            const int code = cj.at("code").get<int>();
            if (code < 0 || code >= kNumWeightCodes) {
                throw FormatError("model: code outside [0, 63]");
            }
            const WeightVariant v = variant_from_string(cj.at("variant").get<std::string>());
            CodeModel& cm = model.weights[static_cast<std::size_t>(code)][static_cast<int>(v)];
            const auto coeffs = cj.at("coeffs").get<std::vector<double>>();
            const auto leak = cj.at("leak_coeffs").get<std::vector<double>>();
            if (coeffs.size() != kNumPhiMonomials || leak.size() != kNumPhiMonomials) {
                throw FormatError("model: coefficient arrays must have exactly 10 entries");
            }
            std::copy(coeffs.begin(), coeffs.end(), cm.coeffs.begin());
            std::copy(leak.begin(), leak.end(),
                      model.leak_coeffs[static_cast<std::size_t>(code)].begin());
            cm.d3_half_width = cj.at("d3_half_width").get<double>();
            if (cm.d3_half_width < 0.0) throw FormatError("model: negative d3_half_width");
            cm.present = true;
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("model: ") + e.what());
    }
    return model;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const IntervalVec& hull) {
    return {{"lower", detail::vector_to_json(hull.lower)}, {"upper", detail::vector_to_json(hull.upper)}};
}

inline json to_json(const VerificationReport& r) {
    json j;
    j["output_hull"] = to_json(r.output_hull);
    j["verified"] = r.verified;
    j["wall_time_s"] = r.wall_time_s;
    j["nominal_prediction"] = r.nominal_prediction;
    if (!r.layer_hulls.empty()) {
        json hulls = json::array();
        for (const auto& h : r.layer_hulls) hulls.push_back(to_json(h));
        j["layer_hulls"] = std::move(hulls);
    }
    return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        const auto begin = f.find_first_not_of(" \t");
        const auto end = f.find_last_not_of(" \t");
        f = (begin == std::string::npos) ? std::string() : f.substr(begin, end - begin + 1);
    }
    return fields;
}

}  // namespace detail

inline std::vector<SampleRow> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("samples: no samples (empty file)");
    const auto header = detail::split_csv_line(line);
    const std::vector<std::string> expected = {"phi1", "phi2", "code", "variant", "measured_weight"};
    std::vector<std::size_t> idx(expected.size());
    for (std::size_t e = 0; e < expected.size(); ++e) {
        auto it = std::find(header.begin(), header.end(), expected[e]);
        if (it == header.end()) {
            throw FormatError("samples: header is missing column '" + expected[e] + "'");
        }
        idx[e] = static_cast<std::size_t>(it - header.begin());
    }
    std::vector<SampleRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() < header.size()) {
            throw FormatError("samples: line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        }
        try {
            SampleRow row;
            row.phi1 = std::stod(fields[idx[0]]);
            row.phi2 = std::stod(fields[idx[1]]);
            row.code = std::stoi(fields[idx[2]]);
            row.variant = fields[idx[3]];
            row.measured = std::stod(fields[idx[4]]);
            rows.push_back(std::move(row));
        } catch (const std::exception&) {
            throw FormatError("samples: line " + std::to_string(line_no) + " is malformed");
        }
    }
    if (rows.empty()) throw FormatError("samples: no samples");
    return rows;
}

inline void write_samples_csv(std::ostream& out, const std::vector<SampleRow>& rows) {
    out.precision(17);
    out << "phi1,phi2,code,variant,measured_weight\n";
    for (const auto& r : rows) {
        out << r.phi1 << ',' << r.phi2 << ',' << r.code << ',' << r.variant << ',' << r.measured
            << '\n';
    }
}

/// Patterns: headerless numeric CSV, one pattern per row, class label in
/// the last column.
struct Pattern {
    Vec x;
    int label = 0;
};

inline std::vector<Pattern> read_patterns_csv(std::istream& in, Eigen::Index expected_dim = -1) {
    std::vector<Pattern> patterns;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() < 2) {
            throw FormatError("patterns: line " + std::to_string(line_no) + " needs values and a label");
        }
        Pattern p;
        p.x = Vec(static_cast<Eigen::Index>(fields.size()) - 1);
        try {
            for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
                p.x(static_cast<Eigen::Index>(i)) = std::stod(fields[i]);
            }
            p.label = std::stoi(fields.back());
        } catch (const std::exception&) {
            throw FormatError("patterns: line " + std::to_string(line_no) + " is malformed");
        }
        if (expected_dim >= 0 && p.x.size() != expected_dim) {
            throw FormatError("patterns: line " + std::to_string(line_no) + " has " +
                              std::to_string(p.x.size()) + " values, expected " +
                              std::to_string(expected_dim));
        }
        patterns.push_back(std::move(p));
    }
    if (patterns.empty()) throw FormatError("patterns: no patterns");
    return patterns;
}

inline void write_patterns_csv(std::ostream& out, const std::vector<Pattern>& patterns) {
    out.precision(17);
    for (const auto& p : patterns) {
        for (Eigen::Index i = 0; i < p.x.size(); ++i) out << p.x(i) << ',';
        out << p.label << '\n';
    }
}

/// Monte-Carlo dump: per-sample seed index, parameter draw, and outputs.
inline void write_mc_csv(std::ostream& out, std::uint64_t seed, const McRun& run,
                         const VariationModel& model) {
    out.precision(17);
    out << "seed,d1,d2,d3";
    if (!run.outputs.empty()) {
        for (Eigen::Index i = 0; i < run.outputs.front().size(); ++i) out << ",y" << i;
    }
    out << '\n';
    const double d3_max = model.max_d3_half_width();
    for (std::size_t i = 0; i < run.outputs.size(); ++i) {
        out << detail::splitmix64(seed ^ detail::splitmix64(i + 1)) << ',' << run.draws[i].d1 << ','
            << run.draws[i].d2 << ',' << run.draws[i].alpha3 * d3_max;
        for (Eigen::Index d = 0; d < run.outputs[i].size(); ++d) out << ',' << run.outputs[i](d);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace polyreach
