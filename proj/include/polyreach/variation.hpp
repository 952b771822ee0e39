#pragma once

#include "polyreach/mat_poly_zonotope.hpp"
#include "polyreach/network.hpp"

#include <array>
#include <random>

namespace polyreach {

/// Bivariate monomials phi_1^i phi_2^j with i + j <= 3, in graded
/// lexicographic order. This order is fixed everywhere: coefficient
/// tables, serialization, and regression design matrices.
inline constexpr std::array<std::pair<int, int>, 10> kPhiMonomials = {{
    {0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}, {0, 3}, {1, 2}, {2, 1}, {3, 0},
}};
inline constexpr int kNumPhiMonomials = 10;

using PhiCoeffs = std::array<double, kNumPhiMonomials>;

inline double eval_phi_poly(const PhiCoeffs& c, double phi1, double phi2) {
    double v = 0.0;
    for (int t = 0; t < kNumPhiMonomials; ++t) {
        v += c[static_cast<std::size_t>(t)] * detail::ipow(phi1, kPhiMonomials[t].first) *
             detail::ipow(phi2, kPhiMonomials[t].second);
    }
    return v;
}

/// The first-layer circuit passes negative inputs through, so its weights
/// behave differently per input sign; hidden layers always see rectified
/// inputs.
enum class WeightVariant { FirstLayerPos = 0, FirstLayerNeg = 1, Hidden = 2 };
inline constexpr int kNumVariants = 3;

inline const char* to_string(WeightVariant v) {
    switch (v) {
        case WeightVariant::FirstLayerPos: return "firstLayerPos";
        case WeightVariant::FirstLayerNeg: return "firstLayerNeg";
        case WeightVariant::Hidden: return "hidden";
    }
    return "?";
}

inline WeightVariant variant_from_string(const std::string& s) {
    if (s == "firstLayerPos") return WeightVariant::FirstLayerPos;
    if (s == "firstLayerNeg") return WeightVariant::FirstLayerNeg;
    if (s == "hidden") return WeightVariant::Hidden;
    throw std::invalid_argument("unknown weight variant '" + s + "'");
}

/// Coefficients in the same monomial basis but over the scaled noise
/// factors alpha, i.e. after substituting phi_i = 1 + s_i * alpha_i.
using AlphaCoeffs = std::array<double, kNumPhiMonomials>;

inline AlphaCoeffs expand_to_alpha(const PhiCoeffs& a, double s1, double s2) {
    static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    AlphaCoeffs out{};
    for (int t = 0; t < kNumPhiMonomials; ++t) {
        const auto [u, v] = kPhiMonomials[t];
        double c = 0.0;
        for (int s = 0; s < kNumPhiMonomials; ++s) {
            const auto [i, j] = kPhiMonomials[s];
            if (i < u || j < v) continue;
            c += a[static_cast<std::size_t>(s)] * binom[i][u] * binom[j][v];
        }
        out[static_cast<std::size_t>(t)] = c * detail::ipow(s1, u) * detail::ipow(s2, v);
    }
    return out;
}

/// Per-code, per-variant polynomial model of one programmable weight.
struct CodeModel {
    PhiCoeffs coeffs{};
    double d3_half_width = 0.0;
    /// Extra per-entry independent half-width; non-zero only for models
    /// produced by linearize_model.
    double indep_slack = 0.0;
    bool present = false;
};

/// Polynomial description of how every quantized weight responds to the
/// two dominant process parameters, plus the leakage polynomials emitted
/// by rectified-off neurons. Coefficients are global per code and reused
/// across layers and architectures.
struct VariationModel {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma_multiplier = 3.0;

    std::array<std::array<CodeModel, kNumVariants>, kNumWeightCodes> weights{};
    std::array<PhiCoeffs, kNumWeightCodes> leak_coeffs{};
    std::array<double, kNumWeightCodes> leak_indep_slack{};

    double domain_half_width_1() const { return sigma_multiplier * sigma1; }
    double domain_half_width_2() const { return sigma_multiplier * sigma2; }

    const CodeModel& at(int code, WeightVariant v) const {
        if (code < 0 || code >= kNumWeightCodes) {
            throw std::invalid_argument("VariationModel: code outside [0, 63]");
        }
        const CodeModel& m = weights[static_cast<std::size_t>(code)][static_cast<int>(v)];
        if (!m.present) {
            throw std::invalid_argument(std::string("VariationModel: no table for code ") +
                                        std::to_string(code) + " variant " + to_string(v));
        }
        return m;
    }

    double max_d3_half_width() const {
        double m = 0.0;
        for (const auto& per_code : weights) {
            for (const auto& cm : per_code) {
                if (cm.present) m = std::max(m, cm.d3_half_width);
            }
        }
        return m;
    }

    /// Model with zero variation: every weight is its dequantized nominal
    /// value, no residual, no leakage.
    static VariationModel nominal(double sigma1 = 0.0, double sigma2 = 0.0) {
        VariationModel m;
        m.sigma1 = sigma1;
        m.sigma2 = sigma2;
        for (int code = 0; code < kNumWeightCodes; ++code) {
            for (int v = 0; v < kNumVariants; ++v) {
                auto& cm = m.weights[static_cast<std::size_t>(code)][v];
                cm.coeffs[0] = dequantize(code);
                cm.present = true;
            }
        }
        return m;
    }
};

inline constexpr std::array<FactorId, 3> kProcessFactorIds = {kProcessFactor1, kProcessFactor2,
                                                              kResidualFactor};

namespace detail {

/// Exponent columns of the nine non-constant alpha monomials followed by
/// the residual factor, over the factor rows (alpha_1, alpha_2, alpha_3).
inline ExpMat process_exponents() {
    ExpMat e(3, kNumPhiMonomials);  // columns 0..8: monomials 1..9, column 9: alpha_3
    for (int t = 1; t < kNumPhiMonomials; ++t) {
        e(0, t - 1) = kPhiMonomials[t].first;
        e(1, t - 1) = kPhiMonomials[t].second;
        e(2, t - 1) = 0;
    }
    e(0, 9) = 0;
    e(1, 9) = 0;
    e(2, 9) = 1;
    return e;
}

struct EntryExpansion {
    AlphaCoeffs alpha{};
    double d3 = 0.0;
    double radius = 0.0;
};

}  // namespace detail

enum class InputSign { NonNegative, NonPositive, Mixed };

namespace detail {

inline EntryExpansion expand_entry(const VariationModel& model, int code, bool first_layer,
                                   InputSign sign) {
    const double s1 = model.domain_half_width_1();
    const double s2 = model.domain_half_width_2();
    EntryExpansion e;
    if (!first_layer) {
        const CodeModel& cm = model.at(code, WeightVariant::Hidden);
        e.alpha = expand_to_alpha(cm.coeffs, s1, s2);
        e.d3 = cm.d3_half_width;
        e.radius = cm.indep_slack;
        return e;
    }
    if (sign != InputSign::Mixed) {
        const CodeModel& cm = model.at(code, sign == InputSign::NonNegative
                                                 ? WeightVariant::FirstLayerPos
                                                 : WeightVariant::FirstLayerNeg);
        e.alpha = expand_to_alpha(cm.coeffs, s1, s2);
        e.d3 = cm.d3_half_width;
        e.radius = cm.indep_slack;
        return e;
    }
    // Inputs that straddle zero: take the midpoint of both variants and
    // widen by half the gap, so either behavior stays inside the set.
    const CodeModel& pos = model.at(code, WeightVariant::FirstLayerPos);
    const CodeModel& neg = model.at(code, WeightVariant::FirstLayerNeg);
    const AlphaCoeffs ap = expand_to_alpha(pos.coeffs, s1, s2);
    const AlphaCoeffs an = expand_to_alpha(neg.coeffs, s1, s2);
    double gap = 0.0;
    for (int t = 0; t < kNumPhiMonomials; ++t) {
        e.alpha[static_cast<std::size_t>(t)] = 0.5 * (ap[static_cast<std::size_t>(t)] + an[static_cast<std::size_t>(t)]);
        gap += std::abs(ap[static_cast<std::size_t>(t)] - an[static_cast<std::size_t>(t)]);
    }
    e.d3 = 0.5 * (pos.d3_half_width + neg.d3_half_width);
    gap += std::abs(pos.d3_half_width - neg.d3_half_width);
    e.radius = 0.5 * gap + std::max(pos.indep_slack, neg.indep_slack);
    return e;
}

}  // namespace detail

/// The set of values one programmable weight can take: the degree-3
/// polynomial in (phi_1, phi_2) rewritten over the shared noise factors
/// alpha_1, alpha_2 plus the residual d3 = half_width * alpha_3. Returned
/// as a 1x1 matrix set carrying the network-global factor ids.
inline MatPolyZonotope weight_set(int code, WeightVariant variant, const VariationModel& model) {
    const CodeModel& cm = model.at(code, variant);
    const AlphaCoeffs alpha =
        expand_to_alpha(cm.coeffs, model.domain_half_width_1(), model.domain_half_width_2());

    Mat center(1, 1);
    center(0, 0) = alpha[0];
    std::vector<Mat> gens;
    std::vector<Eigen::Index> cols;
    const ExpMat full = detail::process_exponents();
    for (int t = 1; t < kNumPhiMonomials; ++t) {
        if (alpha[static_cast<std::size_t>(t)] == 0.0) continue;
        Mat g(1, 1);
        g(0, 0) = alpha[static_cast<std::size_t>(t)];
        gens.push_back(g);
        cols.push_back(t - 1);
    }
    if (cm.d3_half_width != 0.0) {
        Mat g(1, 1);
        g(0, 0) = cm.d3_half_width;
        gens.push_back(g);
        cols.push_back(9);
    }
    ExpMat e(3, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) e.col(static_cast<Eigen::Index>(i)) = full.col(cols[i]);

    Mat radius(1, 1);
    radius(0, 0) = cm.indep_slack;
    if (gens.empty() && cm.indep_slack == 0.0) return MatPolyZonotope::constant(center);
    return MatPolyZonotope(center, std::move(gens), {}, std::move(e),
                           {kProcessFactor1, kProcessFactor2, kResidualFactor}, std::move(radius));
}

/// Assembles the full weight-matrix set of a (dense-form) layer entrywise.
/// First-layer entries pick the sign variant of their input column; mixed
/// columns get the variant hull plus an entrywise independent gap. All
/// entries share the three global process factors; structural zeros stay
/// exactly zero.
inline MatPolyZonotope build_weight_matrix_set(const LayerSpec& dense_layer, bool first_layer,
                                               const std::vector<InputSign>& input_signs,
                                               const VariationModel& model) {
    if (dense_layer.kind != LayerSpec::Kind::Dense) {
        throw std::invalid_argument("build_weight_matrix_set: layer must be in dense form");
    }
    const Eigen::Index rows = dense_layer.codes.rows();
    const Eigen::Index cols = dense_layer.codes.cols();
    if (first_layer && static_cast<Eigen::Index>(input_signs.size()) != cols) {
        throw std::invalid_argument("build_weight_matrix_set: missing sign info for first layer");
    }

    Mat center = Mat::Zero(rows, cols);
    Mat radius = Mat::Zero(rows, cols);
    std::vector<Mat> gens(kNumPhiMonomials, Mat::Zero(rows, cols));  // 1..9 alpha monomials, then d3
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const int code = dense_layer.codes(r, c);
            if (code == kStructuralZero) continue;
            const auto e = detail::expand_entry(model, code, first_layer,
                                                first_layer ? input_signs[static_cast<std::size_t>(c)]
                                                            : InputSign::NonNegative);
            center(r, c) = e.alpha[0];
            for (int t = 1; t < kNumPhiMonomials; ++t) {
                gens[static_cast<std::size_t>(t - 1)](r, c) = e.alpha[static_cast<std::size_t>(t)];
            }
            gens[9](r, c) = e.d3;
            radius(r, c) = e.radius;
        }
    }

    const ExpMat full = detail::process_exponents();
    std::vector<Mat> kept;
    std::vector<Eigen::Index> kept_cols;
    for (int t = 0; t < kNumPhiMonomials; ++t) {
        if (gens[static_cast<std::size_t>(t)].isZero(0.0)) continue;
        kept.push_back(std::move(gens[static_cast<std::size_t>(t)]));
        kept_cols.push_back(t);
    }
    ExpMat e(3, static_cast<Eigen::Index>(kept_cols.size()));
    for (std::size_t i = 0; i < kept_cols.size(); ++i) {
        e.col(static_cast<Eigen::Index>(i)) = full.col(kept_cols[i]);
    }
    if (kept.empty() && radius.isZero(0.0)) return MatPolyZonotope::constant(std::move(center));
    return MatPolyZonotope(std::move(center), std::move(kept), {}, std::move(e),
                           {kProcessFactor1, kProcessFactor2, kResidualFactor}, std::move(radius));
}

/// Leakage a rectified-off neuron emits instead of an exact zero: the sum
/// of the per-code leakage polynomials over the neuron's incoming codes,
/// expanded over the shared noise factors. Scalar set.
inline PolyZonotope leakage_set(const Eigen::RowVectorXi& codes_row, const VariationModel& model) {
    PhiCoeffs sum{};
    double slack = 0.0;
    for (Eigen::Index c = 0; c < codes_row.size(); ++c) {
        const int code = codes_row(c);
        if (code == kStructuralZero) continue;
        if (code < 0 || code >= kNumWeightCodes) {
            throw std::invalid_argument("leakage_set: code outside [0, 63]");
        }
        const PhiCoeffs& lc = model.leak_coeffs[static_cast<std::size_t>(code)];
        for (int t = 0; t < kNumPhiMonomials; ++t) sum[static_cast<std::size_t>(t)] += lc[static_cast<std::size_t>(t)];
        slack += model.leak_indep_slack[static_cast<std::size_t>(code)];
    }
    const AlphaCoeffs alpha =
        expand_to_alpha(sum, model.domain_half_width_1(), model.domain_half_width_2());

    Vec center(1);
    center(0) = alpha[0];
    std::vector<Eigen::Index> cols;
    for (int t = 1; t < kNumPhiMonomials; ++t) {
        if (alpha[static_cast<std::size_t>(t)] != 0.0) cols.push_back(t - 1);
    }
    Mat dep(1, static_cast<Eigen::Index>(cols.size()));
    ExpMat e(2, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        dep(0, static_cast<Eigen::Index>(i)) = alpha[static_cast<std::size_t>(cols[i] + 1)];
        e(0, static_cast<Eigen::Index>(i)) = kPhiMonomials[cols[i] + 1].first;
        e(1, static_cast<Eigen::Index>(i)) = kPhiMonomials[cols[i] + 1].second;
    }
    Mat indep(1, slack != 0.0 ? 1 : 0);
    if (slack != 0.0) indep(0, 0) = slack;
    PolyZonotope out(center, std::move(dep), std::move(indep), std::move(e),
                     {kProcessFactor1, kProcessFactor2});
    return compact(out);
}

/// Per-neuron leakage for a whole (dense-form) layer, stacked into one set.
inline PolyZonotope layer_leakage(const LayerSpec& dense_layer, const VariationModel& model) {
    const Eigen::Index n = dense_layer.codes.rows();
    std::vector<PolyZonotope> parts;
    parts.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
        parts.push_back(leakage_set(dense_layer.codes.row(r), model));
    }
    return stack(parts);
}

/// Concrete leakage values of a layer's neurons at a given parameter draw.
inline Vec layer_leakage_values(const LayerSpec& dense_layer, const VariationModel& model,
                                double phi1, double phi2) {
    Vec leak = Vec::Zero(dense_layer.codes.rows());
    for (Eigen::Index r = 0; r < dense_layer.codes.rows(); ++r) {
        for (Eigen::Index c = 0; c < dense_layer.codes.cols(); ++c) {
            const int code = dense_layer.codes(r, c);
            if (code == kStructuralZero) continue;
            leak(r) += eval_phi_poly(model.leak_coeffs[static_cast<std::size_t>(code)], phi1, phi2);
        }
    }
    return leak;
}

// ---------------------------------------------------------------------------
// Regression fitting
// ---------------------------------------------------------------------------

struct WeightSample {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double measured = 0.0;
};

struct FitResult {
    PhiCoeffs coeffs{};
    double residual_half_width = 0.0;
};

/// Least-squares fit of the 10 monomial coefficients; the residual half
/// width is the maximum absolute residual, so every sample is contained in
/// coeffs(phi) +- residual by construction.
inline FitResult fit_coefficients(const std::vector<WeightSample>& samples) {
    if (samples.size() < kNumPhiMonomials) {
        throw std::runtime_error("fit_coefficients: need at least 10 samples, got " +
                                 std::to_string(samples.size()));
    }
    Mat design(static_cast<Eigen::Index>(samples.size()), kNumPhiMonomials);
    Vec rhs(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t r = 0; r < samples.size(); ++r) {
        for (int t = 0; t < kNumPhiMonomials; ++t) {
            design(static_cast<Eigen::Index>(r), t) =
                detail::ipow(samples[r].phi1, kPhiMonomials[t].first) *
                detail::ipow(samples[r].phi2, kPhiMonomials[t].second);
        }
        rhs(static_cast<Eigen::Index>(r)) = samples[r].measured;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < kNumPhiMonomials) {
        throw std::runtime_error("fit_coefficients: rank-deficient design matrix (rank " +
                                 std::to_string(qr.rank()) + " of 10); samples lack (phi1, phi2) spread");
    }
    const Vec sol = qr.solve(rhs);
    FitResult fit;
    for (int t = 0; t < kNumPhiMonomials; ++t) fit.coeffs[static_cast<std::size_t>(t)] = sol(t);
    const Vec residual = design * sol - rhs;
    fit.residual_half_width = residual.cwiseAbs().maxCoeff();
    return fit;
}

/// One measured response of a weight cell: (phi1, phi2) operating point,
/// programmed code, circuit context, and the observed value. Rows with
/// variant "leak" carry the rectified-off residual of the code instead of
/// a weight.
struct SampleRow {
    double phi1 = 0.0;
    double phi2 = 0.0;
    int code = 0;
    std::string variant;
    double measured = 0.0;
};

inline constexpr const char* kLeakVariantName = "leak";

/// Fits the whole model from measured rows: a degree-3 surface per
/// (code, variant) group with the max-residual half-width feeding the d3
/// term, leakage surfaces from "leak" rows, and sigma_1, sigma_2 estimated
/// from the sample spread of the operating points (overridable).
inline VariationModel fit_model_from_samples(const std::vector<SampleRow>& rows,
                                             double sigma1_override = -1.0,
                                             double sigma2_override = -1.0) {
    if (rows.empty()) throw std::runtime_error("fit_model_from_samples: no samples");
    std::map<std::pair<int, int>, std::vector<WeightSample>> groups;  // (code, variant or 3=leak)
    double m1 = 0.0, m2 = 0.0;
    for (const auto& row : rows) {
        if (row.code < 0 || row.code >= kNumWeightCodes) {
            throw std::runtime_error("fit_model_from_samples: code outside [0, 63]");
        }
        const int v = (row.variant == kLeakVariantName)
                          ? kNumVariants
                          : static_cast<int>(variant_from_string(row.variant));
        groups[{row.code, v}].push_back({row.phi1, row.phi2, row.measured});
        m1 += row.phi1;
        m2 += row.phi2;
    }
    m1 /= static_cast<double>(rows.size());
    m2 /= static_cast<double>(rows.size());
    double v1 = 0.0, v2 = 0.0;
    for (const auto& row : rows) {
        v1 += (row.phi1 - m1) * (row.phi1 - m1);
        v2 += (row.phi2 - m2) * (row.phi2 - m2);
    }
    VariationModel model;
    model.sigma1 = sigma1_override >= 0.0
                       ? sigma1_override
                       : std::sqrt(v1 / std::max<double>(1.0, static_cast<double>(rows.size()) - 1));
    model.sigma2 = sigma2_override >= 0.0
                       ? sigma2_override
                       : std::sqrt(v2 / std::max<double>(1.0, static_cast<double>(rows.size()) - 1));

    for (const auto& [key, samples] : groups) {
        const auto [code, v] = key;
        FitResult fit;
        try {
            fit = fit_coefficients(samples);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("code " + std::to_string(code) + " variant " +
                                     (v == kNumVariants ? kLeakVariantName
                                                        : to_string(static_cast<WeightVariant>(v))) +
                                     ": " + e.what());
        }
        if (v == kNumVariants) {
            model.leak_coeffs[static_cast<std::size_t>(code)] = fit.coeffs;
        } else {
            CodeModel& cm = model.weights[static_cast<std::size_t>(code)][v];
            cm.coeffs = fit.coeffs;
            cm.d3_half_width = fit.residual_half_width;
            cm.present = true;
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// Synthetic circuit responses (stand-in for transistor-level Monte Carlo)
// ---------------------------------------------------------------------------

/// Deterministic degree-3 response surface of one weight cell. The nominal
/// query (1, 1) returns the dequantized weight exactly; measurement noise is
/// uniform with amplitude noise_amp.
struct SynthSurface {
    PhiCoeffs coeffs{};
    double noise_amp = 0.0;

    double eval(double phi1, double phi2) const { return eval_phi_poly(coeffs, phi1, phi2); }

    double measure(double phi1, double phi2, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        return eval(phi1, phi2) + noise_amp * noise(rng);
    }
};

namespace detail {

inline std::uint64_t synth_seed(std::uint64_t seed, int code, int stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0x51ab0000ULL + 257ULL * static_cast<std::uint64_t>(code) +
                                                    static_cast<std::uint64_t>(stream)));
}

}  // namespace detail

/// Response surface of the weight cell programmed to `code` in circuit
/// context `variant`. The two first-layer variants share most of their
/// shape and differ by a small perturbation, mirroring the sign-dependent
/// circuit behavior.
inline SynthSurface synth_weight_surface(std::uint64_t seed, int code, WeightVariant variant) {
    const double w = dequantize(code);
    const double mag = std::abs(w) + 0.1;

    std::mt19937_64 shared(detail::synth_seed(seed, code, 0));
    std::mt19937_64 own(detail::synth_seed(seed, code, 1 + static_cast<int>(variant)));
    std::normal_distribution<double> unit(0.0, 1.0);

    auto draw = [&](std::mt19937_64& rng, double scale) { return scale * mag * unit(rng); };

    SynthSurface s;
    for (int t = 1; t < kNumPhiMonomials; ++t) {
        const int grade = kPhiMonomials[t].first + kPhiMonomials[t].second;
        const double scale = grade == 1 ? 0.18 : (grade == 2 ? 0.06 : 0.02);
        s.coeffs[static_cast<std::size_t>(t)] = draw(shared, scale) + draw(own, 0.10 * scale);
    }
    // Pin the nominal value: the surface at (1, 1) equals the programmed weight.
    double at_nominal = 0.0;
    for (int t = 1; t < kNumPhiMonomials; ++t) at_nominal += s.coeffs[static_cast<std::size_t>(t)];
    s.coeffs[0] = w - at_nominal;
    s.noise_amp = 0.002 * mag;
    return s;
}

/// Residual output of a rectified-off weight cell; orders of magnitude
/// below the signal scale.
inline SynthSurface synth_leak_surface(std::uint64_t seed, int code) {
    const double mag = 1e-3 * (std::abs(dequantize(code)) + 0.1);
    std::mt19937_64 rng(detail::synth_seed(seed, code, 7));
    std::normal_distribution<double> unit(0.0, 1.0);
    SynthSurface s;
    s.coeffs[0] = mag * (1.0 + 0.25 * unit(rng));
    for (int t = 1; t < kNumPhiMonomials; ++t) {
        const int grade = kPhiMonomials[t].first + kPhiMonomials[t].second;
        s.coeffs[static_cast<std::size_t>(t)] = mag * 0.3 / grade * unit(rng);
    }
    s.noise_amp = 0.0;
    return s;
}

}  // namespace polyreach
