#pragma once

#include "polyreach/network.hpp"
#include "polyreach/variation.hpp"

#include <random>

namespace polyreach {

/// The four benchmark network shapes: 30-8-16-1, 4-8-3, 196-10-10, and
/// 196-conv(7x7)-64-10 on a 14x14 input.
enum class FixtureShape { BreastCancer, Iris, MnistDense, MnistCnn };

inline const char* to_string(FixtureShape s) {
    switch (s) {
        case FixtureShape::BreastCancer: return "breast-cancer";
        case FixtureShape::Iris: return "iris";
        case FixtureShape::MnistDense: return "mnist-dense";
        case FixtureShape::MnistCnn: return "mnist-cnn";
    }
    return "?";
}

inline FixtureShape fixture_shape_from_string(const std::string& s) {
    if (s == "breast-cancer") return FixtureShape::BreastCancer;
    if (s == "iris") return FixtureShape::Iris;
    if (s == "mnist-dense") return FixtureShape::MnistDense;
    if (s == "mnist-cnn") return FixtureShape::MnistCnn;
    throw std::invalid_argument("unknown fixture shape '" + s + "'");
}

inline const std::array<FixtureShape, 4> kAllFixtureShapes = {
    FixtureShape::BreastCancer, FixtureShape::Iris, FixtureShape::MnistDense, FixtureShape::MnistCnn};

namespace detail {

/// Codes drawn so dequantized weights look like a trained layer:
/// roughly normal with std gain/sqrt(fan_in).
inline Eigen::MatrixXi draw_codes(Eigen::Index rows, Eigen::Index cols, double gain,
                                  std::mt19937_64& rng) {
    std::normal_distribution<double> w(0.0, gain / std::sqrt(static_cast<double>(cols)));
    Eigen::MatrixXi codes(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) codes(r, c) = quantize(w(rng));
    }
    return codes;
}

inline Vec draw_bias(Eigen::Index n, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> b(0.0, scale);
    Vec bias(n);
    for (Eigen::Index i = 0; i < n; ++i) bias(i) = b(rng);
    return bias;
}

inline LayerSpec dense_layer(Eigen::Index out, Eigen::Index in, double gain, double bias_scale,
                             std::mt19937_64& rng) {
    LayerSpec layer;
    layer.kind = LayerSpec::Kind::Dense;
    layer.codes = draw_codes(out, in, gain, rng);
    layer.bias = draw_bias(out, bias_scale, rng);
    return layer;
}

}  // namespace detail

inline NetworkSpec make_fixture_network(FixtureShape shape, std::uint64_t seed) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ 0xf1c5u));
    NetworkSpec net;
    switch (shape) {
        case FixtureShape::BreastCancer:
            net.input_dim = 30;
            net.layers.push_back(detail::dense_layer(8, 30, 2.2, 0.05, rng));
            net.layers.push_back(detail::dense_layer(16, 8, 2.2, 0.05, rng));
            net.layers.push_back(detail::dense_layer(1, 16, 2.2, 0.05, rng));
            break;
        case FixtureShape::Iris:
            net.input_dim = 4;
            net.layers.push_back(detail::dense_layer(8, 4, 2.2, 0.05, rng));
            net.layers.push_back(detail::dense_layer(3, 8, 2.2, 0.05, rng));
            break;
        case FixtureShape::MnistDense:
            net.input_dim = 196;
            net.layers.push_back(detail::dense_layer(10, 196, 2.5, 0.05, rng));
            net.layers.push_back(detail::dense_layer(10, 10, 2.5, 0.05, rng));
            break;
        case FixtureShape::MnistCnn: {
            net.input_dim = 196;
            LayerSpec conv;
            conv.kind = LayerSpec::Kind::Conv;
            conv.conv = ConvMeta{14, 14, 1, 7, 1};
            conv.codes = detail::draw_codes(7, 7, 2.5, rng);
            conv.bias = Vec::Constant(1, 0.02);
            net.layers.push_back(std::move(conv));
            net.layers.push_back(detail::dense_layer(64, 64, 2.5, 0.05, rng));
            net.layers.push_back(detail::dense_layer(10, 64, 2.5, 0.05, rng));
            break;
        }
    }
    net.validate();
    return net;
}

/// Random input patterns in [0,1]^n labeled with the nominal prediction for
/// most rows (so nominal accuracy is high but not perfect) and a different
/// class for the rest. Patterns whose nominal output has no strict argmax
/// (rectified ties at zero) are rejected.
inline std::vector<std::pair<Vec, int>> make_fixture_patterns(const NetworkSpec& net,
                                                              std::size_t count,
                                                              std::uint64_t seed) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ 0x9a77u));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int classes = static_cast<int>(net.output_dim());
    std::vector<std::pair<Vec, int>> patterns;
    patterns.reserve(count);
    std::size_t attempts = 0;
    while (patterns.size() < count) {
        if (++attempts > 200 * (count + 1)) {
            throw std::runtime_error("make_fixture_patterns: network yields almost no strict argmax");
        }
        Vec x(net.input_dim);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = unit(rng);
        if (classes > 1) {
            const Vec y = nominal_forward(net, x);
            Eigen::Index best = 0;
            const double top = y.maxCoeff(&best);
            bool strict = true;
            for (Eigen::Index j = 0; j < y.size(); ++j) {
                if (j != best && y(j) == top) strict = false;
            }
            if (!strict) continue;
        }
        const int pred = nominal_prediction(net, x);
        int label = pred;
        if (classes > 1 && unit(rng) > 0.85) {
            label = (pred + 1 + static_cast<int>(unit(rng) * (classes - 1))) % classes;
        }
        patterns.emplace_back(std::move(x), label);
    }
    return patterns;
}

struct SyntheticDataOptions {
    double sigma1 = 0.05;
    double sigma2 = 0.03;
    int samples_per_surface = 60;
    int samples_per_leak = 30;
    /// Suppress measurement noise (exact surface queries).
    bool noiseless = false;
};

/// Draws measured responses from the synthetic circuit for every code and
/// variant (plus leak rows), with operating points sampled from the process
/// distribution. This is the desk-scale stand-in for the transistor-level
/// Monte-Carlo extraction run.
inline std::vector<SampleRow> make_fit_samples(std::uint64_t seed,
                                               const SyntheticDataOptions& opts = {}) {
    std::vector<SampleRow> rows;
    rows.reserve(static_cast<std::size_t>(kNumWeightCodes) *
                 (kNumVariants * opts.samples_per_surface + opts.samples_per_leak));
    for (int code = 0; code < kNumWeightCodes; ++code) {
        for (int v = 0; v < kNumVariants; ++v) {
            const auto variant = static_cast<WeightVariant>(v);
            const SynthSurface surface = synth_weight_surface(seed, code, variant);
            std::mt19937_64 rng(detail::synth_seed(seed, code, 100 + v));
            std::normal_distribution<double> p1(1.0, opts.sigma1), p2(1.0, opts.sigma2);
            for (int s = 0; s < opts.samples_per_surface; ++s) {
                SampleRow row;
                row.phi1 = p1(rng);
                row.phi2 = p2(rng);
                row.code = code;
                row.variant = to_string(variant);
                row.measured = opts.noiseless ? surface.eval(row.phi1, row.phi2)
                                              : surface.measure(row.phi1, row.phi2, rng);
                rows.push_back(std::move(row));
            }
        }
        const SynthSurface leak = synth_leak_surface(seed, code);
        std::mt19937_64 rng(detail::synth_seed(seed, code, 200));
        std::normal_distribution<double> p1(1.0, opts.sigma1), p2(1.0, opts.sigma2);
        for (int s = 0; s < opts.samples_per_leak; ++s) {
            SampleRow row;
            row.phi1 = p1(rng);
            row.phi2 = p2(rng);
            row.code = code;
            row.variant = kLeakVariantName;
            row.measured = leak.measure(row.phi1, row.phi2, rng);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Fitted model over the full synthetic data set; the standard fixture
/// model used across tests and shipped data.
inline VariationModel make_fixture_model(std::uint64_t seed, const SyntheticDataOptions& opts = {}) {
    return fit_model_from_samples(make_fit_samples(seed, opts), opts.sigma1, opts.sigma2);
}

}  // namespace polyreach
