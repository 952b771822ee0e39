#pragma once

#include "polyreach/poly_zonotope.hpp"

#include <cmath>
#include <optional>

namespace polyreach {

/// 6-bit weight codes map uniformly onto 64 levels spanning [-2, 2].
inline constexpr int kNumWeightCodes = 64;
inline constexpr double kWeightMin = -2.0;
inline constexpr double kWeightMax = 2.0;

/// Marks a connection that does not physically exist (conv lowering);
/// such entries are exactly zero and carry no variation or leakage.
inline constexpr int kStructuralZero = -1;

inline double dequantize(int code) {
    if (code < 0 || code >= kNumWeightCodes) {
        throw std::invalid_argument("dequantize: code " + std::to_string(code) + " outside [0, 63]");
    }
    return kWeightMin + code * (kWeightMax - kWeightMin) / (kNumWeightCodes - 1);
}

/// Nearest code on the grid; inverse of dequantize on grid points.
inline int quantize(double w) {
    const double step = (kWeightMax - kWeightMin) / (kNumWeightCodes - 1);
    int code = static_cast<int>(std::lround((w - kWeightMin) / step));
    return std::clamp(code, 0, kNumWeightCodes - 1);
}

struct ConvMeta {
    int in_height = 0;
    int in_width = 0;
    int in_channels = 1;
    int filter = 0;
    int stride = 1;

    int out_height() const { return (in_height - filter) / stride + 1; }
    int out_width() const { return (in_width - filter) / stride + 1; }

    bool valid() const {
        return in_height > 0 && in_width > 0 && in_channels > 0 && filter > 0 && stride > 0 &&
               filter <= in_height && filter <= in_width;
    }
};

/// One layer of the quantized network. Dense layers store the full code
/// matrix (n_out x n_in). Conv layers store the single filter's codes as a
/// filter x (filter * in_channels) block plus geometry; lower_conv() turns
/// them into an equivalent dense layer with structural zeros marked.
struct LayerSpec {
    enum class Kind { Dense, Conv };

    Kind kind = Kind::Dense;
    Eigen::MatrixXi codes;
    Vec bias;
    std::optional<ConvMeta> conv;

    Eigen::Index in_dim() const {
        if (kind == Kind::Dense) return codes.cols();
        return static_cast<Eigen::Index>(conv->in_height) * conv->in_width * conv->in_channels;
    }
    Eigen::Index out_dim() const {
        if (kind == Kind::Dense) return codes.rows();
        return static_cast<Eigen::Index>(conv->out_height()) * conv->out_width();
    }

    void validate() const {
        if (kind == Kind::Conv) {
            if (!conv.has_value() || !conv->valid()) {
                throw std::invalid_argument("LayerSpec: inconsistent conv metadata");
            }
            if (codes.rows() != conv->filter ||
                codes.cols() != static_cast<Eigen::Index>(conv->filter) * conv->in_channels) {
                throw std::invalid_argument("LayerSpec: filter code block shape mismatch");
            }
            if (bias.size() != 1 && bias.size() != out_dim()) {
                throw std::invalid_argument("LayerSpec: conv bias must have size 1 or out_dim");
            }
        } else {
            if (bias.size() != codes.rows()) {
                throw std::invalid_argument("LayerSpec: bias size does not match rows");
            }
        }
        for (Eigen::Index r = 0; r < codes.rows(); ++r) {
            for (Eigen::Index c = 0; c < codes.cols(); ++c) {
                const int code = codes(r, c);
                if (code != kStructuralZero && (code < 0 || code >= kNumWeightCodes)) {
                    throw std::invalid_argument("LayerSpec: weight code outside [0, 63]");
                }
            }
        }
    }
};

/// Produces the dense-equivalent layer of a convolution: every non-zero
/// entry reuses the filter's quantized code, absent connections are marked
/// kStructuralZero. Input layout is channel-last row-major, i.e.
/// index = (y * in_width + x) * in_channels + c.
inline LayerSpec lower_conv(const LayerSpec& layer) {
    if (layer.kind != LayerSpec::Kind::Conv) return layer;
    layer.validate();
    const ConvMeta& m = *layer.conv;

    LayerSpec dense;
    dense.kind = LayerSpec::Kind::Dense;
    dense.codes = Eigen::MatrixXi::Constant(layer.out_dim(), layer.in_dim(), kStructuralZero);
    for (int oy = 0; oy < m.out_height(); ++oy) {
        for (int ox = 0; ox < m.out_width(); ++ox) {
            const Eigen::Index out = static_cast<Eigen::Index>(oy) * m.out_width() + ox;
            for (int fy = 0; fy < m.filter; ++fy) {
                for (int fx = 0; fx < m.filter; ++fx) {
                    for (int c = 0; c < m.in_channels; ++c) {
                        const int iy = oy * m.stride + fy;
                        const int ix = ox * m.stride + fx;
                        const Eigen::Index in =
                            (static_cast<Eigen::Index>(iy) * m.in_width + ix) * m.in_channels + c;
                        dense.codes(out, in) = layer.codes(fy, static_cast<Eigen::Index>(fx) * m.in_channels + c);
                    }
                }
            }
        }
    }
    if (layer.bias.size() == 1) {
        dense.bias = Vec::Constant(layer.out_dim(), layer.bias(0));
    } else {
        dense.bias = layer.bias;
    }
    return dense;
}

/// Nominal dequantized weight matrix; structural zeros become exact zeros.
inline Mat nominal_weights(const LayerSpec& dense_layer) {
    Mat w(dense_layer.codes.rows(), dense_layer.codes.cols());
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            const int code = dense_layer.codes(r, c);
            w(r, c) = (code == kStructuralZero) ? 0.0 : dequantize(code);
        }
    }
    return w;
}

/// Layered description of the nominal quantized network. The first layer
/// applies no activation to its input (negative inputs pass through), every
/// later layer applies ReLU to its input, and a final ReLU acts on the last
/// layer's output.
struct NetworkSpec {
    Eigen::Index input_dim = 0;
    std::vector<LayerSpec> layers;

    Eigen::Index output_dim() const { return layers.empty() ? input_dim : layers.back().out_dim(); }
    std::size_t depth() const { return layers.size(); }

    void validate() const {
        if (layers.empty()) throw std::invalid_argument("NetworkSpec: no layers");
        Eigen::Index d = input_dim;
        for (std::size_t k = 0; k < layers.size(); ++k) {
            layers[k].validate();
            if (layers[k].in_dim() != d) {
                throw std::invalid_argument("NetworkSpec: layer " + std::to_string(k) +
                                            " expects input " + std::to_string(layers[k].in_dim()) +
                                            ", got " + std::to_string(d));
            }
            d = layers[k].out_dim();
        }
    }

    /// Copy with all conv layers lowered to dense form.
    NetworkSpec lowered() const {
        NetworkSpec out;
        out.input_dim = input_dim;
        out.layers.reserve(layers.size());
        for (const auto& layer : layers) out.layers.push_back(lower_conv(layer));
        return out;
    }
};

/// Forward pass of the nominal model: phi_1 = phi_2 = 1, no residual, no
/// leakage. ReLU precedes every layer but the first and closes the output.
inline Vec nominal_forward(const NetworkSpec& net, const Vec& x) {
    if (x.size() != net.input_dim) {
        throw std::invalid_argument("nominal_forward: input has size " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(net.input_dim));
    }
    Vec h = x;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const LayerSpec dense = lower_conv(net.layers[k]);
        if (k > 0) h = h.cwiseMax(0.0);
        h = nominal_weights(dense) * h + dense.bias;
    }
    return h.cwiseMax(0.0);
}

/// Index of the largest output, lowest index on ties.
inline int nominal_prediction(const NetworkSpec& net, const Vec& x) {
    const Vec y = nominal_forward(net, x);
    Eigen::Index best = 0;
    y.maxCoeff(&best);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == y(best)) { best = i; break; }
    }
    return static_cast<int>(best);
}

}  // namespace polyreach
