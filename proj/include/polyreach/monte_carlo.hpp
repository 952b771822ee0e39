#pragma once

#include "polyreach/network.hpp"
#include "polyreach/parallel.hpp"
#include "polyreach/variation.hpp"

#include <random>

namespace polyreach {

/// One joint draw of the process parameters: phi_i = 1 + d_i, and the
/// residual factor alpha_3 in [-1,1] that scales every weight's d3 term.
struct ParameterDraw {
    double d1 = 0.0;
    double d2 = 0.0;
    double alpha3 = 0.0;

    double phi1() const { return 1.0 + d1; }
    double phi2() const { return 1.0 + d2; }
};

/// d1, d2 are normal with the model's standard deviations (rejection-
/// truncated to the k-sigma domains when `truncated`); the residual is
/// uniform over its domain.
inline ParameterDraw draw_parameters(const VariationModel& model, bool truncated,
                                     std::mt19937_64& rng) {
    auto draw_normal = [&](double sigma, double bound) {
        if (sigma == 0.0) return 0.0;
        std::normal_distribution<double> dist(0.0, sigma);
        double d = dist(rng);
        if (truncated) {
            while (std::abs(d) > bound) d = dist(rng);
        }
        return d;
    };
    ParameterDraw draw;
    draw.d1 = draw_normal(model.sigma1, model.domain_half_width_1());
    draw.d2 = draw_normal(model.sigma2, model.domain_half_width_2());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    draw.alpha3 = unit(rng);
    return draw;
}

/// Concrete forward pass of the variation-aware network at one parameter
/// draw. First-layer weights pick their sign variant from the concrete
/// input; hidden rectifications emit the leakage polynomial instead of
/// zero. This is the sampling oracle the enclosures are checked against.
inline Vec sample_forward(const NetworkSpec& lowered_net, const VariationModel& model, const Vec& x,
                          const ParameterDraw& draw) {
    if (x.size() != lowered_net.input_dim) {
        throw std::invalid_argument("sample_forward: input dimension mismatch");
    }
    const double phi1 = draw.phi1();
    const double phi2 = draw.phi2();

    // One weight realization per (code, variant) is enough for the whole net.
    std::array<std::array<double, kNumVariants>, kNumWeightCodes> value{};
    for (int code = 0; code < kNumWeightCodes; ++code) {
        for (int v = 0; v < kNumVariants; ++v) {
            const CodeModel& cm = model.weights[static_cast<std::size_t>(code)][v];
            if (!cm.present) continue;
            value[static_cast<std::size_t>(code)][v] =
                eval_phi_poly(cm.coeffs, phi1, phi2) + draw.alpha3 * cm.d3_half_width;
        }
    }
    std::array<double, kNumWeightCodes> leak_value{};
    for (int code = 0; code < kNumWeightCodes; ++code) {
        leak_value[static_cast<std::size_t>(code)] =
            eval_phi_poly(model.leak_coeffs[static_cast<std::size_t>(code)], phi1, phi2);
    }

    Vec h = x;
    for (std::size_t k = 0; k < lowered_net.layers.size(); ++k) {
        const LayerSpec& layer = lowered_net.layers[k];
        const bool first = (k == 0);
        Vec r = h;
        if (!first) {
            const LayerSpec& prev = lowered_net.layers[k - 1];
            for (Eigen::Index j = 0; j < r.size(); ++j) {
                if (r(j) < 0.0) {
                    double leak = 0.0;
                    for (Eigen::Index c = 0; c < prev.codes.cols(); ++c) {
                        const int code = prev.codes(j, c);
                        if (code != kStructuralZero) leak += leak_value[static_cast<std::size_t>(code)];
                    }
                    r(j) = leak;
                }
            }
        }
        Vec out = layer.bias;
        for (Eigen::Index i = 0; i < layer.codes.rows(); ++i) {
            for (Eigen::Index c = 0; c < layer.codes.cols(); ++c) {
                const int code = layer.codes(i, c);
                if (code == kStructuralZero) continue;
                const int variant = first ? (x(c) >= 0.0 ? static_cast<int>(WeightVariant::FirstLayerPos)
                                                         : static_cast<int>(WeightVariant::FirstLayerNeg))
                                          : static_cast<int>(WeightVariant::Hidden);
                if (!model.weights[static_cast<std::size_t>(code)][variant].present) {
                    throw std::invalid_argument(std::string("sample_forward: no table for code ") +
                                                std::to_string(code));
                }
                out(i) += value[static_cast<std::size_t>(code)][variant] * r(c);
            }
        }
        h = std::move(out);
    }
    return h.cwiseMax(0.0);
}

/// Fraction of sample vectors inside the hull in every coordinate
/// (closed intervals).
inline double enclosure_percentage(const std::vector<Vec>& outputs, const IntervalVec& hull) {
    if (outputs.empty()) throw std::invalid_argument("enclosure_percentage: no samples");
    std::size_t inside = 0;
    for (const Vec& y : outputs) {
        if (hull.contains(y)) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(outputs.size());
}

struct McOptions {
    int samples = 1000;
    bool truncated = false;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct McRun {
    std::vector<ParameterDraw> draws;
    std::vector<Vec> outputs;
};

/// Runs `samples` independent forward passes. Every sample derives its own
/// generator from (seed, index), so results are identical under any thread
/// count.
inline McRun run_monte_carlo(const NetworkSpec& net, const VariationModel& model, const Vec& x,
                             const McOptions& opts) {
    if (opts.samples <= 0) throw std::invalid_argument("run_monte_carlo: sample count must be positive");
    const NetworkSpec lowered = net.lowered();
    McRun run;
    run.draws.resize(static_cast<std::size_t>(opts.samples));
    run.outputs.resize(static_cast<std::size_t>(opts.samples));
    parallel_for(static_cast<std::size_t>(opts.samples), opts.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(detail::splitmix64(opts.seed ^ detail::splitmix64(i + 1)));
        run.draws[i] = draw_parameters(model, opts.truncated, rng);
        run.outputs[i] = sample_forward(lowered, model, x, run.draws[i]);
    });
    return run;
}

}  // namespace polyreach
