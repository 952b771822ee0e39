#pragma once

#include "polyreach/mat_poly_zonotope.hpp"
#include "polyreach/network.hpp"
#include "polyreach/parallel.hpp"
#include "polyreach/relu.hpp"
#include "polyreach/variation.hpp"

#include <chrono>
#include <optional>

namespace polyreach {

/// Propagation aborted because the representation outgrew the hard cap.
class ResourceLimitError : public std::runtime_error {
public:
    explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

struct PropagationOptions {
    /// Order-reduction budget applied after every layer.
    Eigen::Index max_gens = 2000;
    /// Hard abort threshold; exceeding it raises ResourceLimitError.
    Eigen::Index hard_cap = 200000;
    bool record_layer_hulls = false;
    /// Keep every intermediate layer set (for debugging dumps).
    bool record_layer_sets = false;
    /// Degree-1 baseline: demote cross-factor monomials after every
    /// multiplication so only a plain zonotope survives.
    bool zonotope_mode = false;
};

/// Input set <x, eps*I, [], I>: an L-inf ball of radius eps around the
/// pattern. Input factors get ids disjoint from the process factors.
inline PolyZonotope build_input_set(const Vec& x, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("build_input_set: epsilon must be >= 0");
    if (epsilon == 0.0) return PolyZonotope::point(x);
    const Eigen::Index n = x.size();
    std::vector<FactorId> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ids.push_back(kInputFactorBase + i);
    ExpMat e = ExpMat::Identity(n, n);
    return PolyZonotope(x, epsilon * Mat::Identity(n, n), Mat::Zero(n, 0), e, ids);
}

inline std::vector<InputSign> classify_input_signs(const PolyZonotope& input) {
    const IntervalVec hull = interval_hull(input);
    std::vector<InputSign> signs(static_cast<std::size_t>(input.dim()));
    for (Eigen::Index i = 0; i < input.dim(); ++i) {
        if (hull.lower(i) >= 0.0) {
            signs[static_cast<std::size_t>(i)] = InputSign::NonNegative;
        } else if (hull.upper(i) <= 0.0) {
            signs[static_cast<std::size_t>(i)] = InputSign::NonPositive;
        } else {
            signs[static_cast<std::size_t>(i)] = InputSign::Mixed;
        }
    }
    return signs;
}

struct PropagationResult {
    PolyZonotope output;
    /// Hull of every linear layer's output plus the final rectified output.
    std::vector<IntervalVec> layer_hulls;
    std::vector<PolyZonotope> layer_sets;
};

/// Propagates an input set through the variation-aware network: the first
/// layer multiplies without a preceding activation, later layers rectify
/// their input (with leakage) first, and a final ReLU closes the output.
/// All layers share the three global process factors, which is what keeps
/// the phi-dependencies correlated across the whole network.
inline PropagationResult propagate_set(const NetworkSpec& net, const VariationModel& model,
                                       const PolyZonotope& input,
                                       const PropagationOptions& opts = {}) {
    net.validate();
    if (input.dim() != net.input_dim) {
        throw std::invalid_argument("propagate_set: input set dimension mismatch");
    }
    const NetworkSpec lowered = net.lowered();

    PropagationResult result{input, {}, {}};
    PolyZonotope& cur = result.output;
    for (std::size_t k = 0; k < lowered.layers.size(); ++k) {
        const LayerSpec& layer = lowered.layers[k];
        const bool first = (k == 0);
        if (!first) {
            PolyZonotope leak = layer_leakage(lowered.layers[k - 1], model);
            const bool leak_is_zero =
                leak.num_gens() == 0 && leak.center().isZero(0.0);
            cur = enclose_relu(cur, leak_is_zero ? std::nullopt : std::make_optional(std::move(leak)));
        }
        const MatPolyZonotope w = build_weight_matrix_set(
            layer, first, first ? classify_input_signs(cur) : std::vector<InputSign>{}, model);
        cur = multiply(w, cur);
        cur = affine_map(Mat::Identity(cur.dim(), cur.dim()), cur, layer.bias);
        if (opts.zonotope_mode) cur = demote_nonlinear(cur);
        cur = reduce_order(cur, opts.max_gens);
        if (cur.num_gens() > opts.hard_cap) {
            throw ResourceLimitError("propagate_set: representation exceeded the hard generator cap (" +
                                     std::to_string(cur.num_gens()) + " > " +
                                     std::to_string(opts.hard_cap) + ")");
        }
        if (opts.record_layer_hulls) result.layer_hulls.push_back(interval_hull(cur));
        if (opts.record_layer_sets) result.layer_sets.push_back(cur);
    }
    cur = enclose_relu(cur, std::nullopt);
    if (opts.record_layer_hulls) result.layer_hulls.push_back(interval_hull(cur));
    if (opts.record_layer_sets) result.layer_sets.push_back(cur);
    return result;
}

/// True when the output set lies strictly on the correct side of every
/// decision boundary: each margin y_label - y_j keeps its dependencies
/// through an affine map and must have a strictly positive hull lower
/// bound. Exact-zero margins count as unverified.
inline bool check_classification(const PolyZonotope& output, int label) {
    const Eigen::Index n = output.dim();
    if (label < 0 || label >= n) throw std::invalid_argument("check_classification: label out of range");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == label) continue;
        Mat row = Mat::Zero(1, n);
        row(0, label) = 1.0;
        row(0, j) = -1.0;
        const PolyZonotope margin = affine_map(row, output, Vec::Zero(1));
        if (interval_hull(margin).lower(0) <= 0.0) return false;
    }
    return true;
}

struct VerificationTask {
    Vec pattern;
    double epsilon = 0.0;
    int label = 0;
    double sigma_multiplier = 3.0;
};

struct VerificationReport {
    IntervalVec output_hull;
    bool verified = false;
    std::vector<IntervalVec> layer_hulls;
    std::vector<PolyZonotope> layer_sets;
    double wall_time_s = 0.0;
    int nominal_prediction = -1;
};

inline VerificationReport verify_pattern(const NetworkSpec& net, const VariationModel& model,
                                         const VerificationTask& task,
                                         const PropagationOptions& opts = {}) {
    if (task.epsilon < 0.0) throw std::invalid_argument("verify_pattern: epsilon must be >= 0");
    if (task.label < 0 || task.label >= net.output_dim()) {
        throw std::invalid_argument("verify_pattern: label out of range");
    }
    VariationModel scaled = model;
    scaled.sigma_multiplier = task.sigma_multiplier;

    const auto start = std::chrono::steady_clock::now();
    const PolyZonotope input = build_input_set(task.pattern, task.epsilon);
    PropagationResult prop = propagate_set(net, scaled, input, opts);
    VerificationReport report;
    report.output_hull = interval_hull(prop.output);
    report.verified = check_classification(prop.output, task.label);
    report.layer_hulls = std::move(prop.layer_hulls);
    report.layer_sets = std::move(prop.layer_sets);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.nominal_prediction = nominal_prediction(net, task.pattern);
    return report;
}

struct AccuracySummary {
    double verified_accuracy = 0.0;
    double nominal_accuracy = 0.0;
    std::size_t patterns = 0;
};

/// Fraction of tasks whose output set is verified, with the nominal argmax
/// accuracy computed alongside. Tasks are independent and run in parallel.
inline AccuracySummary verified_accuracy(const NetworkSpec& net, const VariationModel& model,
                                         const std::vector<VerificationTask>& tasks,
                                         const PropagationOptions& opts = {}, unsigned jobs = 1) {
    if (tasks.empty()) throw std::invalid_argument("verified_accuracy: empty task list");
    std::vector<char> verified(tasks.size(), 0);
    std::vector<char> nominal_ok(tasks.size(), 0);
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const VerificationReport r = verify_pattern(net, model, tasks[i], opts);
        verified[i] = r.verified ? 1 : 0;
        nominal_ok[i] = (r.nominal_prediction == tasks[i].label) ? 1 : 0;
    });
    AccuracySummary s;
    s.patterns = tasks.size();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        s.verified_accuracy += verified[i];
        s.nominal_accuracy += nominal_ok[i];
    }
    s.verified_accuracy /= static_cast<double>(tasks.size());
    s.nominal_accuracy /= static_cast<double>(tasks.size());
    return s;
}

}  // namespace polyreach
