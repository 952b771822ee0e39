#pragma once

#include "polyreach/poly_zonotope.hpp"

#include <optional>

namespace polyreach {

/// Per-neuron sign classification of a pre-activation set, derived from its
/// interval hull.
enum class NeuronCase { Active, Inactive, Mixed };

/// A coordinate counts as inactive only when it cannot reach zero from
/// above; with leakage present the boundary u = 0 is kept in the mixed
/// case so the exact-zero pass-through stays covered.
inline std::vector<NeuronCase> classify_neurons(const IntervalVec& hull, bool with_leak) {
    std::vector<NeuronCase> cases(static_cast<std::size_t>(hull.dim()));
    for (Eigen::Index i = 0; i < hull.dim(); ++i) {
        if (hull.lower(i) >= 0.0) {
            cases[static_cast<std::size_t>(i)] = NeuronCase::Active;
        } else if (with_leak ? hull.upper(i) < 0.0 : hull.upper(i) <= 0.0) {
            cases[static_cast<std::size_t>(i)] = NeuronCase::Inactive;
        } else {
            cases[static_cast<std::size_t>(i)] = NeuronCase::Mixed;
        }
    }
    return cases;
}

/// Sound enclosure of the ReLU image. Active coordinates pass through
/// exactly, inactive ones become the leakage set (or the point zero),
/// mixed ones use the minimal-area linear relaxation y = lambda x + mu with
/// a fresh independent generator of half-width eps = -lambda l / 2; any
/// leakage is folded into that band. The dependent structure of the input
/// survives through the linear part.
inline PolyZonotope enclose_relu(const PolyZonotope& p,
                                 const std::optional<PolyZonotope>& leak = std::nullopt) {
    const Eigen::Index n = p.dim();
    if (leak.has_value() && leak->dim() != n) {
        throw std::invalid_argument("enclose_relu: leakage dimension mismatch");
    }
    const IntervalVec hull = interval_hull(p);
    std::optional<IntervalVec> leak_hull;
    if (leak.has_value()) leak_hull = interval_hull(*leak);
    const auto cases = classify_neurons(hull, leak.has_value());

    Mat lambda = Mat::Zero(n, n);
    Vec mu = Vec::Zero(n);
    Vec band = Vec::Zero(n);
    Mat leak_select = Mat::Zero(n, n);
    bool any_leak = false;

    for (Eigen::Index i = 0; i < n; ++i) {
        const double l = hull.lower(i);
        const double u = hull.upper(i);
        switch (cases[static_cast<std::size_t>(i)]) {
            case NeuronCase::Active:
                lambda(i, i) = 1.0;
                break;
            case NeuronCase::Inactive:
                if (leak.has_value()) {
                    leak_select(i, i) = 1.0;
                    any_leak = true;
                }
                break;
            case NeuronCase::Mixed: {
                const double slope = u / (u - l);
                const double eps = -slope * l / 2.0;
                lambda(i, i) = slope;
                mu(i) = eps;
                band(i) = eps;
                if (leak_hull.has_value()) {
                    band(i) += std::max(std::abs(leak_hull->lower(i)), std::abs(leak_hull->upper(i)));
                }
                break;
            }
        }
    }

    PolyZonotope out = affine_map(lambda, p, mu);

    Eigen::Index band_cols = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (band(i) > 0.0) ++band_cols;
    }
    if (band_cols > 0) {
        Mat indep(n, out.num_indep_gens() + band_cols);
        indep.leftCols(out.num_indep_gens()) = out.indep_gen();
        Eigen::Index col = out.num_indep_gens();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (band(i) > 0.0) {
                indep.col(col) = Vec::Zero(n);
                indep(i, col) = band(i);
                ++col;
            }
        }
        out = PolyZonotope(out.center(), out.dep_gen(), std::move(indep), out.exp_mat(),
                           out.factor_ids());
    }
    if (any_leak) {
        out = exact_sum(out, affine_map(leak_select, *leak, Vec::Zero(n)));
    }
    return out;
}

}  // namespace polyreach
