#pragma once

#include "polyreach/verifier.hpp"

namespace polyreach {

namespace detail {

/// Splits an alpha-expanded polynomial into its affine part (mapped back to
/// phi coefficients) and the total magnitude of the dropped monomials.
struct LinearizedPoly {
    PhiCoeffs coeffs{};
    double slack = 0.0;
};

inline LinearizedPoly linearize_poly(const PhiCoeffs& coeffs, double s1, double s2) {
    const AlphaCoeffs alpha = expand_to_alpha(coeffs, s1, s2);
    LinearizedPoly out;
    const double a2 = alpha[1];  // alpha_2 coefficient, monomial (0,1)
    const double a1 = alpha[2];  // alpha_1 coefficient, monomial (1,0)
    const double c01 = (s2 != 0.0) ? a2 / s2 : 0.0;
    const double c10 = (s1 != 0.0) ? a1 / s1 : 0.0;
    out.coeffs[0] = alpha[0] - c01 - c10;
    out.coeffs[1] = c01;
    out.coeffs[2] = c10;
    for (int t = 3; t < kNumPhiMonomials; ++t) out.slack += std::abs(alpha[static_cast<std::size_t>(t)]);
    return out;
}

}  // namespace detail

/// Degree-1 ablation of the variation model: only affine terms in the
/// noise factors survive; every dropped higher-degree monomial is soundly
/// absorbed as an entrywise independent half-width of its coefficient
/// magnitude (each monomial ranges within [-1,1] or [0,1]). The residual
/// term is already linear and is kept.
inline VariationModel linearize_model(const VariationModel& model) {
    const double s1 = model.domain_half_width_1();
    const double s2 = model.domain_half_width_2();
    VariationModel lin = model;
    for (int code = 0; code < kNumWeightCodes; ++code) {
        for (int v = 0; v < kNumVariants; ++v) {
            CodeModel& cm = lin.weights[static_cast<std::size_t>(code)][v];
            if (!cm.present) continue;
            const auto lp = detail::linearize_poly(cm.coeffs, s1, s2);
            cm.coeffs = lp.coeffs;
            cm.indep_slack += lp.slack;
        }
        const auto leak = detail::linearize_poly(lin.leak_coeffs[static_cast<std::size_t>(code)], s1, s2);
        lin.leak_coeffs[static_cast<std::size_t>(code)] = leak.coeffs;
        lin.leak_indep_slack[static_cast<std::size_t>(code)] += leak.slack;
    }
    return lin;
}

/// Verifier pipeline restricted to the zonotope abstract domain: the model
/// is linearized and cross-factor products are demoted to independent
/// generators after every multiplication, so no polynomial dependencies
/// survive. Same numerics otherwise, which isolates the effect of the
/// abstraction.
inline PropagationResult propagate_zonotope(const NetworkSpec& net, const VariationModel& model,
                                            const PolyZonotope& input,
                                            PropagationOptions opts = {}) {
    opts.zonotope_mode = true;
    return propagate_set(net, linearize_model(model), input, opts);
}

inline VerificationReport verify_pattern_zonotope(const NetworkSpec& net, const VariationModel& model,
                                                  const VerificationTask& task,
                                                  PropagationOptions opts = {}) {
    opts.zonotope_mode = true;
    VariationModel scaled = model;
    scaled.sigma_multiplier = task.sigma_multiplier;
    return verify_pattern(net, linearize_model(scaled), task, opts);
}

}  // namespace polyreach
