#include "polyreach/variation.hpp"

#include "polyreach/fixtures.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace polyreach;

namespace {

constexpr int kC00 = 0;  // monomial (0,0)
constexpr int kC01 = 1;  // (0,1) = phi_2
constexpr int kC10 = 2;  // (1,0) = phi_1
constexpr int kC20 = 5;  // (2,0) = phi_1^2

/// Model whose hidden-variant table for `code` is exactly the given
/// phi-polynomial, everything else zero.
VariationModel single_poly_model(int code, const PhiCoeffs& coeffs, double sigma1, double sigma2,
                                 double d3 = 0.0) {
    VariationModel m;
    m.sigma1 = sigma1;
    m.sigma2 = sigma2;
    for (int v = 0; v < kNumVariants; ++v) {
        auto& cm = m.weights[static_cast<std::size_t>(code)][v];
        cm.coeffs = coeffs;
        cm.d3_half_width = d3;
        cm.present = true;
    }
    return m;
}

/// Direct evaluation of the weight model at a concrete draw; restated here
/// as the test-side oracle.
double eval_weight(const PhiCoeffs& c, double phi1, double phi2, double d3_half, double alpha3) {
    double v = d3_half * alpha3;
    for (int t = 0; t < kNumPhiMonomials; ++t) {
        double m = c[static_cast<std::size_t>(t)];
        for (int i = 0; i < kPhiMonomials[t].first; ++i) m *= phi1;
        for (int j = 0; j < kPhiMonomials[t].second; ++j) m *= phi2;
        v += m;
    }
    return v;
}

}  // namespace

TEST_CASE("weight set realizes the substituted polynomial", "[variation]") {
    SECTION("constant table is the point {w}") {
        PhiCoeffs c{};
        c[kC00] = 0.75;
        const VariationModel m = single_poly_model(10, c, 0.1, 0.1);
        const MatPolyZonotope w = weight_set(10, WeightVariant::Hidden, m);
        REQUIRE(w.num_dep_gens() == 0);
        REQUIRE(w.center()(0, 0) == 0.75);
    }

    SECTION("phi_1 with sigma1 = 0.1, k = 3 becomes 1 + 0.3 alpha_1") {
        PhiCoeffs c{};
        c[kC10] = 1.0;
        VariationModel m = single_poly_model(10, c, 0.1, 0.1);
        m.sigma_multiplier = 3.0;
        const MatPolyZonotope w = weight_set(10, WeightVariant::Hidden, m);
        const auto [lo, hi] = w.entry_bounds();
        REQUIRE(lo(0, 0) == Catch::Approx(0.7).margin(1e-12));
        REQUIRE(hi(0, 0) == Catch::Approx(1.3).margin(1e-12));
    }

    SECTION("phi_1^2: set covers the true range from a univariate scan") {
        PhiCoeffs c{};
        c[kC20] = 1.0;
        VariationModel m = single_poly_model(10, c, 0.1, 0.1);
        m.sigma_multiplier = 3.0;
        const MatPolyZonotope w = weight_set(10, WeightVariant::Hidden, m);

        // Univariate extremum scan of (1 + 0.3 a)^2 over a in [-1, 1].
        double true_lo = 1e300, true_hi = -1e300;
        for (int i = 0; i <= 10000; ++i) {
            const double a = -1.0 + 2.0 * i / 10000.0;
            const double v = (1.0 + 0.3 * a) * (1.0 + 0.3 * a);
            true_lo = std::min(true_lo, v);
            true_hi = std::max(true_hi, v);
        }
        REQUIRE(true_lo == Catch::Approx(0.49).margin(1e-6));
        REQUIRE(true_hi == Catch::Approx(1.69).margin(1e-6));

        const auto [lo, hi] = w.entry_bounds();
        // Per-monomial bounding treats alpha and alpha^2 independently, so
        // the hull is [1 - 0.6, 1 + 0.6 + 0.09] = [0.4, 1.69] and encloses
        // the true range.
        REQUIRE(lo(0, 0) == Catch::Approx(0.4).margin(1e-12));
        REQUIRE(hi(0, 0) == Catch::Approx(1.69).margin(1e-12));
        REQUIRE(lo(0, 0) <= true_lo + 1e-12);
        REQUIRE(hi(0, 0) >= true_hi - 1e-12);
    }

    SECTION("substitution consistency against direct evaluation") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        PhiCoeffs c{};
        for (int t = 0; t < kNumPhiMonomials; ++t) c[static_cast<std::size_t>(t)] = 0.3 * u(rng);
        VariationModel m = single_poly_model(20, c, 0.07, 0.04, 0.002);
        m.sigma_multiplier = 2.0;
        const MatPolyZonotope w = weight_set(20, WeightVariant::Hidden, m);
        for (int trial = 0; trial < 500; ++trial) {
            Vec alpha = Vec::Zero(3);
            alpha << u(rng), u(rng), u(rng);
            const double phi1 = 1.0 + m.domain_half_width_1() * alpha(0);
            const double phi2 = 1.0 + m.domain_half_width_2() * alpha(1);
            const double direct = eval_weight(c, phi1, phi2, 0.002, alpha(2));
            const double via_set = w.sample(alpha, Vec())(0, 0);
            REQUIRE(via_set == Catch::Approx(direct).margin(1e-12));
        }
    }

    SECTION("nominal recovery: hull contains the dequantized weight") {
        const VariationModel fitted = make_fixture_model(3);
        for (int code = 0; code < kNumWeightCodes; code += 7) {
            const MatPolyZonotope w = weight_set(code, WeightVariant::Hidden, fitted);
            const auto [lo, hi] = w.entry_bounds();
            REQUIRE(lo(0, 0) <= dequantize(code) + 1e-6);
            REQUIRE(hi(0, 0) >= dequantize(code) - 1e-6);
        }
        // Zero variation collapses to exactly the dequantized point.
        const VariationModel nominal = VariationModel::nominal();
        const MatPolyZonotope w0 = weight_set(5, WeightVariant::Hidden, nominal);
        REQUIRE(w0.num_dep_gens() == 0);
        REQUIRE(w0.center()(0, 0) == dequantize(5));
    }

    SECTION("unknown code is rejected") {
        const VariationModel m;  // nothing present
        REQUIRE_THROWS_AS(weight_set(3, WeightVariant::Hidden, m), std::invalid_argument);
    }
}

TEST_CASE("weight matrix sets assemble entrywise", "[variation]") {
    SECTION("all-nominal model gives the constant dequantized matrix") {
        const VariationModel m = VariationModel::nominal();
        LayerSpec layer;
        layer.kind = LayerSpec::Kind::Dense;
        layer.codes = Eigen::MatrixXi(2, 2);
        layer.codes << 0, 63, 31, 40;
        layer.bias = Vec::Zero(2);
        const MatPolyZonotope w = build_weight_matrix_set(layer, false, {}, m);
        REQUIRE(w.num_dep_gens() == 0);
        REQUIRE(w.center().isApprox(nominal_weights(layer), 1e-14));
    }

    SECTION("entries share the process factors") {
        std::mt19937_64 rng(32);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        VariationModel m = make_fixture_model(3);
        m.sigma_multiplier = 3.0;
        LayerSpec layer;
        layer.kind = LayerSpec::Kind::Dense;
        layer.codes = Eigen::MatrixXi(2, 2);
        layer.codes << 12, 50, 12, 33;
        layer.bias = Vec::Zero(2);
        const MatPolyZonotope w = build_weight_matrix_set(layer, false, {}, m);
        REQUIRE(w.factor_ids() ==
                std::vector<FactorId>{kProcessFactor1, kProcessFactor2, kResidualFactor});

        Vec alpha(3);
        alpha << 1.0, 0.0, 0.0;
        const Mat realized = w.sample(alpha, Vec());
        for (Eigen::Index r = 0; r < 2; ++r) {
            for (Eigen::Index c = 0; c < 2; ++c) {
                const CodeModel& cm = m.at(layer.codes(r, c), WeightVariant::Hidden);
                const double direct = eval_weight(cm.coeffs, 1.0 + m.domain_half_width_1(), 1.0,
                                                  cm.d3_half_width, 0.0);
                REQUIRE(realized(r, c) == Catch::Approx(direct).margin(1e-12));
            }
        }
        (void)u;
    }

    SECTION("mixed-sign columns cover both variants") {
        std::mt19937_64 rng(33);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        VariationModel m = make_fixture_model(3);
        m.sigma_multiplier = 3.0;
        LayerSpec layer;
        layer.kind = LayerSpec::Kind::Dense;
        layer.codes = Eigen::MatrixXi(1, 1);
        layer.codes << 27;
        layer.bias = Vec::Zero(1);
        const MatPolyZonotope w =
            build_weight_matrix_set(layer, true, {InputSign::Mixed}, m);
        REQUIRE(w.entry_radius()(0, 0) > 0.0);

        for (int trial = 0; trial < 300; ++trial) {
            Vec alpha(3);
            alpha << u(rng), u(rng), u(rng);
            const double phi1 = 1.0 + m.domain_half_width_1() * alpha(0);
            const double phi2 = 1.0 + m.domain_half_width_2() * alpha(1);
            for (WeightVariant v : {WeightVariant::FirstLayerPos, WeightVariant::FirstLayerNeg}) {
                const CodeModel& cm = m.at(27, v);
                const double realized = eval_weight(cm.coeffs, phi1, phi2, cm.d3_half_width, alpha(2));
                const double mid = w.sample(alpha, Vec())(0, 0);
                REQUIRE(std::abs(realized - mid) <= w.entry_radius()(0, 0) + 1e-12);
            }
        }
    }

    SECTION("missing sign info for the first layer is an error") {
        const VariationModel m = VariationModel::nominal();
        LayerSpec layer;
        layer.kind = LayerSpec::Kind::Dense;
        layer.codes = Eigen::MatrixXi::Constant(1, 2, 30);
        layer.bias = Vec::Zero(1);
        REQUIRE_THROWS_AS(build_weight_matrix_set(layer, true, {}, m), std::invalid_argument);
    }
}

TEST_CASE("leakage sets expand the reset polynomial", "[variation]") {
    Eigen::RowVectorXi row(1);
    row << 8;

    SECTION("zero coefficients give the point {0}") {
        const VariationModel m = VariationModel::nominal();
        const PolyZonotope leak = leakage_set(row, m);
        REQUIRE(leak.num_gens() == 0);
        REQUIRE(leak.center()(0) == 0.0);
    }

    SECTION("constant leak") {
        VariationModel m = VariationModel::nominal();
        m.leak_coeffs[8][kC00] = 1e-3;
        const PolyZonotope leak = leakage_set(row, m);
        REQUIRE(leak.num_gens() == 0);
        REQUIRE(leak.center()(0) == Catch::Approx(1e-3).margin(1e-18));
    }

    SECTION("linear leak scales with the domain") {
        VariationModel m = VariationModel::nominal(0.1, 0.1);
        m.sigma_multiplier = 3.0;
        m.leak_coeffs[8][kC10] = 1e-3;
        const PolyZonotope leak = leakage_set(row, m);
        const IntervalVec hull = interval_hull(leak);
        REQUIRE(hull.lower(0) == Catch::Approx(7e-4).margin(1e-12));
        REQUIRE(hull.upper(0) == Catch::Approx(1.3e-3).margin(1e-12));
    }

    SECTION("rows sum per-code leaks and skip structural zeros") {
        VariationModel m = VariationModel::nominal();
        m.leak_coeffs[8][kC00] = 1e-3;
        m.leak_coeffs[9][kC00] = 2e-3;
        Eigen::RowVectorXi wide(3);
        wide << 8, kStructuralZero, 9;
        const PolyZonotope leak = leakage_set(wide, m);
        REQUIRE(leak.center()(0) == Catch::Approx(3e-3).margin(1e-18));
    }
}

TEST_CASE("coefficient fitting recovers surfaces", "[variation]") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    SECTION("exact degree-3 surface is recovered to 1e-6") {
        PhiCoeffs truth{};
        for (int t = 0; t < kNumPhiMonomials; ++t) truth[static_cast<std::size_t>(t)] = u(rng);
        std::vector<WeightSample> samples;
        for (int s = 0; s < 40; ++s) {
            const double p1 = 1.0 + 0.2 * u(rng);
            const double p2 = 1.0 + 0.2 * u(rng);
            samples.push_back({p1, p2, eval_weight(truth, p1, p2, 0.0, 0.0)});
        }
        const FitResult fit = fit_coefficients(samples);
        for (int t = 0; t < kNumPhiMonomials; ++t) {
            REQUIRE(fit.coeffs[static_cast<std::size_t>(t)] ==
                    Catch::Approx(truth[static_cast<std::size_t>(t)]).margin(1e-6));
        }
        REQUIRE(fit.residual_half_width <= 1e-9);
    }

    SECTION("constant samples give a constant fit") {
        std::vector<WeightSample> samples;
        for (int s = 0; s < 30; ++s) {
            samples.push_back({1.0 + 0.2 * u(rng), 1.0 + 0.2 * u(rng), 0.625});
        }
        const FitResult fit = fit_coefficients(samples);
        REQUIRE(fit.coeffs[kC00] == Catch::Approx(0.625).margin(1e-9));
        for (int t = 1; t < kNumPhiMonomials; ++t) {
            REQUIRE(std::abs(fit.coeffs[static_cast<std::size_t>(t)]) <= 1e-8);
        }
    }

    SECTION("uniform noise lands in the residual half-width") {
        PhiCoeffs truth{};
        truth[kC00] = 0.5;
        truth[kC10] = 0.3;
        const double eps = 0.01;
        std::vector<WeightSample> samples;
        for (int s = 0; s < 200; ++s) {
            const double p1 = 1.0 + 0.2 * u(rng);
            const double p2 = 1.0 + 0.2 * u(rng);
            samples.push_back({p1, p2, eval_weight(truth, p1, p2, 0.0, 0.0) + eps * u(rng)});
        }
        const FitResult fit = fit_coefficients(samples);
        // Typically [0.5 eps, eps]; the L2 fit can tilt slightly away from
        // the truth, so allow a small inflation above the noise amplitude.
        REQUIRE(fit.residual_half_width > 0.4 * eps);
        REQUIRE(fit.residual_half_width <= 1.2 * eps);
        // Containment of every training sample is by construction.
        for (const auto& s : samples) {
            const double predicted = eval_weight(fit.coeffs, s.phi1, s.phi2, 0.0, 0.0);
            REQUIRE(std::abs(s.measured - predicted) <= fit.residual_half_width + 1e-12);
        }
    }

    SECTION("degenerate spread is a fit error") {
        std::vector<WeightSample> samples(20, WeightSample{1.0, 1.0, 0.5});
        REQUIRE_THROWS_AS(fit_coefficients(samples), std::runtime_error);
    }
}

TEST_CASE("synthetic circuit surfaces behave deterministically", "[variation]") {
    SECTION("nominal query returns the dequantized weight") {
        for (int code : {0, 17, 31, 63}) {
            const SynthSurface s = synth_weight_surface(7, code, WeightVariant::Hidden);
            REQUIRE(s.eval(1.0, 1.0) == Catch::Approx(dequantize(code)).margin(1e-12));
        }
    }

    SECTION("same seed gives identical samples") {
        const SynthSurface a = synth_weight_surface(11, 40, WeightVariant::FirstLayerPos);
        const SynthSurface b = synth_weight_surface(11, 40, WeightVariant::FirstLayerPos);
        std::mt19937_64 r1(5), r2(5);
        for (int i = 0; i < 20; ++i) {
            REQUIRE(a.measure(1.05, 0.95, r1) == b.measure(1.05, 0.95, r2));
        }
    }

    SECTION("outputs span a non-zero range under variation") {
        const SynthSurface s = synth_weight_surface(7, 25, WeightVariant::Hidden);
        std::mt19937_64 rng(6);
        std::normal_distribution<double> phi(1.0, 0.05);
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 1000; ++i) {
            const double v = s.measure(phi(rng), phi(rng), rng);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        REQUIRE(hi - lo > 1e-3);
    }
}

TEST_CASE("full model fit is reachset conformant on its training data", "[variation]") {
    const std::uint64_t seed = 7;
    SyntheticDataOptions opts;
    opts.samples_per_surface = 40;
    opts.samples_per_leak = 20;
    const auto rows = make_fit_samples(seed, opts);
    const VariationModel model = fit_model_from_samples(rows, opts.sigma1, opts.sigma2);

    std::size_t in_domain = 0;
    for (const auto& row : rows) {
        if (row.variant == kLeakVariantName) continue;
        const double a1 = (row.phi1 - 1.0) / model.domain_half_width_1();
        const double a2 = (row.phi2 - 1.0) / model.domain_half_width_2();
        if (std::abs(a1) > 1.0 || std::abs(a2) > 1.0) continue;  // outside the chosen domains
        ++in_domain;
        const MatPolyZonotope w = weight_set(row.code, variant_from_string(row.variant), model);
        const auto [lo, hi] = w.entry_bounds();
        REQUIRE(row.measured >= lo(0, 0) - 1e-12);
        REQUIRE(row.measured <= hi(0, 0) + 1e-12);
    }
    REQUIRE(in_domain > 1000);
}
