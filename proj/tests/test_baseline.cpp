#include "polyreach/zonotope_baseline.hpp"

#include "polyreach/fixtures.hpp"
#include "polyreach/monte_carlo.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace polyreach;

namespace {

constexpr int kC20 = 5;  // monomial (2,0) = phi_1^2

}  // namespace

TEST_CASE("linearization keeps affine models unchanged", "[baseline]") {
    VariationModel m = VariationModel::nominal(0.05, 0.03);
    m.weights[10][static_cast<int>(WeightVariant::Hidden)].coeffs[2] = 0.4;  // phi_1 term
    const VariationModel lin = linearize_model(m);
    const auto& orig = m.weights[10][static_cast<int>(WeightVariant::Hidden)];
    const auto& got = lin.weights[10][static_cast<int>(WeightVariant::Hidden)];
    for (int t = 0; t < kNumPhiMonomials; ++t) {
        REQUIRE(got.coeffs[static_cast<std::size_t>(t)] ==
                Catch::Approx(orig.coeffs[static_cast<std::size_t>(t)]).margin(1e-13));
    }
    REQUIRE(got.indep_slack == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("phi_1^2 linearizes to 1 + 0.6 alpha_1 plus slack 0.09", "[baseline]") {
    VariationModel m;
    m.sigma1 = 0.1;
    m.sigma2 = 0.1;
    m.sigma_multiplier = 3.0;
    auto& cm = m.weights[10][static_cast<int>(WeightVariant::Hidden)];
    cm.coeffs[kC20] = 1.0;
    cm.present = true;

    const VariationModel lin = linearize_model(m);
    const auto& got = lin.weights[10][static_cast<int>(WeightVariant::Hidden)];
    REQUIRE(got.indep_slack == Catch::Approx(0.09).margin(1e-12));

    const AlphaCoeffs alpha = expand_to_alpha(got.coeffs, 0.3, 0.3);
    REQUIRE(alpha[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(alpha[2] == Catch::Approx(0.6).margin(1e-12));  // alpha_1 coefficient

    const MatPolyZonotope w = weight_set(10, WeightVariant::Hidden, lin);
    const auto [lo, hi] = w.entry_bounds();
    // Hull [0.31, 1.69] encloses the true range [0.49, 1.69].
    REQUIRE(lo(0, 0) == Catch::Approx(0.31).margin(1e-12));
    REQUIRE(hi(0, 0) == Catch::Approx(1.69).margin(1e-12));
    REQUIRE(lo(0, 0) <= 0.49);
    REQUIRE(hi(0, 0) >= 1.69 - 1e-12);
}

TEST_CASE("linearized weight hulls enclose the originals for all codes", "[baseline]") {
    VariationModel m = make_fixture_model(7);
    m.sigma_multiplier = 3.0;
    const VariationModel lin = linearize_model(m);
    for (int code = 0; code < kNumWeightCodes; ++code) {
        for (int v = 0; v < kNumVariants; ++v) {
            const auto variant = static_cast<WeightVariant>(v);
            const auto [lo0, hi0] = weight_set(code, variant, m).entry_bounds();
            const auto [lo1, hi1] = weight_set(code, variant, lin).entry_bounds();
            REQUIRE(lo1(0, 0) <= lo0(0, 0) + 1e-12);
            REQUIRE(hi1(0, 0) >= hi0(0, 0) - 1e-12);
        }
    }
}

TEST_CASE("zonotope pipeline equals the polynomial one without variation", "[baseline]") {
    const NetworkSpec net = make_fixture_network(FixtureShape::Iris, 7);
    const VariationModel nominal = VariationModel::nominal();
    Vec x = Vec::Constant(4, 0.4);
    const IntervalVec poly = interval_hull(propagate_set(net, nominal, build_input_set(x, 0.0)).output);
    const IntervalVec zono = interval_hull(propagate_zonotope(net, nominal, build_input_set(x, 0.0)).output);
    REQUIRE(zono.lower.isApprox(poly.lower, 1e-12));
    REQUIRE(zono.upper.isApprox(poly.upper, 1e-12));
}

TEST_CASE("zonotope hulls are at least as wide as polynomial hulls", "[baseline]") {
    VariationModel model = make_fixture_model(7);
    model.sigma_multiplier = 3.0;
    for (FixtureShape shape : {FixtureShape::Iris, FixtureShape::BreastCancer}) {
        const NetworkSpec net = make_fixture_network(shape, 7);
        const auto patterns = make_fixture_patterns(net, 5, 7);
        for (const auto& [x, label] : patterns) {
            const PolyZonotope input = build_input_set(x, 0.0);
            const IntervalVec poly = interval_hull(propagate_set(net, model, input).output);
            const IntervalVec zono = interval_hull(propagate_zonotope(net, model, input).output);
            REQUIRE(((zono.width() - poly.width()).array() >= -1e-10).all());
        }
    }
}

TEST_CASE("zonotope pipeline is itself sound", "[baseline]") {
    const NetworkSpec net = make_fixture_network(FixtureShape::Iris, 7);
    VariationModel model = make_fixture_model(7);
    model.sigma_multiplier = 3.0;
    Vec x = Vec::Constant(4, 0.6);
    const IntervalVec hull = interval_hull(propagate_zonotope(net, model, build_input_set(x, 0.0)).output);
    McOptions opts;
    opts.samples = 1000;
    opts.truncated = true;
    opts.seed = 3;
    const McRun run = run_monte_carlo(net, model, x, opts);
    REQUIRE(enclosure_percentage(run.outputs, hull) == 1.0);
}

TEST_CASE("zonotope representation carries no higher-degree monomials", "[baseline]") {
    const NetworkSpec net = make_fixture_network(FixtureShape::Iris, 7);
    VariationModel model = make_fixture_model(7);
    PropagationOptions opts;
    opts.record_layer_sets = true;
    opts.zonotope_mode = true;
    const auto prop = propagate_set(net, linearize_model(model), build_input_set(Vec::Constant(4, 0.5), 0.0), opts);
    for (const auto& set : prop.layer_sets) {
        for (Eigen::Index i = 0; i < set.num_dep_gens(); ++i) {
            int degree = 0;
            for (Eigen::Index k = 0; k < set.num_factors(); ++k) degree += set.exp_mat()(k, i);
            REQUIRE(degree <= 1);
        }
    }
}
