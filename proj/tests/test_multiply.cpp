#include "polyreach/mat_poly_zonotope.hpp"

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace polyreach;
using test_support::random_assignment;
using test_support::random_mat_poly_zonotope;
using test_support::random_poly_zonotope;
using test_support::random_unit_vec;
using test_support::unit_interval;

namespace {

/// Scalar matrix set {alpha} on the given factor: C = 0, one generator 1
/// with exponent 1.
MatPolyZonotope scalar_alpha(FactorId id) {
    Mat c = Mat::Zero(1, 1);
    Mat g = Mat::Ones(1, 1);
    ExpMat e = ExpMat::Ones(1, 1);
    return MatPolyZonotope(c, {g}, {}, e, {id});
}

}  // namespace

TEST_CASE("multiply squares a shared factor exactly", "[multiply]") {
    // W = {alpha}, P = {alpha} with the same factor: the product is {alpha^2}.
    const MatPolyZonotope w = scalar_alpha(4);
    const PolyZonotope p = unit_interval(4);
    const PolyZonotope q = multiply(w, p);

    REQUIRE(q.num_dep_gens() == 1);
    REQUIRE(q.exp_mat()(0, 0) == 2);
    const IntervalVec hull = interval_hull(q);
    REQUIRE(hull.lower(0) == 0.0);
    REQUIRE(hull.upper(0) == 1.0);

    // Grid oracle: realized products q(alpha) = alpha^2.
    for (int i = 0; i <= 40; ++i) {
        const double alpha = -1.0 + 2.0 * i / 40.0;
        Vec a(1);
        a << alpha;
        REQUIRE(q.sample(a, Vec())(0) == Catch::Approx(alpha * alpha).margin(1e-15));
    }
}

TEST_CASE("constant matrix degenerates to the affine map", "[multiply]") {
    std::mt19937_64 rng(21);
    const PolyZonotope p = random_poly_zonotope(3, 2, 4, 2, rng);
    Mat a(2, 3);
    a << 1.0, -0.5, 0.25, 0.0, 2.0, -1.0;
    const PolyZonotope lhs = multiply(MatPolyZonotope::constant(a), p);
    const PolyZonotope rhs = compact(affine_map(a, p, Vec::Zero(2)));
    REQUIRE(lhs == rhs);
}

TEST_CASE("products of shared-factor sets stay enclosed", "[multiply]") {
    std::mt19937_64 rng(22);
    // 2x2 matrix set and 2-dim vector set sharing two factors.
    const MatPolyZonotope w = random_mat_poly_zonotope(2, 2, 2, 3, 1, rng, 1);
    const PolyZonotope p = random_poly_zonotope(2, 2, 3, 1, rng, 1);
    const PolyZonotope q = multiply(w, p);
    const IntervalVec hull = interval_hull(q);

    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_assignment(q.factor_ids(), rng);
        const Vec beta_w = random_unit_vec(w.num_indep_gens(), rng);
        const Vec beta_p = random_unit_vec(p.num_indep_gens(), rng);
        const Mat wx = w.sample_by_id(a, beta_w);
        const Vec px = p.sample_by_id(a, beta_p);
        const Vec prod = wx * px;
        REQUIRE(hull.contains(prod, 1e-9));
    }
}

TEST_CASE("purely dependent products are reproduced exactly", "[multiply]") {
    std::mt19937_64 rng(23);
    const MatPolyZonotope w = random_mat_poly_zonotope(3, 2, 3, 4, 0, rng, 1);
    const PolyZonotope p = random_poly_zonotope(2, 3, 3, 0, rng, 2);  // ids 2,3,4 overlap {2,3}
    const PolyZonotope q = multiply(w, p);
    REQUIRE(q.num_indep_gens() == 0);

    for (int trial = 0; trial < 1000; ++trial) {
        auto a = random_assignment(q.factor_ids(), rng);
        const Vec prod = w.sample_by_id(a, Vec()) * p.sample_by_id(a, Vec());
        const Vec qs = q.sample_by_id(a, Vec());
        REQUIRE((prod - qs).cwiseAbs().maxCoeff() <=
                1e-9 * std::max(1.0, prod.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("independent cross terms are boxed soundly", "[multiply]") {
    std::mt19937_64 rng(24);
    for (int instance = 0; instance < 10; ++instance) {
        const MatPolyZonotope w = random_mat_poly_zonotope(2, 3, 2, 2, 2, rng, 1);
        const PolyZonotope p = random_poly_zonotope(3, 2, 2, 2, rng, 1);
        const PolyZonotope q = multiply(w, p);
        const IntervalVec hull = interval_hull(q);
        for (int trial = 0; trial < 100; ++trial) {
            auto a = random_assignment(q.factor_ids(), rng);
            const Mat wx = w.sample_by_id(a, random_unit_vec(w.num_indep_gens(), rng));
            const Vec px = p.sample_by_id(a, random_unit_vec(p.num_indep_gens(), rng));
            REQUIRE(hull.contains(wx * px, 1e-9));
        }
    }
}

TEST_CASE("entrywise radius is honored by multiply", "[multiply]") {
    std::mt19937_64 rng(25);
    Mat c(2, 2);
    c << 1.0, -0.5, 0.25, 0.75;
    Mat radius(2, 2);
    radius << 0.1, 0.0, 0.05, 0.2;
    const MatPolyZonotope w(c, {}, {}, ExpMat(0, 0), {}, radius);
    const PolyZonotope p = random_poly_zonotope(2, 2, 3, 1, rng, 7);
    const PolyZonotope q = multiply(w, p);
    const IntervalVec hull = interval_hull(q);

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        Mat noise(2, 2);
        for (Eigen::Index i = 0; i < 4; ++i) noise(i / 2, i % 2) = u(rng);
        auto a = random_assignment(p.factor_ids(), rng);
        const Mat wx = w.sample_by_id(a, Vec(), &noise);
        const Vec px = p.sample_by_id(a, random_unit_vec(p.num_indep_gens(), rng));
        REQUIRE(hull.contains(wx * px, 1e-9));
    }
}

TEST_CASE("multiply rejects mismatched inner dimensions", "[multiply]") {
    const MatPolyZonotope w = MatPolyZonotope::constant(Mat::Identity(2, 2));
    REQUIRE_THROWS_AS(multiply(w, PolyZonotope::point(Vec::Zero(3))), std::invalid_argument);
}
