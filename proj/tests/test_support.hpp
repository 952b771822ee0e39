#pragma once

#include "polyreach/mat_poly_zonotope.hpp"
#include "polyreach/poly_zonotope.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

namespace test_support {

using polyreach::ExpMat;
using polyreach::FactorId;
using polyreach::Mat;
using polyreach::MatPolyZonotope;
using polyreach::PolyZonotope;
using polyreach::Vec;

/// Scalar set [-1, 1] represented with a single linear generator on the
/// given factor.
inline PolyZonotope unit_interval(FactorId id) {
    Vec c = Vec::Zero(1);
    Mat g = Mat::Ones(1, 1);
    ExpMat e = ExpMat::Ones(1, 1);
    return PolyZonotope(c, g, Mat::Zero(1, 0), e, {id});
}

inline Vec random_unit_vec(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

inline PolyZonotope random_poly_zonotope(Eigen::Index dim, Eigen::Index factors, Eigen::Index dep,
                                         Eigen::Index indep, std::mt19937_64& rng,
                                         FactorId first_id = 1, int max_exp = 3) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(0, max_exp);
    Vec c(dim);
    for (Eigen::Index i = 0; i < dim; ++i) c(i) = u(rng);
    Mat g(dim, dep);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dep; ++j) g(i, j) = u(rng);
    }
    Mat gi(dim, indep);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < indep; ++j) gi(i, j) = 0.3 * u(rng);
    }
    ExpMat em(factors, dep);
    for (Eigen::Index j = 0; j < dep; ++j) {
        bool nonzero = false;
        for (Eigen::Index k = 0; k < factors; ++k) {
            em(k, j) = e(rng);
            if (em(k, j) != 0) nonzero = true;
        }
        if (!nonzero && factors > 0) em(0, j) = 1;
    }
    std::vector<FactorId> ids;
    for (Eigen::Index k = 0; k < factors; ++k) ids.push_back(first_id + k);
    return PolyZonotope(c, g, gi, em, ids);
}

inline MatPolyZonotope random_mat_poly_zonotope(Eigen::Index rows, Eigen::Index cols,
                                                Eigen::Index factors, Eigen::Index dep,
                                                Eigen::Index indep, std::mt19937_64& rng,
                                                FactorId first_id = 1, int max_exp = 2) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(0, max_exp);
    Mat c(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) c(i, j) = u(rng);
    }
    auto random_mat = [&](double scale) {
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * u(rng);
        }
        return m;
    };
    std::vector<Mat> dep_gens, indep_gens;
    for (Eigen::Index t = 0; t < dep; ++t) dep_gens.push_back(random_mat(0.5));
    for (Eigen::Index t = 0; t < indep; ++t) indep_gens.push_back(random_mat(0.2));
    ExpMat em(factors, dep);
    for (Eigen::Index j = 0; j < dep; ++j) {
        bool nonzero = false;
        for (Eigen::Index k = 0; k < factors; ++k) {
            em(k, j) = e(rng);
            if (em(k, j) != 0) nonzero = true;
        }
        if (!nonzero && factors > 0) em(0, j) = 1;
    }
    std::vector<FactorId> ids;
    for (Eigen::Index k = 0; k < factors; ++k) ids.push_back(first_id + k);
    return MatPolyZonotope(c, dep_gens, indep_gens, em, ids);
}

/// Factor assignment map covering every id of the given sets.
inline std::map<FactorId, double> random_assignment(const std::vector<FactorId>& ids,
                                                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::map<FactorId, double> a;
    for (FactorId id : ids) a[id] = u(rng);
    return a;
}

}  // namespace test_support
