#pragma once

#include "polyreach/poly_zonotope.hpp"

#include <optional>

namespace polyreach {

/// Set of matrices with the same structure as PolyZonotope: a center,
/// dependent generator matrices with factor exponents, and independent
/// generator matrices. Additionally carries an optional entrywise
/// independent radius R >= 0, shorthand for one independent generator
/// r * e_i e_j^T per non-zero entry: it keeps per-weight-cell noise from
/// inflating the generator count quadratically.
class MatPolyZonotope {
public:
    MatPolyZonotope(Mat center, std::vector<Mat> dep_gen, std::vector<Mat> indep_gen, ExpMat exp_mat,
                    std::vector<FactorId> factor_ids, Mat entry_radius = Mat())
        : center_(std::move(center)),
          dep_gen_(std::move(dep_gen)),
          indep_gen_(std::move(indep_gen)),
          exp_mat_(std::move(exp_mat)),
          factor_ids_(std::move(factor_ids)),
          entry_radius_(std::move(entry_radius)) {
        if (entry_radius_.size() == 0) entry_radius_ = Mat::Zero(center_.rows(), center_.cols());
        validate();
    }

    static MatPolyZonotope constant(Mat c) {
        return MatPolyZonotope(std::move(c), {}, {}, ExpMat(0, 0), {});
    }

    Eigen::Index rows() const { return center_.rows(); }
    Eigen::Index cols() const { return center_.cols(); }
    Eigen::Index num_dep_gens() const { return static_cast<Eigen::Index>(dep_gen_.size()); }
    Eigen::Index num_indep_gens() const { return static_cast<Eigen::Index>(indep_gen_.size()); }
    Eigen::Index num_factors() const { return static_cast<Eigen::Index>(factor_ids_.size()); }

    const Mat& center() const { return center_; }
    const std::vector<Mat>& dep_gen() const { return dep_gen_; }
    const std::vector<Mat>& indep_gen() const { return indep_gen_; }
    const ExpMat& exp_mat() const { return exp_mat_; }
    const std::vector<FactorId>& factor_ids() const { return factor_ids_; }
    const Mat& entry_radius() const { return entry_radius_; }

    /// Concrete member for a factor assignment; entry_noise (optional,
    /// entries in [-1,1]) realizes the entrywise independent radius.
    Mat sample(const Vec& alpha, const Vec& beta, const Mat* entry_noise = nullptr) const {
        if (alpha.size() != num_factors()) {
            throw std::invalid_argument("MatPolyZonotope::sample: alpha size mismatch");
        }
        if (beta.size() != num_indep_gens()) {
            throw std::invalid_argument("MatPolyZonotope::sample: beta size mismatch");
        }
        Mat x = center_;
        for (Eigen::Index i = 0; i < num_dep_gens(); ++i) {
            double mono = 1.0;
            for (Eigen::Index k = 0; k < exp_mat_.rows(); ++k) {
                mono *= detail::ipow(alpha(k), exp_mat_(k, i));
            }
            x += mono * dep_gen_[static_cast<std::size_t>(i)];
        }
        for (Eigen::Index j = 0; j < num_indep_gens(); ++j) {
            x += beta(j) * indep_gen_[static_cast<std::size_t>(j)];
        }
        if (entry_noise != nullptr) {
            x += entry_noise->cwiseProduct(entry_radius_);
        }
        return x;
    }

    Mat sample_by_id(const std::map<FactorId, double>& alpha_by_id, const Vec& beta,
                     const Mat* entry_noise = nullptr) const {
        Vec alpha = Vec::Zero(num_factors());
        for (Eigen::Index k = 0; k < num_factors(); ++k) {
            auto it = alpha_by_id.find(factor_ids_[static_cast<std::size_t>(k)]);
            if (it != alpha_by_id.end()) alpha(k) = it->second;
        }
        return sample(alpha, beta, entry_noise);
    }

    /// Entrywise interval bounds under the per-monomial bounding rule.
    std::pair<Mat, Mat> entry_bounds() const {
        Mat lo = center_;
        Mat hi = center_;
        for (Eigen::Index i = 0; i < num_dep_gens(); ++i) {
            const auto r = detail::monomial_range(exp_mat_.col(i));
            const Mat& g = dep_gen_[static_cast<std::size_t>(i)];
            lo += (g * r.lo).cwiseMin(g * r.hi);
            hi += (g * r.lo).cwiseMax(g * r.hi);
        }
        for (const Mat& g : indep_gen_) {
            lo -= g.cwiseAbs();
            hi += g.cwiseAbs();
        }
        lo -= entry_radius_;
        hi += entry_radius_;
        return {lo, hi};
    }

private:
    void validate() const {
        for (const Mat& g : dep_gen_) {
            if (g.rows() != rows() || g.cols() != cols()) {
                throw std::invalid_argument("MatPolyZonotope: dependent generator shape mismatch");
            }
        }
        for (const Mat& g : indep_gen_) {
            if (g.rows() != rows() || g.cols() != cols()) {
                throw std::invalid_argument("MatPolyZonotope: independent generator shape mismatch");
            }
        }
        if (exp_mat_.cols() != num_dep_gens()) {
            throw std::invalid_argument("MatPolyZonotope: exponent matrix column count mismatch");
        }
        if (exp_mat_.rows() != num_factors()) {
            throw std::invalid_argument("MatPolyZonotope: factor id count does not match exponent rows");
        }
        if ((exp_mat_.array() < 0).any()) {
            throw std::invalid_argument("MatPolyZonotope: negative exponent");
        }
        for (std::size_t k = 1; k < factor_ids_.size(); ++k) {
            if (factor_ids_[k - 1] >= factor_ids_[k]) {
                throw std::invalid_argument("MatPolyZonotope: factor ids must be strictly increasing");
            }
        }
        if (entry_radius_.rows() != rows() || entry_radius_.cols() != cols() ||
            (entry_radius_.array() < 0).any()) {
            throw std::invalid_argument("MatPolyZonotope: invalid entry radius");
        }
    }

    Mat center_;
    std::vector<Mat> dep_gen_;
    std::vector<Mat> indep_gen_;
    ExpMat exp_mat_;
    std::vector<FactorId> factor_ids_;
    Mat entry_radius_;
};

/// Set product {X v | X in W, v in P}. Purely dependent terms multiply
/// exactly (exponent columns add, factors with equal ids identified); every
/// term touching an independent generator is bounded by interval arithmetic
/// and emitted as independent generators: the constant-side products stay
/// exact segments, the rest accumulates into an axis-aligned box. The result
/// is compacted.
inline PolyZonotope multiply(const MatPolyZonotope& w, const PolyZonotope& p) {
    if (w.cols() != p.dim()) {
        throw std::invalid_argument("multiply: inner dimensions disagree (" + std::to_string(w.cols()) +
                                    " vs " + std::to_string(p.dim()) + ")");
    }
    const Eigen::Index n = w.rows();
    const auto u = detail::merge_factor_ids(w.factor_ids(), p.factor_ids());
    const int pu = static_cast<int>(u.ids.size());
    const ExpMat ew = detail::lift_exponents(w.exp_mat(), u.row_in_union_1, pu);
    const ExpMat ep = detail::lift_exponents(p.exp_mat(), u.row_in_union_2, pu);

    const Eigen::Index hw = w.num_dep_gens();
    const Eigen::Index hp = p.num_dep_gens();
    const Eigen::Index h = hw + hp + hw * hp;

    Mat dep(n, h);
    ExpMat exp(pu, h);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < hw; ++i) {
        dep.col(col) = w.dep_gen()[static_cast<std::size_t>(i)] * p.center();
        exp.col(col) = ew.col(i);
        ++col;
    }
    for (Eigen::Index j = 0; j < hp; ++j) {
        dep.col(col) = w.center() * p.dep_gen().col(j);
        exp.col(col) = ep.col(j);
        ++col;
    }
    for (Eigen::Index i = 0; i < hw; ++i) {
        for (Eigen::Index j = 0; j < hp; ++j) {
            dep.col(col) = w.dep_gen()[static_cast<std::size_t>(i)] * p.dep_gen().col(j);
            exp.col(col) = ew.col(i) + ep.col(j);
            ++col;
        }
    }

    // Exact segments: independent generators hit by the constant side.
    Mat indep(n, w.num_indep_gens() + p.num_indep_gens());
    col = 0;
    for (Eigen::Index i = 0; i < w.num_indep_gens(); ++i) {
        indep.col(col++) = w.indep_gen()[static_cast<std::size_t>(i)] * p.center();
    }
    for (Eigen::Index j = 0; j < p.num_indep_gens(); ++j) {
        indep.col(col++) = w.center() * p.indep_gen().col(j);
    }

    // Box bound for the remaining cross terms. Every monomial lies in
    // [-1,1], so |dependent part| is bounded by the sum of |generators|.
    Mat w_dep_abs = Mat::Zero(n, w.cols());
    for (const Mat& g : w.dep_gen()) w_dep_abs += g.cwiseAbs();
    Mat w_indep_abs = Mat::Zero(n, w.cols());
    for (const Mat& g : w.indep_gen()) w_indep_abs += g.cwiseAbs();

    Vec p_dep_abs = Vec::Zero(p.dim());
    for (Eigen::Index j = 0; j < hp; ++j) p_dep_abs += p.dep_gen().col(j).cwiseAbs();
    Vec p_indep_abs = Vec::Zero(p.dim());
    for (Eigen::Index j = 0; j < p.num_indep_gens(); ++j) {
        p_indep_abs += p.indep_gen().col(j).cwiseAbs();
    }
    const Vec p_abs_max = p.center().cwiseAbs() + p_dep_abs + p_indep_abs;

    Vec radius = w_indep_abs * p_dep_abs;
    radius += (w_dep_abs + w_indep_abs) * p_indep_abs;
    radius += w.entry_radius() * p_abs_max;

    Eigen::Index box_cols = 0;
    for (Eigen::Index d = 0; d < n; ++d) {
        if (radius(d) > 0.0) ++box_cols;
    }
    Mat indep_full(n, indep.cols() + box_cols);
    indep_full.leftCols(indep.cols()) = indep;
    col = indep.cols();
    for (Eigen::Index d = 0; d < n; ++d) {
        if (radius(d) > 0.0) {
            indep_full.col(col) = Vec::Zero(n);
            indep_full(d, col) = radius(d);
            ++col;
        }
    }

    return compact(PolyZonotope(w.center() * p.center(), std::move(dep), std::move(indep_full),
                                std::move(exp), u.ids));
}

}  // namespace polyreach
