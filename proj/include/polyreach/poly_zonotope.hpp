#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyreach {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ExpMat = Eigen::MatrixXi;
using FactorId = std::int64_t;

/// Reserved factor ids for the two dominant process parameters and the
/// residual noise term. Every weight set in a network shares these three,
/// which is what correlates the uncertainty across all layers.
inline constexpr FactorId kProcessFactor1 = 1;
inline constexpr FactorId kProcessFactor2 = 2;
inline constexpr FactorId kResidualFactor = 3;

/// Input perturbation factors are allocated from this base, one per input
/// dimension; they never collide with the process factors above.
inline constexpr FactorId kInputFactorBase = 100;

/// Axis-aligned box, stored as elementwise bounds with lower <= upper.
struct IntervalVec {
    Vec lower;
    Vec upper;

    Eigen::Index dim() const { return lower.size(); }
    Vec width() const { return upper - lower; }
    Vec midpoint() const { return 0.5 * (lower + upper); }

    bool contains(const Vec& x, double tol = 0.0) const {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
        }
        return true;
    }

    /// True when `other` fits inside this box in every coordinate.
    bool encloses(const IntervalVec& other, double tol = 0.0) const {
        for (Eigen::Index i = 0; i < lower.size(); ++i) {
            if (other.lower(i) < lower(i) - tol || other.upper(i) > upper(i) + tol) return false;
        }
        return true;
    }
};

namespace detail {

/// Range of the monomial prod_k alpha_k^{e_k} over alpha in [-1,1]^p:
/// {1} when all exponents are zero, [0,1] when all are even with at least
/// one positive, and [-1,1] otherwise.
struct MonomialRange {
    double lo;
    double hi;
};

template <typename Col>
inline MonomialRange monomial_range(const Col& exponents) {
    bool all_zero = true;
    bool all_even = true;
    for (Eigen::Index k = 0; k < exponents.size(); ++k) {
        const int e = exponents(k);
        if (e != 0) all_zero = false;
        if (e % 2 != 0) all_even = false;
    }
    if (all_zero) return {1.0, 1.0};
    if (all_even) return {0.0, 1.0};
    return {-1.0, 1.0};
}

template <typename Col>
inline int column_degree(const Col& exponents) {
    int d = 0;
    for (Eigen::Index k = 0; k < exponents.size(); ++k) d += exponents(k);
    return d;
}

/// Union of two strictly increasing factor-id lists plus the row index each
/// original factor occupies in the merged list.
struct FactorUnion {
    std::vector<FactorId> ids;
    std::vector<int> row_in_union_1;
    std::vector<int> row_in_union_2;
};

inline FactorUnion merge_factor_ids(const std::vector<FactorId>& a, const std::vector<FactorId>& b) {
    FactorUnion u;
    u.ids.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u.ids));
    auto locate = [&u](FactorId id) {
        return static_cast<int>(std::lower_bound(u.ids.begin(), u.ids.end(), id) - u.ids.begin());
    };
    u.row_in_union_1.reserve(a.size());
    for (FactorId id : a) u.row_in_union_1.push_back(locate(id));
    u.row_in_union_2.reserve(b.size());
    for (FactorId id : b) u.row_in_union_2.push_back(locate(id));
    return u;
}

/// Re-embeds an exponent matrix into the row layout of a factor union.
inline ExpMat lift_exponents(const ExpMat& e, const std::vector<int>& row_in_union, int p_union) {
    ExpMat lifted = ExpMat::Zero(p_union, e.cols());
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
        lifted.row(row_in_union[static_cast<std::size_t>(r)]) = e.row(r);
    }
    return lifted;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double ipow(double base, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

}  // namespace detail

/// Set of vectors
///   { c + sum_i (prod_k alpha_k^{E(k,i)}) G(:,i) + sum_j beta_j GI(:,j)
///     | alpha_k, beta_j in [-1,1] },
/// where the dependent factors alpha_k are named by globally unique ids.
/// Two sets that carry the same factor id share that factor's value in every
/// joint operation. Instances are immutable; all operations are pure.
class PolyZonotope {
public:
    PolyZonotope(Vec center, Mat dep_gen, Mat indep_gen, ExpMat exp_mat,
                 std::vector<FactorId> factor_ids)
        : center_(std::move(center)),
          dep_gen_(std::move(dep_gen)),
          indep_gen_(std::move(indep_gen)),
          exp_mat_(std::move(exp_mat)),
          factor_ids_(std::move(factor_ids)) {
        validate();
    }

    /// The degenerate set {c}.
    static PolyZonotope point(Vec c) {
        const Eigen::Index n = c.size();
        return PolyZonotope(std::move(c), Mat::Zero(n, 0), Mat::Zero(n, 0), ExpMat(0, 0), {});
    }

    Eigen::Index dim() const { return center_.size(); }
    Eigen::Index num_dep_gens() const { return dep_gen_.cols(); }
    Eigen::Index num_indep_gens() const { return indep_gen_.cols(); }
    Eigen::Index num_factors() const { return static_cast<Eigen::Index>(factor_ids_.size()); }
    Eigen::Index num_gens() const { return num_dep_gens() + num_indep_gens(); }

    const Vec& center() const { return center_; }
    const Mat& dep_gen() const { return dep_gen_; }
    const Mat& indep_gen() const { return indep_gen_; }
    const ExpMat& exp_mat() const { return exp_mat_; }
    const std::vector<FactorId>& factor_ids() const { return factor_ids_; }

    /// Evaluates the defining expression at a concrete factor assignment.
    /// This is the ground-truth membership oracle: alpha is ordered like
    /// factor_ids(), beta like the independent generators.
    Vec sample(const Vec& alpha, const Vec& beta) const {
        check_box(alpha, num_factors(), "alpha");
        check_box(beta, num_indep_gens(), "beta");
        Vec x = center_;
        for (Eigen::Index i = 0; i < dep_gen_.cols(); ++i) {
            double mono = 1.0;
            for (Eigen::Index k = 0; k < exp_mat_.rows(); ++k) {
                mono *= detail::ipow(alpha(k), exp_mat_(k, i));
            }
            x += mono * dep_gen_.col(i);
        }
        for (Eigen::Index j = 0; j < indep_gen_.cols(); ++j) {
            x += beta(j) * indep_gen_.col(j);
        }
        return x;
    }

    /// Same as sample(), but factors are addressed by id; ids absent from
    /// this set are ignored, ids of this set absent from the map default
    /// to zero. Useful for paired sampling across sets sharing factors.
    Vec sample_by_id(const std::map<FactorId, double>& alpha_by_id, const Vec& beta) const {
        Vec alpha = Vec::Zero(num_factors());
        for (Eigen::Index k = 0; k < num_factors(); ++k) {
            auto it = alpha_by_id.find(factor_ids_[static_cast<std::size_t>(k)]);
            if (it != alpha_by_id.end()) alpha(k) = it->second;
        }
        return sample(alpha, beta);
    }

    bool operator==(const PolyZonotope& o) const {
        return center_ == o.center_ && dep_gen_ == o.dep_gen_ && indep_gen_ == o.indep_gen_ &&
               exp_mat_ == o.exp_mat_ && factor_ids_ == o.factor_ids_;
    }

private:
    static void check_box(const Vec& v, Eigen::Index expected, const char* name) {
        if (v.size() != expected) {
            throw std::invalid_argument(std::string("PolyZonotope::sample: ") + name + " has size " +
                                        std::to_string(v.size()) + ", expected " + std::to_string(expected));
        }
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (v(i) < -1.0 - 1e-12 || v(i) > 1.0 + 1e-12) {
                throw std::invalid_argument(std::string("PolyZonotope::sample: ") + name +
                                            " outside the unit box");
            }
        }
    }

    void validate() const {
        const Eigen::Index n = center_.size();
        if (dep_gen_.rows() != n || indep_gen_.rows() != n) {
            throw std::invalid_argument("PolyZonotope: generator row count does not match dimension");
        }
        if (exp_mat_.cols() != dep_gen_.cols()) {
            throw std::invalid_argument("PolyZonotope: exponent matrix has " +
                                        std::to_string(exp_mat_.cols()) + " columns for " +
                                        std::to_string(dep_gen_.cols()) + " dependent generators");
        }
        if (exp_mat_.rows() != static_cast<Eigen::Index>(factor_ids_.size())) {
            throw std::invalid_argument("PolyZonotope: factor id count does not match exponent rows");
        }
        if ((exp_mat_.array() < 0).any()) {
            throw std::invalid_argument("PolyZonotope: negative exponent");
        }
        for (std::size_t k = 1; k < factor_ids_.size(); ++k) {
            if (factor_ids_[k - 1] >= factor_ids_[k]) {
                throw std::invalid_argument("PolyZonotope: factor ids must be strictly increasing");
            }
        }
    }

    Vec center_;
    Mat dep_gen_;
    Mat indep_gen_;
    ExpMat exp_mat_;
    std::vector<FactorId> factor_ids_;
};

/// Exact affine image A*P + b; the representation maps through unchanged.
inline PolyZonotope affine_map(const Mat& a, const PolyZonotope& p, const Vec& b) {
    if (a.cols() != p.dim()) {
        throw std::invalid_argument("affine_map: matrix has " + std::to_string(a.cols()) +
                                    " columns for a set of dimension " + std::to_string(p.dim()));
    }
    if (b.size() != a.rows()) {
        throw std::invalid_argument("affine_map: offset size does not match matrix rows");
    }
    return PolyZonotope(a * p.center() + b, a * p.dep_gen(), a * p.indep_gen(), p.exp_mat(),
                        p.factor_ids());
}

/// Tightest axis-aligned box under per-monomial bounding: each dependent
/// monomial ranges over {1}, [0,1] or [-1,1] (see detail::monomial_range);
/// independent generators contribute +-|GI|.
inline IntervalVec interval_hull(const PolyZonotope& p) {
    Vec lo = p.center();
    Vec hi = p.center();
    for (Eigen::Index i = 0; i < p.num_dep_gens(); ++i) {
        const auto r = detail::monomial_range(p.exp_mat().col(i));
        for (Eigen::Index d = 0; d < p.dim(); ++d) {
            const double g = p.dep_gen()(d, i);
            lo(d) += std::min(g * r.lo, g * r.hi);
            hi(d) += std::max(g * r.lo, g * r.hi);
        }
    }
    if (p.num_indep_gens() > 0) {
        const Vec s = p.indep_gen().cwiseAbs().rowwise().sum();
        lo -= s;
        hi += s;
    }
    return {lo, hi};
}

/// Canonical form: zero-exponent columns fold into the center, duplicate
/// exponent columns merge, exactly-zero generators and unused factors are
/// dropped, and the remaining columns are sorted by exponent vector.
/// Membership is preserved pointwise for every factor assignment.
inline PolyZonotope compact(const PolyZonotope& p) {
    Vec center = p.center();

    // Merge columns with identical exponents; constants go to the center.
    std::map<std::vector<int>, Vec> merged;
    for (Eigen::Index i = 0; i < p.num_dep_gens(); ++i) {
        std::vector<int> key(static_cast<std::size_t>(p.num_factors()));
        bool constant = true;
        for (Eigen::Index k = 0; k < p.num_factors(); ++k) {
            key[static_cast<std::size_t>(k)] = p.exp_mat()(k, i);
            if (key[static_cast<std::size_t>(k)] != 0) constant = false;
        }
        if (constant) {
            center += p.dep_gen().col(i);
            continue;
        }
        auto [it, fresh] = merged.try_emplace(std::move(key), p.dep_gen().col(i));
        if (!fresh) it->second += p.dep_gen().col(i);
    }

    // Drop exact-zero columns and find which factors remain in use.
    std::vector<const std::vector<int>*> keys;
    std::vector<const Vec*> gens;
    std::vector<bool> used(static_cast<std::size_t>(p.num_factors()), false);
    for (const auto& [key, g] : merged) {
        if (g.isZero(0.0)) continue;
        keys.push_back(&key);
        gens.push_back(&g);
        for (std::size_t k = 0; k < key.size(); ++k) {
            if (key[k] != 0) used[k] = true;
        }
    }

    std::vector<FactorId> ids;
    std::vector<Eigen::Index> kept_rows;
    for (Eigen::Index k = 0; k < p.num_factors(); ++k) {
        if (used[static_cast<std::size_t>(k)]) {
            ids.push_back(p.factor_ids()[static_cast<std::size_t>(k)]);
            kept_rows.push_back(k);
        }
    }

    const Eigen::Index h = static_cast<Eigen::Index>(keys.size());
    Mat dep(p.dim(), h);
    ExpMat exp(static_cast<Eigen::Index>(kept_rows.size()), h);
    for (Eigen::Index i = 0; i < h; ++i) {
        dep.col(i) = *gens[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < kept_rows.size(); ++k) {
            exp(static_cast<Eigen::Index>(k), i) =
                (*keys[static_cast<std::size_t>(i)])[static_cast<std::size_t>(kept_rows[k])];
        }
    }

    // Non-zero independent generators only.
    std::vector<Eigen::Index> keep_indep;
    for (Eigen::Index j = 0; j < p.num_indep_gens(); ++j) {
        if (!p.indep_gen().col(j).isZero(0.0)) keep_indep.push_back(j);
    }
    Mat indep(p.dim(), static_cast<Eigen::Index>(keep_indep.size()));
    for (std::size_t j = 0; j < keep_indep.size(); ++j) {
        indep.col(static_cast<Eigen::Index>(j)) = p.indep_gen().col(keep_indep[j]);
    }

    return PolyZonotope(std::move(center), std::move(dep), std::move(indep), std::move(exp),
                        std::move(ids));
}

/// Minkowski-style sum {x1 + x2 | x1 in p1, x2 in p2} where factors with
/// equal ids are identified and distinct ids are concatenated. The result
/// is compacted.
inline PolyZonotope exact_sum(const PolyZonotope& p1, const PolyZonotope& p2) {
    if (p1.dim() != p2.dim()) {
        throw std::invalid_argument("exact_sum: dimension mismatch (" + std::to_string(p1.dim()) +
                                    " vs " + std::to_string(p2.dim()) + ")");
    }
    const auto u = detail::merge_factor_ids(p1.factor_ids(), p2.factor_ids());
    const int pu = static_cast<int>(u.ids.size());

    Mat dep(p1.dim(), p1.num_dep_gens() + p2.num_dep_gens());
    dep << p1.dep_gen(), p2.dep_gen();
    ExpMat exp(pu, dep.cols());
    exp << detail::lift_exponents(p1.exp_mat(), u.row_in_union_1, pu),
        detail::lift_exponents(p2.exp_mat(), u.row_in_union_2, pu);

    Mat indep(p1.dim(), p1.num_indep_gens() + p2.num_indep_gens());
    indep << p1.indep_gen(), p2.indep_gen();

    return compact(PolyZonotope(p1.center() + p2.center(), std::move(dep), std::move(indep),
                                std::move(exp), u.ids));
}

/// Sound order reduction: when the generator count exceeds max_gens, the
/// smallest-norm generators are absorbed into an axis-aligned box via their
/// interval contribution. The result is a superset of p.
inline PolyZonotope reduce_order(const PolyZonotope& p, Eigen::Index max_gens) {
    if (max_gens < 1) throw std::invalid_argument("reduce_order: max_gens must be >= 1");
    if (p.num_gens() <= max_gens) return p;

    struct GenRef {
        double norm;
        Eigen::Index idx;
        bool dep;
    };
    std::vector<GenRef> refs;
    refs.reserve(static_cast<std::size_t>(p.num_gens()));
    for (Eigen::Index i = 0; i < p.num_dep_gens(); ++i) {
        refs.push_back({p.dep_gen().col(i).norm(), i, true});
    }
    for (Eigen::Index j = 0; j < p.num_indep_gens(); ++j) {
        refs.push_back({p.indep_gen().col(j).norm(), j, false});
    }
    const Eigen::Index keep = std::max<Eigen::Index>(max_gens - p.dim(), 0);
    std::stable_sort(refs.begin(), refs.end(),
                     [](const GenRef& a, const GenRef& b) { return a.norm > b.norm; });

    Vec center = p.center();
    Vec radius = Vec::Zero(p.dim());
    std::vector<Eigen::Index> keep_dep, keep_indep;
    for (std::size_t r = 0; r < refs.size(); ++r) {
        const auto& g = refs[r];
        if (static_cast<Eigen::Index>(r) < keep) {
            (g.dep ? keep_dep : keep_indep).push_back(g.idx);
        } else if (g.dep) {
            const auto range = detail::monomial_range(p.exp_mat().col(g.idx));
            center += 0.5 * (range.lo + range.hi) * p.dep_gen().col(g.idx);
            radius += 0.5 * (range.hi - range.lo) * p.dep_gen().col(g.idx).cwiseAbs();
        } else {
            radius += p.indep_gen().col(g.idx).cwiseAbs();
        }
    }
    std::sort(keep_dep.begin(), keep_dep.end());
    std::sort(keep_indep.begin(), keep_indep.end());

    Mat dep(p.dim(), static_cast<Eigen::Index>(keep_dep.size()));
    ExpMat exp(p.num_factors(), dep.cols());
    for (std::size_t i = 0; i < keep_dep.size(); ++i) {
        dep.col(static_cast<Eigen::Index>(i)) = p.dep_gen().col(keep_dep[i]);
        exp.col(static_cast<Eigen::Index>(i)) = p.exp_mat().col(keep_dep[i]);
    }

    Eigen::Index box_cols = 0;
    for (Eigen::Index d = 0; d < p.dim(); ++d) {
        if (radius(d) > 0.0) ++box_cols;
    }
    Mat indep(p.dim(), static_cast<Eigen::Index>(keep_indep.size()) + box_cols);
    for (std::size_t j = 0; j < keep_indep.size(); ++j) {
        indep.col(static_cast<Eigen::Index>(j)) = p.indep_gen().col(keep_indep[j]);
    }
    Eigen::Index col = static_cast<Eigen::Index>(keep_indep.size());
    for (Eigen::Index d = 0; d < p.dim(); ++d) {
        if (radius(d) > 0.0) {
            indep.col(col) = Vec::Zero(p.dim());
            indep(d, col) = radius(d);
            ++col;
        }
    }

    return compact(PolyZonotope(std::move(center), std::move(dep), std::move(indep), std::move(exp),
                                p.factor_ids()));
}

/// Demotes every dependent generator of total degree > 1 into the
/// independent box, leaving a plain zonotope-shaped representation. Sound
/// superset, used by the degree-1 baseline pipeline.
inline PolyZonotope demote_nonlinear(const PolyZonotope& p) {
    Vec center = p.center();
    Vec radius = Vec::Zero(p.dim());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < p.num_dep_gens(); ++i) {
        if (detail::column_degree(p.exp_mat().col(i)) <= 1) {
            keep.push_back(i);
        } else {
            const auto range = detail::monomial_range(p.exp_mat().col(i));
            center += 0.5 * (range.lo + range.hi) * p.dep_gen().col(i);
            radius += 0.5 * (range.hi - range.lo) * p.dep_gen().col(i).cwiseAbs();
        }
    }
    if (static_cast<Eigen::Index>(keep.size()) == p.num_dep_gens()) return p;

    Mat dep(p.dim(), static_cast<Eigen::Index>(keep.size()));
    ExpMat exp(p.num_factors(), dep.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        dep.col(static_cast<Eigen::Index>(i)) = p.dep_gen().col(keep[i]);
        exp.col(static_cast<Eigen::Index>(i)) = p.exp_mat().col(keep[i]);
    }
    Eigen::Index box_cols = 0;
    for (Eigen::Index d = 0; d < p.dim(); ++d) {
        if (radius(d) > 0.0) ++box_cols;
    }
    Mat indep(p.dim(), p.num_indep_gens() + box_cols);
    indep.leftCols(p.num_indep_gens()) = p.indep_gen();
    Eigen::Index col = p.num_indep_gens();
    for (Eigen::Index d = 0; d < p.dim(); ++d) {
        if (radius(d) > 0.0) {
            indep.col(col) = Vec::Zero(p.dim());
            indep(d, col) = radius(d);
            ++col;
        }
    }
    return compact(PolyZonotope(std::move(center), std::move(dep), std::move(indep), std::move(exp),
                                p.factor_ids()));
}

/// Stacks sets on top of each other: result dimension is the sum of the
/// operands' dimensions, with shared factors identified.
inline PolyZonotope stack(const std::vector<PolyZonotope>& parts) {
    if (parts.empty()) throw std::invalid_argument("stack: empty part list");
    Eigen::Index n = 0;
    for (const auto& part : parts) n += part.dim();
    Vec center = Vec::Zero(n);
    PolyZonotope out = PolyZonotope::point(center);
    Eigen::Index offset = 0;
    for (const auto& part : parts) {
        Mat embed = Mat::Zero(n, part.dim());
        embed.block(offset, 0, part.dim(), part.dim()) = Mat::Identity(part.dim(), part.dim());
        out = exact_sum(out, affine_map(embed, part, Vec::Zero(n)));
        offset += part.dim();
    }
    return out;
}

}  // namespace polyreach
