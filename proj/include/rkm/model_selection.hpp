#ifndef RKM_MODEL_SELECTION_HPP
#define RKM_MODEL_SELECTION_HPP

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rkm/parallel.hpp"
#include "rkm/solver.hpp"
#include "rkm/types.hpp"

namespace rkm {

/// Restart budget the dimension selector uses unless told otherwise. Wrong
/// choices of q-hat mostly come from local optima at some q, so it is larger
/// than the plain fitting default.
inline constexpr int default_selector_restarts = 50;

/**
 * Variance ratio of a fitted solution: projected within-cluster scatter
 * sum_i min_j ||A^T x_i - f_j||^2 over projected total scatter
 * sum_i ||A^T x_i - A^T xbar||^2. Throws DegenerateData when every
 * projection coincides.
 */
inline double vr_hat(const DataMatrix &x, const LoadingMatrix &a, const CentroidSet &f) {
    detail::require_same_p(x, a);
    detail::require_same_q(a, f);
    const Matrix y = x.values() * a.values();
    const Eigen::RowVectorXd center = y.colwise().mean();
    double within = 0.0;
    double total = 0.0;
    for (Index i = 0; i < y.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < f.k(); ++j) {
            best = std::min(best, (y.row(i) - f.row(j)).squaredNorm());
        }
        within += best;
        total += (y.row(i) - center).squaredNorm();
    }
    if (!(total > 0.0)) {
        throw DegenerateData("variance ratio undefined: all projected objects coincide");
    }
    return within / total;
}

inline double vr_hat(const DataMatrix &x, const RkmSolution &sol) { return vr_hat(x, sol.loading, sol.centroids); }

enum class Delta2Form {
    /// VR(q+1) - 2 VR(q) + VR(q-1), the usual central second difference.
    central,
    /// VR(q+1) - 2 VR(q) - VR(q-1), as the criterion was originally printed.
    literal,
};

/// Second differences of vr, where vr[i] holds VR(i + 1). Uses VR(0) = 0 and
/// VR(q_max + 1) = VR(q_max); entry i of the result is Delta2(i + 1).
inline std::vector<double> delta2_profile(std::span<const double> vr, Delta2Form form = Delta2Form::central) {
    detail::require(!vr.empty(), "delta2 profile needs q_max >= 1");
    const std::size_t q_max = vr.size();
    auto at = [&](std::size_t q) -> double { // q in [0, q_max + 1]
        if (q == 0) {
            return 0.0;
        }
        return vr[std::min(q, q_max) - 1];
    };
    const double sign = form == Delta2Form::central ? 1.0 : -1.0;
    std::vector<double> out(q_max);
    for (std::size_t q = 1; q <= q_max; ++q) {
        out[q - 1] = at(q + 1) - 2.0 * at(q) + sign * at(q - 1);
    }
    return out;
}

/// First index of the maximum, plus one.
inline int argmax_dimension(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return static_cast<int>(best) + 1;
}

struct VrProfile {
    int k = 0;
    /// vr[q - 1] = VR-hat(q) for q = 1..q_max.
    std::vector<double> vr;
    /// delta2[q - 1] = Delta2(q).
    std::vector<double> delta2;
    int q_hat = 0;
    /// fits[q - 1] is the solution that produced vr[q - 1].
    std::vector<RkmSolution> fits;

    int q_max() const { return static_cast<int>(vr.size()); }
};

struct SelectorOptions {
    Delta2Form form = Delta2Form::central;
};

inline int max_profile_dimension(int k, Index p) { return static_cast<int>(std::min<Index>(k - 1, p)); }

/**
 * Fits RKM for q = 1..q_max with per-q seeds derive_seed(base.seed, {q}),
 * then picks q-hat = argmax Delta2(q), ties to the smallest q. base.k and
 * base.q are overridden.
 */
inline VrProfile select_dimension(const DataMatrix &x, int k, int q_max, SolverConfig base,
                                  SelectorOptions options = {}) {
    detail::require(k >= 2, "dimension selection needs k >= 2");
    detail::require(q_max >= 1, "dimension selection needs q_max >= 1");
    detail::require(q_max <= max_profile_dimension(k, x.p()),
                    "q_max=" + std::to_string(q_max) + " exceeds min(k - 1, p)=" +
                        std::to_string(max_profile_dimension(k, x.p())));
    base.k = k;
    std::vector<std::optional<RkmSolution>> fits(static_cast<std::size_t>(q_max));
    parallel_for(fits.size(), [&](std::size_t i) {
        SolverConfig config = base;
        config.q = static_cast<Index>(i + 1);
        config.seed = derive_seed(base.seed, {static_cast<std::uint64_t>(i + 1)});
        fits[i] = fit_rkm(x, config);
    });

    VrProfile profile;
    profile.k = k;
    for (auto &fit : fits) {
        profile.vr.push_back(vr_hat(x, *fit));
        profile.fits.push_back(std::move(*fit));
    }
    profile.delta2 = delta2_profile(profile.vr, options.form);
    profile.q_hat = argmax_dimension(profile.delta2);
    return profile;
}

} // namespace rkm

#endif
