#ifndef RKM_SOLVER_HPP
#define RKM_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rkm/baselines.hpp"
#include "rkm/kernels.hpp"
#include "rkm/linalg.hpp"
#include "rkm/objective.hpp"
#include "rkm/parallel.hpp"
#include "rkm/rng.hpp"
#include "rkm/types.hpp"

namespace rkm {

struct SolverConfig {
    int k = 2;
    Index q = 1;
    int restarts = 30;
    int max_iterations = 300;
    double rel_tolerance = 1e-9;
    std::uint64_t seed = 0;

    void validate(const DataMatrix &x) const {
        detail::require(k >= 1, "k must be >= 1");
        detail::require(k <= x.n(), "k=" + std::to_string(k) + " exceeds the number of objects n=" +
                                        std::to_string(x.n()));
        detail::require(q >= 1, "q must be >= 1");
        detail::require(q <= x.p(), "q=" + std::to_string(q) + " exceeds the number of variables p=" +
                                        std::to_string(x.p()));
        detail::require(restarts >= 1, "restarts must be >= 1");
        detail::require(max_iterations >= 1, "max_iterations must be >= 1");
        detail::require(rel_tolerance > 0.0, "rel_tolerance must be positive");
    }
};

namespace detail {

/// (UF)^T X computed as F^T S with S the per-cluster row sums of X.
inline Matrix cross_product(const DataMatrix &x, const Assignment &u, const Matrix &centroids) {
    Matrix sums = Matrix::Zero(centroids.rows(), x.p());
    for (Index i = 0; i < x.n(); ++i) {
        sums.row(u[static_cast<std::size_t>(i)]) += x.row(i);
    }
    return centroids.transpose() * sums; // q x p
}

inline Matrix loading_step(const DataMatrix &x, const Assignment &u, const Matrix &centroids, std::uint64_t seed) {
    // (UF)^T X = Q S P^T  =>  A = P Q^T, the polar factor of its transpose.
    return polar_factor(cross_product(x, u, centroids).transpose(), seed);
}

} // namespace detail

/// Step 1: loading update A = P Q^T from the SVD Q S P^T of (UF)^T X.
/// Rank-deficient cross products are completed from `seed`.
inline LoadingMatrix update_loading(const DataMatrix &x, const Assignment &u, const CentroidSet &f,
                                    std::uint64_t seed = 0) {
    detail::require_labels(x, u);
    detail::require(f.q() <= x.p(), "q must not exceed p");
    detail::require(u.k() <= f.k(), "assignment references more clusters than centroids");
    return LoadingMatrix(detail::loading_step(x, u, f.values(), seed));
}

/// Step 2: nearest centroid in the subspace, ties to the smallest index.
inline Assignment assign_clusters(const DataMatrix &x, const LoadingMatrix &a, const CentroidSet &f) {
    detail::require_same_p(x, a);
    detail::require_same_q(a, f);
    auto nearest = detail::assign_nearest(x.values() * a.values(), f.values());
    return Assignment(std::move(nearest.labels), static_cast<int>(f.k()));
}

/// Step 3: F = (U^T U)^{-1} U^T X A. Throws LogicError on an empty cluster.
inline CentroidSet update_centroids(const DataMatrix &x, const Assignment &u, const LoadingMatrix &a) {
    detail::require_same_p(x, a);
    detail::require_labels(x, u);
    return CentroidSet(detail::cluster_means(x.values() * a.values(), u.labels(), u.k()));
}

namespace detail {

inline RkmSolution rkm_run(const DataMatrix &x, const SolverConfig &config, int restart) {
    const std::uint64_t run_seed = derive_seed(config.seed, {static_cast<std::uint64_t>(restart)});
    SplitMix64 rng(run_seed);
    const Index k = config.k;

    Matrix a = restart == 0 ? pca_fit(x, config.q).values() : random_orthonormal(x.p(), config.q, rng);
    Matrix projected = x.values() * a;
    Matrix centroids = kmeans_plus_plus(projected, k, rng);
    NearestResult nearest = assign_nearest(projected, centroids);
    repair_empty_clusters(projected, centroids, nearest);

    auto assigned_loss = [&](const Matrix &load, const Matrix &cent, const std::vector<int> &labels) {
        const Matrix reconstructed = cent * load.transpose();
        double total = 0.0;
        for (Index i = 0; i < x.n(); ++i) {
            total += (x.row(i) - reconstructed.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
        }
        return total / static_cast<double>(x.n());
    };

    std::vector<double> trace{assigned_loss(a, centroids, nearest.labels)};
    int iterations = 0;
    bool has_converged = false;
    while (iterations < config.max_iterations) {
        const Assignment current(nearest.labels, static_cast<int>(k));
        a = loading_step(x, current, centroids, derive_seed(run_seed, {static_cast<std::uint64_t>(iterations)}));
        projected = x.values() * a;
        nearest = assign_nearest(projected, centroids);
        repair_empty_clusters(projected, centroids, nearest);
        centroids = cluster_means(projected, nearest.labels, k);
        ++iterations;
        const double loss = assigned_loss(a, centroids, nearest.labels);
        const double previous = trace.back();
        trace.push_back(loss);
        if (converged(previous, loss, config.rel_tolerance)) {
            has_converged = true;
            break;
        }
    }

    LoadingMatrix loading(a);
    CentroidSet centroid_set(centroids);
    auto final_nearest = assign_nearest(projected, centroids);
    RkmSolution out{loading,
                    centroid_set,
                    Assignment(std::move(final_nearest.labels), static_cast<int>(k)),
                    rkm_objective(x, loading, centroid_set),
                    iterations,
                    restart,
                    config.seed,
                    std::move(trace),
                    has_converged};
    return out;
}

} // namespace detail

/**
 * Fits reduced k-means by alternating least squares with `restarts`
 * independent starts, returning the lowest-loss run (ties to the lowest
 * restart index).
 *
 * Restart 0 starts from the top-q principal loadings of centered X, later
 * restarts from a random orthonormal frame; centroids are seeded by
 * k-means++ on X A. Each sweep updates the loading, the assignment (with
 * empty-cluster repair) and the centroids, and the run stops once the
 * relative decrease of the loss falls below rel_tolerance. Restart r uses
 * the stream derive_seed(seed, {r}), so the result does not depend on the
 * thread count.
 */
inline RkmSolution fit_rkm(const DataMatrix &x, const SolverConfig &config) {
    config.validate(x);
    std::vector<std::optional<RkmSolution>> runs(static_cast<std::size_t>(config.restarts));
    parallel_for(runs.size(), [&](std::size_t r) { runs[r] = detail::rkm_run(x, config, static_cast<int>(r)); });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r]->loss < runs[best]->loss) {
            best = r;
        }
    }
    return std::move(*runs[best]);
}

struct Projection {
    /// n x q object scores Y = X A.
    Matrix scores;
    /// k x q cluster means of Y; a cluster without members keeps its fitted centroid.
    Matrix centers;
};

inline Projection project(const DataMatrix &x, const RkmSolution &sol) {
    detail::require_same_p(x, sol.loading);
    detail::require_labels(x, sol.assignment);
    Projection out;
    out.scores = x.values() * sol.loading.values();
    const Index k = sol.centroids.k();
    out.centers = Matrix::Zero(k, sol.loading.q());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < x.n(); ++i) {
        const int label = sol.assignment[static_cast<std::size_t>(i)];
        out.centers.row(label) += out.scores.row(i);
        ++counts[static_cast<std::size_t>(label)];
    }
    for (Index j = 0; j < k; ++j) {
        const auto count = counts[static_cast<std::size_t>(j)];
        if (count == 0) {
            out.centers.row(j) = sol.centroids.row(j);
        } else {
            out.centers.row(j) /= static_cast<double>(count);
        }
    }
    return out;
}

} // namespace rkm

#endif
