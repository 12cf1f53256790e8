#ifndef RKM_BASELINES_HPP
#define RKM_BASELINES_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rkm/kernels.hpp"
#include "rkm/linalg.hpp"
#include "rkm/parallel.hpp"
#include "rkm/rng.hpp"
#include "rkm/types.hpp"

namespace rkm {

struct KmeansSolution {
    /// k x d cluster centers.
    Matrix centers;
    Assignment assignment;
    /// Mean within-cluster squared distance.
    double loss = 0.0;
    int iterations = 0;
    int restart_index = 0;
};

struct KmeansOptions {
    int restarts = 30;
    int max_iterations = 300;
    double rel_tolerance = 1e-9;
};

namespace detail {

inline KmeansSolution lloyd_run(const Matrix &points, Index k, SplitMix64 &rng, const KmeansOptions &options) {
    Matrix centers = kmeans_plus_plus(points, k, rng);
    double previous = std::numeric_limits<double>::infinity();
    int iterations = 0;
    NearestResult nearest;
    for (; iterations < options.max_iterations;) {
        nearest = assign_nearest(points, centers);
        repair_empty_clusters(points, centers, nearest);
        centers = cluster_means(points, nearest.labels, k);
        ++iterations;
        const double current = assigned_sse(points, centers, nearest.labels);
        const bool done = std::isfinite(previous) && converged(previous, current, options.rel_tolerance);
        previous = current;
        if (done) {
            break;
        }
    }
    NearestResult final_assignment = assign_nearest(points, centers);
    double sse = 0.0;
    for (double d : final_assignment.distances) {
        sse += d;
    }
    KmeansSolution out{centers, Assignment(std::move(final_assignment.labels), static_cast<int>(k)),
                       sse / static_cast<double>(points.rows()), iterations, 0};
    return out;
}

} // namespace detail

/// Lloyd's k-means from k-means++ starts; best of `restarts`, ties to the
/// lowest restart index. Restart r draws from derive_seed(seed, {r}).
inline KmeansSolution kmeans_fit(const DataMatrix &x, int k, std::uint64_t seed, const KmeansOptions &options = {}) {
    detail::require(k >= 1, "k must be >= 1");
    detail::require(k <= x.n(), "k must not exceed the number of objects");
    detail::require(options.restarts >= 1, "restarts must be >= 1");
    detail::require(options.max_iterations >= 1, "max_iterations must be >= 1");

    std::vector<std::optional<KmeansSolution>> runs(static_cast<std::size_t>(options.restarts));
    parallel_for(runs.size(), [&](std::size_t r) {
        SplitMix64 rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        runs[r] = detail::lloyd_run(x.values(), k, rng, options);
        runs[r]->restart_index = static_cast<int>(r);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r]->loss < runs[best]->loss) {
            best = r;
        }
    }
    return std::move(*runs[best]);
}

inline KmeansSolution kmeans_fit(const DataMatrix &x, int k, int restarts, std::uint64_t seed) {
    KmeansOptions options;
    options.restarts = restarts;
    return kmeans_fit(x, k, seed, options);
}

/**
 * Certified optimum of weighted 1-D k-means on sorted values.
 *
 * Optimal clusters are contiguous runs, so the optimum solves
 *   D[c][j] = min_{i<j} D[c-1][i] + cost(i, j)
 * over prefixes. The leftmost optimal split is monotone in j, which lets each
 * layer be filled by divide and conquer in O(n log n). Loss is the weighted
 * mean squared deviation (weighted SSE divided by total weight).
 */
inline KmeansSolution kmeans_1d_exact_weighted(std::span<const double> values, std::span<const double> weights,
                                               int k) {
    const auto n = static_cast<Index>(values.size());
    detail::require(n >= 1, "1-D k-means needs at least one value");
    detail::require(weights.size() == values.size(), "weights and values differ in length");
    detail::require(k >= 1 && k <= n, "1-D k-means needs 1 <= k <= n");
    for (Index i = 0; i < n; ++i) {
        detail::require(std::isfinite(values[i]), "1-D k-means values must be finite");
        detail::require(weights[i] > 0.0 && std::isfinite(weights[i]), "1-D k-means weights must be positive");
        if (i > 0) {
            detail::require(values[i - 1] <= values[i], "1-D k-means input must be sorted ascending");
        }
    }

    // Prefix sums on shifted values to limit cancellation in cost().
    double shift = 0.0;
    double total_weight = 0.0;
    for (Index i = 0; i < n; ++i) {
        shift += weights[i] * values[i];
        total_weight += weights[i];
    }
    shift /= total_weight;
    std::vector<double> w(static_cast<std::size_t>(n + 1), 0.0), s1(w), s2(w);
    for (Index i = 0; i < n; ++i) {
        const double v = values[i] - shift;
        const auto u = static_cast<std::size_t>(i);
        w[u + 1] = w[u] + weights[i];
        s1[u + 1] = s1[u] + weights[i] * v;
        s2[u + 1] = s2[u] + weights[i] * v * v;
    }
    auto cost = [&](Index i, Index j) { // segment [i, j), j > i
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>(j);
        const double sw = w[b] - w[a];
        const double sm = s1[b] - s1[a];
        return std::max(0.0, (s2[b] - s2[a]) - sm * sm / sw);
    };

    const double inf = std::numeric_limits<double>::infinity();
    const auto width = static_cast<std::size_t>(n + 1);
    std::vector<double> previous(width, inf), current(width, inf);
    std::vector<std::vector<Index>> split(static_cast<std::size_t>(k), std::vector<Index>(width, 0));
    for (Index j = 1; j <= n; ++j) {
        previous[static_cast<std::size_t>(j)] = cost(0, j);
    }

    for (int c = 1; c < k; ++c) {
        std::fill(current.begin(), current.end(), inf);
        auto &layer_split = split[static_cast<std::size_t>(c)];
        // Fill current[j] for j in [lo, hi] knowing the split lies in [opt_lo, opt_hi].
        auto solve = [&](auto &&self, Index lo, Index hi, Index opt_lo, Index opt_hi) -> void {
            if (lo > hi) {
                return;
            }
            const Index mid = lo + (hi - lo) / 2;
            double best = inf;
            Index best_i = opt_lo;
            const Index upper = std::min(opt_hi, mid - 1);
            for (Index i = opt_lo; i <= upper; ++i) {
                const double candidate = previous[static_cast<std::size_t>(i)] + cost(i, mid);
                if (candidate < best) {
                    best = candidate;
                    best_i = i;
                }
            }
            current[static_cast<std::size_t>(mid)] = best;
            layer_split[static_cast<std::size_t>(mid)] = best_i;
            self(self, lo, mid - 1, opt_lo, best_i);
            self(self, mid + 1, hi, best_i, opt_hi);
        };
        // With c+1 clusters, prefix length j >= c+1 and the last cluster starts at i >= c.
        solve(solve, c + 1, n, c, n - 1);
        std::swap(previous, current);
    }

    std::vector<int> labels(static_cast<std::size_t>(n));
    Matrix centers(k, 1);
    Index end = n;
    for (int c = k - 1; c >= 0; --c) {
        const Index begin = c == 0 ? 0 : split[static_cast<std::size_t>(c)][static_cast<std::size_t>(end)];
        const auto a = static_cast<std::size_t>(begin);
        const auto b = static_cast<std::size_t>(end);
        centers(c, 0) = (s1[b] - s1[a]) / (w[b] - w[a]) + shift;
        for (Index i = begin; i < end; ++i) {
            labels[static_cast<std::size_t>(i)] = c;
        }
        end = begin;
    }

    double sse = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double d = values[i] - centers(labels[static_cast<std::size_t>(i)], 0);
        sse += weights[i] * d * d;
    }
    return KmeansSolution{centers, Assignment(std::move(labels), k), sse / total_weight, 0, 0};
}

/// Unweighted exact 1-D k-means on sorted values.
inline KmeansSolution kmeans_1d_exact(std::span<const double> values, int k) {
    const std::vector<double> ones(values.size(), 1.0);
    return kmeans_1d_exact_weighted(values, ones, k);
}

struct PcaResult {
    LoadingMatrix loading;
    Vector singular_values;
    /// Column means removed before the decomposition.
    Vector mean;
};

/// Top-q principal loadings of column-centered X. Each loading column is
/// signed so that its largest-magnitude entry (first one on ties) is positive.
inline PcaResult principal_components(const DataMatrix &x, Index q) {
    detail::require(q >= 1 && q <= x.p(), "PCA needs 1 <= q <= p");
    const Vector mean = x.values().colwise().mean();
    const Matrix centered = x.values().rowwise() - mean.transpose();
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    Matrix v = svd.matrixV();
    Matrix loading(x.p(), q);
    if (v.cols() < q) {
        // n < q: the SVD has fewer than q directions; complete them deterministically.
        v = complete_orthonormal(v, q, 0);
    }
    for (Index c = 0; c < q; ++c) {
        Vector col = v.col(c);
        Index arg = 0;
        for (Index r = 1; r < col.size(); ++r) {
            if (std::abs(col(r)) > std::abs(col(arg)) + 1e-12) {
                arg = r;
            }
        }
        if (col(arg) < 0.0) {
            col = -col;
        }
        loading.col(c) = col;
    }
    Vector sigma = Vector::Zero(x.p());
    sigma.head(svd.singularValues().size()) = svd.singularValues();
    return PcaResult{LoadingMatrix(loading), sigma, mean};
}

inline LoadingMatrix pca_fit(const DataMatrix &x, Index q) { return principal_components(x, q).loading; }

struct TandemResult {
    LoadingMatrix loading;
    KmeansSolution clustering;
};

/// PCA to q dimensions, then k-means on the centered principal scores.
inline TandemResult tandem_fit(const DataMatrix &x, int k, Index q, int restarts, std::uint64_t seed) {
    const PcaResult pca = principal_components(x, q);
    const Matrix scores = (x.values().rowwise() - pca.mean.transpose()) * pca.loading.values();
    KmeansSolution clustering = kmeans_fit(DataMatrix(scores), k, restarts, seed);
    return TandemResult{pca.loading, std::move(clustering)};
}

} // namespace rkm

#endif
