#ifndef RKM_KERNELS_HPP
#define RKM_KERNELS_HPP

// Lloyd-style building blocks shared by the reduced k-means solver (which
// runs them on projected points X A) and plain k-means.

#include <limits>
#include <vector>

#include "rkm/rng.hpp"
#include "rkm/types.hpp"

namespace rkm::detail {

struct NearestResult {
    std::vector<int> labels;
    /// Squared distance of each point to its assigned center.
    std::vector<double> distances;
};

/// Nearest center per row, ties to the smallest center index.
inline NearestResult assign_nearest(const Matrix &points, const Matrix &centers) {
    const Index n = points.rows();
    NearestResult out;
    out.labels.resize(static_cast<std::size_t>(n));
    out.distances.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        int best_j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < centers.rows(); ++j) {
            const double d = (points.row(i) - centers.row(j)).squaredNorm();
            if (d < best) {
                best = d;
                best_j = static_cast<int>(j);
            }
        }
        out.labels[static_cast<std::size_t>(i)] = best_j;
        out.distances[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

/**
 * Gives every empty cluster a member. For each empty cluster (lowest index
 * first) the point farthest from its own center, among clusters with at
 * least two members, becomes the new center and moves into that cluster.
 * Each move sets one distance to zero, so the assigned loss cannot grow.
 */
inline void repair_empty_clusters(const Matrix &points, Matrix &centers, NearestResult &nearest) {
    const Index k = centers.rows();
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (int label : nearest.labels) {
        ++sizes[static_cast<std::size_t>(label)];
    }
    for (Index c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) {
            continue;
        }
        Index far = -1;
        double far_distance = -1.0;
        for (std::size_t i = 0; i < nearest.labels.size(); ++i) {
            if (sizes[static_cast<std::size_t>(nearest.labels[i])] < 2) {
                continue;
            }
            if (nearest.distances[i] > far_distance) {
                far_distance = nearest.distances[i];
                far = static_cast<Index>(i);
            }
        }
        if (far < 0) {
            throw LogicError("empty-cluster repair found no donor point (k > n?)");
        }
        auto &label = nearest.labels[static_cast<std::size_t>(far)];
        --sizes[static_cast<std::size_t>(label)];
        label = static_cast<int>(c);
        ++sizes[static_cast<std::size_t>(c)];
        nearest.distances[static_cast<std::size_t>(far)] = 0.0;
        centers.row(c) = points.row(far);
    }
}

/// Cluster means; every cluster must be non-empty.
inline Matrix cluster_means(const Matrix &points, const std::vector<int> &labels, Index k) {
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        sums.row(labels[i]) += points.row(static_cast<Index>(i));
        ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (Index j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] == 0) {
            throw LogicError("cluster " + std::to_string(j) + " is empty when updating centroids");
        }
        sums.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }
    return sums;
}

/// k-means++ seeding: first center uniform, then D^2-weighted draws.
/// Falls back to a uniform pick when all remaining distances are zero.
inline Matrix kmeans_plus_plus(const Matrix &points, Index k, SplitMix64 &rng) {
    const Index n = points.rows();
    Matrix centers(k, points.cols());
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    Index chosen = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    centers.row(0) = points.row(chosen);
    for (Index c = 1; c < k; ++c) {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double d = (points.row(i) - centers.row(c - 1)).squaredNorm();
            auto &slot = d2[static_cast<std::size_t>(i)];
            slot = std::min(slot, d);
            total += slot;
        }
        if (!(total > 0.0)) {
            chosen = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            const double target = rng.uniform() * total;
            double running = 0.0;
            chosen = -1;
            Index last_positive = 0;
            for (Index i = 0; i < n; ++i) {
                const double w = d2[static_cast<std::size_t>(i)];
                if (w > 0.0) {
                    last_positive = i;
                }
                running += w;
                if (running > target && w > 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (chosen < 0) {
                chosen = last_positive; // rounding left target past the running sum
            }
        }
        centers.row(c) = points.row(chosen);
    }
    return centers;
}

inline double assigned_sse(const Matrix &points, const Matrix &centers, const std::vector<int> &labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        total += (points.row(static_cast<Index>(i)) - centers.row(labels[i])).squaredNorm();
    }
    return total;
}

/// Relative-decrease stopping rule.
inline bool converged(double previous, double current, double rel_tolerance) {
    if (previous <= 0.0) {
        return true;
    }
    return (previous - current) / previous < rel_tolerance;
}

} // namespace rkm::detail

#endif
