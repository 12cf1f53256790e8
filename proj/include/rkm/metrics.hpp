#ifndef RKM_METRICS_HPP
#define RKM_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "rkm/linalg.hpp"
#include "rkm/types.hpp"

namespace rkm {

/// Cross-tabulation of two labelings of the same objects.
class ContingencyTable {
public:
    ContingencyTable(const Assignment &a, const Assignment &b) {
        detail::require(a.size() == b.size(), "label vectors differ in length");
        counts_ = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>::Zero(a.k(), b.k());
        for (std::size_t i = 0; i < a.size(); ++i) {
            ++counts_(a[i], b[i]);
        }
        n_ = static_cast<long long>(a.size());
    }

    const auto &counts() const { return counts_; }
    long long n() const { return n_; }

private:
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts_;
    long long n_ = 0;
};

/// Hubert-Arabie adjusted Rand index. Two trivial partitions (both a single
/// cluster, or both all singletons) are identical and score 1.
inline double adjusted_rand_index(const Assignment &a, const Assignment &b) {
    detail::require(a.size() == b.size(), "label vectors differ in length");
    detail::require(a.size() >= 2, "ARI needs at least two objects");
    const ContingencyTable table(a, b);
    auto pairs = [](long long m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); };
    const auto &c = table.counts();
    double index = 0.0;
    for (Index i = 0; i < c.rows(); ++i) {
        for (Index j = 0; j < c.cols(); ++j) {
            index += pairs(c(i, j));
        }
    }
    double sum_rows = 0.0;
    for (Index i = 0; i < c.rows(); ++i) {
        sum_rows += pairs(c.row(i).sum());
    }
    double sum_cols = 0.0;
    for (Index j = 0; j < c.cols(); ++j) {
        sum_cols += pairs(c.col(j).sum());
    }
    const double expected = sum_rows * sum_cols / pairs(table.n());
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) {
        return 1.0;
    }
    return (index - expected) / (maximum - expected);
}

/// max over rows f of F of min over rows g of G of ||f - g||.
inline double directed_hausdorff(const Matrix &f, const Matrix &g) {
    detail::require(f.rows() >= 1 && g.rows() >= 1, "Hausdorff distance needs non-empty sets");
    detail::require(f.cols() == g.cols(), "Hausdorff distance needs points of equal dimension");
    double worst = 0.0;
    for (Index i = 0; i < f.rows(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < g.rows(); ++j) {
            nearest = std::min(nearest, (f.row(i) - g.row(j)).squaredNorm());
        }
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

inline double directed_hausdorff(const CentroidSet &f, const CentroidSet &g) {
    return directed_hausdorff(f.values(), g.values());
}

inline double symmetric_hausdorff(const Matrix &f, const Matrix &g) {
    return std::max(directed_hausdorff(f, g), directed_hausdorff(g, f));
}

inline double symmetric_hausdorff(const CentroidSet &f, const CentroidSet &g) {
    return symmetric_hausdorff(f.values(), g.values());
}

/// Orthogonal Procrustes: the q x q orthogonal R minimizing ||A1 R - A2||_F,
/// i.e. the polar factor of A1^T A2.
inline Matrix align_rotation(const LoadingMatrix &a1, const LoadingMatrix &a2) {
    detail::require(a1.p() == a2.p() && a1.q() == a2.q(), "loading matrices differ in shape");
    return polar_factor(a1.values().transpose() * a2.values());
}

/// A (centroids, loading) parameter pair.
struct Parameter {
    CentroidSet centroids;
    LoadingMatrix loading;
};

struct ParamDistanceOptions {
    bool align = true;
    bool symmetric = true;
};

/**
 * Product distance max(||A1' - A2||_F, d_H(F1', F2)). With alignment,
 * (F1', A1') = (F1 R, A1 R) for the Procrustes rotation R taking A1 onto A2;
 * this leaves A1 f unchanged for every centroid. d_H is symmetric unless
 * options.symmetric is false, in which case it is directed from F1'.
 */
inline double param_distance(const Parameter &theta1, const Parameter &theta2, ParamDistanceOptions options = {}) {
    detail::require(theta1.loading.p() == theta2.loading.p() && theta1.loading.q() == theta2.loading.q(),
                    "parameters have loading matrices of different shape");
    detail::require(theta1.centroids.q() == theta1.loading.q() && theta2.centroids.q() == theta2.loading.q(),
                    "parameter centroids do not match their loading dimension");
    Matrix a1 = theta1.loading.values();
    Matrix f1 = theta1.centroids.values();
    if (options.align) {
        const Matrix r = align_rotation(theta1.loading, theta2.loading);
        a1 = a1 * r;
        f1 = f1 * r;
    }
    const double loading_distance = (a1 - theta2.loading.values()).norm();
    const double centroid_distance = options.symmetric ? symmetric_hausdorff(f1, theta2.centroids.values())
                                                       : directed_hausdorff(f1, theta2.centroids.values());
    return std::max(loading_distance, centroid_distance);
}

inline double param_distance(const Parameter &theta1, const Parameter &theta2, bool align) {
    return param_distance(theta1, theta2, ParamDistanceOptions{align, true});
}

} // namespace rkm

#endif
