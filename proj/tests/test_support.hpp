#ifndef RKM_TEST_SUPPORT_HPP
#define RKM_TEST_SUPPORT_HPP

// Generators and brute-force oracles for the test suites. Nothing here calls
// into the code paths it is used to check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace rkm::testing {

using Matrix = Eigen::MatrixXd;

inline Matrix random_matrix(std::mt19937_64 &gen, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(gen);
    }
    return m;
}

/// Random orthonormal columns by Householder QR (independent of the
/// library's SVD-based polar factor).
inline Matrix random_orthonormal_qr(std::mt19937_64 &gen, Eigen::Index p, Eigen::Index q) {
    const Matrix g = random_matrix(gen, p, q);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix thin = qr.householderQ() * Matrix::Identity(p, q);
    return thin;
}

/// Random q x q orthogonal matrix (rotation or reflection).
inline Matrix random_rotation(std::mt19937_64 &gen, Eigen::Index q) { return random_orthonormal_qr(gen, q, q); }

inline std::vector<int> random_labels(std::mt19937_64 &gen, std::size_t n, int k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::vector<int> labels(n);
    for (auto &l : labels) {
        l = pick(gen);
    }
    // make sure every cluster appears when possible
    for (int c = 0; c < k && static_cast<std::size_t>(c) < n; ++c) {
        labels[static_cast<std::size_t>(c)] = c;
    }
    std::shuffle(labels.begin(), labels.end(), gen);
    return labels;
}

/// Sum of squared deviations from the (weighted) mean of values[begin, end).
inline double segment_sse(const std::vector<double> &values, const std::vector<double> &weights, std::size_t begin,
                          std::size_t end) {
    double w = 0.0, s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        w += weights[i];
        s += weights[i] * values[i];
    }
    const double mean = s / w;
    double sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sse += weights[i] * (values[i] - mean) * (values[i] - mean);
    }
    return sse;
}

/// Minimum weighted SSE over all partitions of sorted values into at most k
/// contiguous blocks, by enumerating every set of cut positions.
inline double brute_force_contiguous(const std::vector<double> &values, const std::vector<double> &weights, int k) {
    const std::size_t n = values.size();
    double best = std::numeric_limits<double>::infinity();
    // Bit g of mask set means a cut between positions g and g + 1.
    const std::size_t gaps = n - 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << gaps); ++mask) {
        if (std::popcount(mask) > k - 1) {
            continue;
        }
        double total = 0.0;
        std::size_t begin = 0;
        for (std::size_t g = 0; g < gaps; ++g) {
            if (mask & (std::uint64_t{1} << g)) {
                total += segment_sse(values, weights, begin, g + 1);
                begin = g + 1;
            }
        }
        total += segment_sse(values, weights, begin, n);
        best = std::min(best, total);
    }
    return best;
}

/// Minimum within-cluster SSE over every labeling of the rows into k
/// (possibly empty) clusters. k^n labelings: keep n small.
inline double brute_force_kmeans(const Matrix &points, int k) {
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<int> labels(n, 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        double total = 0.0;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(points.cols());
            int count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] == c) {
                    sum += points.row(static_cast<Eigen::Index>(i));
                    ++count;
                }
            }
            if (count == 0) {
                continue;
            }
            const Eigen::RowVectorXd mean = sum / count;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] == c) {
                    total += (points.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
                }
            }
        }
        best = std::min(best, total);
        std::size_t pos = 0;
        while (pos < n && ++labels[pos] == k) {
            labels[pos++] = 0;
        }
        if (pos == n) {
            break;
        }
    }
    return best;
}

/// Gaussian blobs around the given centers, per_cluster consecutive rows each.
inline Matrix blobs(std::mt19937_64 &gen, const Matrix &centers, int per_cluster, double sd,
                    std::vector<int> *labels = nullptr) {
    std::normal_distribution<double> normal(0.0, sd);
    Matrix x(centers.rows() * per_cluster, centers.cols());
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        for (int r = 0; r < per_cluster; ++r) {
            const Eigen::Index i = c * per_cluster + r;
            for (Eigen::Index j = 0; j < centers.cols(); ++j) {
                x(i, j) = centers(c, j) + normal(gen);
            }
            if (labels) {
                labels->push_back(static_cast<int>(c));
            }
        }
    }
    return x;
}

} // namespace rkm::testing

#endif
