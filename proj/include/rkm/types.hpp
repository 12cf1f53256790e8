#ifndef RKM_TYPES_HPP
#define RKM_TYPES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkm/error.hpp"

namespace rkm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance for the column-orthonormality check on loading matrices.
inline constexpr double orthonormality_tolerance = 1e-10;

/// n x p observation matrix; rows are objects. Entries are finite.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values) : values_(std::move(values)) {
        detail::require(values_.rows() >= 1 && values_.cols() >= 1,
                        "data matrix must have at least one row and one column");
        detail::require(values_.allFinite(), "data matrix contains non-finite entries");
    }

    const Matrix &values() const { return values_; }
    Index n() const { return values_.rows(); }
    Index p() const { return values_.cols(); }
    auto row(Index i) const { return values_.row(i); }

    bool operator==(const DataMatrix &other) const { return values_ == other.values_; }

private:
    Matrix values_;
};

/// p x q matrix with orthonormal columns spanning the clustering subspace.
class LoadingMatrix {
public:
    explicit LoadingMatrix(Matrix values) : values_(std::move(values)) {
        detail::require(values_.cols() >= 1 && values_.cols() <= values_.rows(),
                        "loading matrix must satisfy 1 <= q <= p");
        detail::require(values_.allFinite(), "loading matrix contains non-finite entries");
        detail::require(orthonormality_error(values_) <= orthonormality_tolerance,
                        "loading matrix columns are not orthonormal");
    }

    /// max |A^T A - I| entry.
    static double orthonormality_error(const Matrix &a) {
        const Matrix gram = a.transpose() * a;
        return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    }

    const Matrix &values() const { return values_; }
    Index p() const { return values_.rows(); }
    Index q() const { return values_.cols(); }

    bool operator==(const LoadingMatrix &other) const { return values_ == other.values_; }

private:
    Matrix values_;
};

/// k x q matrix; row j is the low-dimensional center of cluster j.
class CentroidSet {
public:
    explicit CentroidSet(Matrix values) : values_(std::move(values)) {
        detail::require(values_.rows() >= 1 && values_.cols() >= 1, "centroid set must be non-empty");
        detail::require(values_.allFinite(), "centroid set contains non-finite entries");
    }

    const Matrix &values() const { return values_; }
    Index k() const { return values_.rows(); }
    Index q() const { return values_.cols(); }
    auto row(Index j) const { return values_.row(j); }

    bool operator==(const CentroidSet &other) const { return values_ == other.values_; }

private:
    Matrix values_;
};

/// Cluster label per object, 0-based. Stands in for the binary membership matrix.
class Assignment {
public:
    Assignment(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
        detail::require(k_ >= 1, "assignment needs k >= 1");
        for (int label : labels_) {
            detail::require(label >= 0 && label < k_, "assignment label out of range [0, k)");
        }
    }

    /// Builds from arbitrary integer labels (e.g. read from a file) by
    /// compacting them to 0..k-1 in order of first appearance.
    static Assignment from_raw(std::span<const long long> raw) {
        std::vector<long long> seen;
        std::vector<int> labels;
        labels.reserve(raw.size());
        for (long long value : raw) {
            auto it = std::find(seen.begin(), seen.end(), value);
            if (it == seen.end()) {
                seen.push_back(value);
                it = seen.end() - 1;
            }
            labels.push_back(static_cast<int>(it - seen.begin()));
        }
        return Assignment(std::move(labels), std::max<int>(1, static_cast<int>(seen.size())));
    }

    const std::vector<int> &labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    int k() const { return k_; }
    int operator[](std::size_t i) const { return labels_[i]; }

    std::vector<Index> cluster_sizes() const {
        std::vector<Index> sizes(static_cast<std::size_t>(k_), 0);
        for (int label : labels_) {
            ++sizes[static_cast<std::size_t>(label)];
        }
        return sizes;
    }

    bool operator==(const Assignment &other) const = default;

private:
    std::vector<int> labels_;
    int k_;
};

/// One fitted reduced k-means model.
struct RkmSolution {
    LoadingMatrix loading;
    CentroidSet centroids;
    Assignment assignment;
    /// Mean-per-object loss (1/n) sum_i min_j ||x_i - A f_j||^2.
    double loss = 0.0;
    int iterations = 0;
    int restart_index = 0;
    std::uint64_t seed = 0;
    /// Assigned loss after every full ALS sweep of the winning restart.
    std::vector<double> loss_trace;
    bool converged = false;
};

namespace detail {

inline void require_same_p(const DataMatrix &x, const LoadingMatrix &a) {
    require(x.p() == a.p(), "dimension mismatch: data has p=" + std::to_string(x.p()) +
                                " but loading has p=" + std::to_string(a.p()));
}

inline void require_same_q(const LoadingMatrix &a, const CentroidSet &f) {
    require(a.q() == f.q(), "dimension mismatch: loading has q=" + std::to_string(a.q()) +
                                " but centroids have q=" + std::to_string(f.q()));
}

inline void require_labels(const DataMatrix &x, const Assignment &u) {
    require(static_cast<Index>(u.size()) == x.n(), "dimension mismatch: assignment length differs from n");
}

} // namespace detail
} // namespace rkm

#endif
