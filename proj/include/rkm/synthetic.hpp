#ifndef RKM_SYNTHETIC_HPP
#define RKM_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rkm/linalg.hpp"
#include "rkm/rng.hpp"
#include "rkm/types.hpp"

namespace rkm {

/**
 * Clusters hidden in a q-dimensional subspace of the first p1 variables,
 * followed by p2 equicorrelated noise variables and p3 independent noise
 * variables.
 */
struct DatasetSpec {
    int clusters = 8;
    Index q = 2;
    Index p1 = 5;
    Index p2 = 5;
    Index p3 = 5;
    Index n = 400;
    /// Centers are uniform on [-center_range, center_range]^q.
    double center_range = 15.0;
    /// Off-diagonal correlation within the correlated noise block.
    double noise_corr = 0.25;
    /// Drops the noise term so every object sits exactly on its center.
    bool zero_noise = false;
    std::uint64_t seed = 0;

    Index p() const { return p1 + p2 + p3; }

    void validate() const {
        detail::require(clusters >= 1, "dataset needs at least one cluster");
        detail::require(q >= 1 && q <= p1, "dataset needs 1 <= q <= p1");
        detail::require(p2 >= 0 && p3 >= 0, "noise block sizes must be nonnegative");
        detail::require(n >= clusters, "dataset needs n >= number of clusters");
        detail::require(center_range > 0.0, "center_range must be positive");
        const double lower = p2 > 1 ? -1.0 / static_cast<double>(p2 - 1) : -1.0;
        detail::require(noise_corr > lower && noise_corr < 1.0,
                        "noise_corr must keep the correlated block positive definite");
    }
};

/// K=8, n=400 presets with q in {2, 3} and p1 = p2 = p3 in {5, 10}.
inline std::optional<DatasetSpec> table1_preset(std::string_view name) {
    DatasetSpec spec;
    if (name == "table1-q2p5") {
        spec.q = 2;
        spec.p1 = spec.p2 = spec.p3 = 5;
    } else if (name == "table1-q2p10") {
        spec.q = 2;
        spec.p1 = spec.p2 = spec.p3 = 10;
    } else if (name == "table1-q3p5") {
        spec.q = 3;
        spec.p1 = spec.p2 = spec.p3 = 5;
    } else if (name == "table1-q3p10") {
        spec.q = 3;
        spec.p1 = spec.p2 = spec.p3 = 10;
    } else {
        return std::nullopt;
    }
    return spec;
}

struct GeneratedDataset {
    DataMatrix x;
    /// Columns of x standardized to zero mean and unit variance; equal to x
    /// when zero_noise is set, since the noise columns are then constant.
    DataMatrix z;
    Assignment labels;
    /// p x q embedding; rows from p1 onward are zero.
    LoadingMatrix loading_true;
    CentroidSet centers_true;
};

/// Centers each column and scales it to unit sample variance (divisor n - 1).
inline DataMatrix normalize_columns(const DataMatrix &x) {
    detail::require(x.n() >= 2, "normalization needs at least two objects");
    Matrix out = x.values();
    const double denom = static_cast<double>(x.n() - 1);
    for (Index c = 0; c < out.cols(); ++c) {
        auto col = out.col(c);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / denom);
        const double magnitude = std::max(1.0, x.values().col(c).cwiseAbs().maxCoeff());
        if (!(sd > 1e-12 * magnitude)) {
            throw DegenerateData("column " + std::to_string(c) + " is constant and cannot be normalized");
        }
        col /= sd;
    }
    return DataMatrix(std::move(out));
}

/**
 * Draws, in this order from one SplitMix64 stream keyed by spec.seed: the
 * embedding (polar factor of a p1 x q Gaussian matrix), the K centers, the n
 * labels (uniform over clusters), then per object a p-vector of standard
 * normals mapped through the block Cholesky factor of the noise covariance.
 */
inline GeneratedDataset generate_dataset(const DatasetSpec &spec) {
    spec.validate();
    const Index p = spec.p();
    const Index q = spec.q;
    SplitMix64 rng(derive_seed(spec.seed, {0x73796e7468ULL}));

    Matrix embedding = Matrix::Zero(p, q);
    embedding.topRows(spec.p1) = random_orthonormal(spec.p1, q, rng);

    Matrix centers(spec.clusters, q);
    for (Index j = 0; j < spec.clusters; ++j) {
        for (Index c = 0; c < q; ++c) {
            centers(j, c) = rng.uniform(-spec.center_range, spec.center_range);
        }
    }

    std::vector<int> labels(static_cast<std::size_t>(spec.n));
    for (auto &label : labels) {
        label = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.clusters)));
    }

    Matrix correlated_factor;
    if (spec.p2 > 0) {
        Matrix block = Matrix::Constant(spec.p2, spec.p2, spec.noise_corr);
        block.diagonal().setOnes();
        correlated_factor = Eigen::LLT<Matrix>(block).matrixL();
    }

    const Matrix signal = centers * embedding.transpose(); // K x p
    Matrix x(spec.n, p);
    Vector z(p);
    for (Index i = 0; i < spec.n; ++i) {
        x.row(i) = signal.row(labels[static_cast<std::size_t>(i)]);
        if (spec.zero_noise) {
            continue;
        }
        for (Index c = 0; c < p; ++c) {
            z(c) = rng.normal();
        }
        Vector noise = z;
        if (spec.p2 > 0) {
            noise.segment(spec.p1, spec.p2) = correlated_factor * z.segment(spec.p1, spec.p2);
        }
        x.row(i) += noise.transpose();
    }

    DataMatrix data(std::move(x));
    DataMatrix normalized = spec.n >= 2 && !spec.zero_noise ? normalize_columns(data) : data;
    return GeneratedDataset{std::move(data), std::move(normalized), Assignment(std::move(labels), spec.clusters),
                            LoadingMatrix(std::move(embedding)), CentroidSet(std::move(centers))};
}

} // namespace rkm

#endif
