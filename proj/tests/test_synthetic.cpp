#include <cmath>

#include <gtest/gtest.h>

#include "rkm/metrics.hpp"
#include "rkm/solver.hpp"
#include "rkm/synthetic.hpp"

namespace {

using rkm::DataMatrix;
using rkm::DatasetSpec;
using rkm::Matrix;

TEST(GenerateDataset, ZeroNoisePlacesObjectsOnCenters) {
    DatasetSpec spec;
    spec.zero_noise = true;
    spec.seed = 3;
    const auto data = rkm::generate_dataset(spec);
    const Matrix &a = data.loading_true.values();
    const Matrix &f = data.centers_true.values();
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        const auto c = data.labels.labels()[static_cast<std::size_t>(i)];
        EXPECT_LE((data.x.values().row(i) - f.row(c) * a.transpose()).norm(), 1e-12);
    }
    const Matrix scores = data.x.values() * a;
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        const auto c = data.labels.labels()[static_cast<std::size_t>(i)];
        EXPECT_LE((scores.row(i) - f.row(c)).norm(), 1e-12);
    }
    EXPECT_TRUE((f.array().abs() <= spec.center_range).all());
}

TEST(GenerateDataset, LoadingHasOrthonormalSignalBlock) {
    for (const char *name : {"table1-q2p5", "table1-q3p10"}) {
        auto spec = *rkm::table1_preset(name);
        spec.seed = 9;
        const auto data = rkm::generate_dataset(spec);
        const Matrix &a = data.loading_true.values();
        ASSERT_EQ(a.rows(), spec.p());
        ASSERT_EQ(a.cols(), spec.q);
        EXPECT_LE((a.transpose() * a - Matrix::Identity(spec.q, spec.q)).norm(), 1e-12);
        EXPECT_EQ(a.bottomRows(spec.p() - spec.p1).cwiseAbs().maxCoeff(), 0.0);
    }
    EXPECT_FALSE(rkm::table1_preset("table2").has_value());
}

TEST(GenerateDataset, CorrelatedBlockHasTargetCorrelation) {
    // Signal-free columns p1..p1+p2 carry the correlated noise only.
    double total = 0.0;
    int pairs = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DatasetSpec spec;
        spec.seed = seed;
        const auto data = rkm::generate_dataset(spec);
        const Matrix block = data.x.values().middleCols(spec.p1, spec.p2);
        const Matrix centered = block.rowwise() - block.colwise().mean();
        const Matrix cov = centered.transpose() * centered / static_cast<double>(spec.n - 1);
        for (Eigen::Index i = 0; i < spec.p2; ++i) {
            for (Eigen::Index j = i + 1; j < spec.p2; ++j) {
                total += cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
                ++pairs;
            }
        }
    }
    EXPECT_NEAR(total / pairs, 0.25, 0.1);
}

TEST(GenerateDataset, LabelFrequenciesAreUniform) {
    DatasetSpec spec;
    spec.n = 8000;
    spec.seed = 4;
    const auto sizes = rkm::generate_dataset(spec).labels.cluster_sizes();
    ASSERT_EQ(sizes.size(), 8u);
    const double expected = spec.n / 8.0;
    const double sd = std::sqrt(spec.n * (1.0 / 8.0) * (7.0 / 8.0));
    for (auto s : sizes) {
        EXPECT_LE(std::abs(static_cast<double>(s) - expected), 4.0 * sd);
    }
}

TEST(GenerateDataset, Deterministic) {
    DatasetSpec spec;
    spec.seed = 77;
    const auto a = rkm::generate_dataset(spec);
    const auto b = rkm::generate_dataset(spec);
    EXPECT_EQ(a.x.values(), b.x.values());
    EXPECT_EQ(a.z.values(), b.z.values());
    EXPECT_TRUE(a.labels == b.labels);
    spec.seed = 78;
    EXPECT_NE(rkm::generate_dataset(spec).x.values(), a.x.values());
}

TEST(GenerateDataset, RejectsBadSpecs) {
    DatasetSpec spec;
    spec.q = 6;
    EXPECT_THROW(rkm::generate_dataset(spec), rkm::InvalidInput);
    spec = DatasetSpec{};
    spec.n = 4;
    EXPECT_THROW(rkm::generate_dataset(spec), rkm::InvalidInput);
    spec = DatasetSpec{};
    spec.noise_corr = 1.0;
    EXPECT_THROW(rkm::generate_dataset(spec), rkm::InvalidInput);
}

TEST(NormalizeColumns, HandExampleAndContract) {
    Matrix twopoint(2, 1);
    twopoint << 0.0, 2.0;
    const Matrix z = rkm::normalize_columns(DataMatrix(twopoint)).values();
    EXPECT_NEAR(z(0, 0), -1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(z(1, 0), 1.0 / std::sqrt(2.0), 1e-15);

    DatasetSpec spec;
    spec.seed = 5;
    const auto data = rkm::generate_dataset(spec);
    const Matrix &norm = data.z.values();
    for (Eigen::Index c = 0; c < norm.cols(); ++c) {
        EXPECT_NEAR(norm.col(c).mean(), 0.0, 1e-12);
        EXPECT_NEAR(norm.col(c).squaredNorm() / static_cast<double>(spec.n - 1), 1.0, 1e-12);
    }
    const Matrix again = rkm::normalize_columns(data.z).values();
    EXPECT_LE((again - norm).cwiseAbs().maxCoeff(), 1e-12);

    Matrix constant(3, 2);
    constant << 1, 4, 2, 4, 3, 4;
    EXPECT_THROW(rkm::normalize_columns(DataMatrix(constant)), rkm::DegenerateData);
}

TEST(GenerateDataset, ZeroNoiseRecoveredByRkm) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DatasetSpec spec;
        spec.zero_noise = true;
        spec.seed = seed;
        const auto data = rkm::generate_dataset(spec);
        rkm::SolverConfig config;
        config.k = spec.clusters;
        config.q = spec.q;
        config.restarts = 30;
        config.seed = seed;
        const auto fit = rkm::fit_rkm(data.x, config);
        EXPECT_DOUBLE_EQ(rkm::adjusted_rand_index(fit.assignment, data.labels), 1.0) << "seed " << seed;
    }
}

} // namespace
