#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "rkm/metrics.hpp"
#include "test_support.hpp"

namespace {

using rkm::Assignment;
using rkm::CentroidSet;
using rkm::LoadingMatrix;
using rkm::Matrix;
using rkm::Parameter;

Matrix column(std::initializer_list<double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) {
        m(i++, 0) = v;
    }
    return m;
}

TEST(AdjustedRandIndex, HandExamples) {
    const Assignment a({0, 0, 1, 1}, 2);
    EXPECT_DOUBLE_EQ(rkm::adjusted_rand_index(a, a), 1.0);
    EXPECT_DOUBLE_EQ(rkm::adjusted_rand_index(a, Assignment({1, 1, 0, 0}, 2)), 1.0);
    // sum C(n_ij, 2) = 0, E = 2/3, M = 2.
    EXPECT_NEAR(rkm::adjusted_rand_index(a, Assignment({0, 1, 0, 1}, 2)), -0.5, 1e-15);
}

TEST(AdjustedRandIndex, InvalidInputs) {
    EXPECT_THROW(rkm::adjusted_rand_index(Assignment({0, 1}, 2), Assignment({0}, 1)), rkm::InvalidInput);
    EXPECT_THROW(rkm::adjusted_rand_index(Assignment({0}, 1), Assignment({0}, 1)), rkm::InvalidInput);
}

TEST(AdjustedRandIndex, InvariantUnderRelabeling) {
    std::mt19937_64 gen(51);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = rkm::testing::random_labels(gen, 60, 4);
        const auto b = rkm::testing::random_labels(gen, 60, 5);
        std::vector<int> perm(5);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<int> relabeled(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            relabeled[i] = perm[static_cast<std::size_t>(b[i])];
        }
        const double base = rkm::adjusted_rand_index(Assignment(a, 4), Assignment(b, 5));
        EXPECT_NEAR(rkm::adjusted_rand_index(Assignment(a, 4), Assignment(relabeled, 5)), base, 1e-14);
        EXPECT_NEAR(rkm::adjusted_rand_index(Assignment(b, 5), Assignment(a, 4)), base, 1e-14);
        EXPECT_GE(base, -1.0);
        EXPECT_LE(base, 1.0);
    }
}

TEST(Hausdorff, HandExamplesAndAsymmetry) {
    const CentroidSet f(column({0, 3}));
    const CentroidSet g(column({0}));
    EXPECT_DOUBLE_EQ(rkm::directed_hausdorff(f, f), 0.0);
    EXPECT_DOUBLE_EQ(rkm::directed_hausdorff(f, g), 3.0);
    EXPECT_DOUBLE_EQ(rkm::directed_hausdorff(g, f), 0.0);
    EXPECT_DOUBLE_EQ(rkm::symmetric_hausdorff(f, g), 3.0);
    EXPECT_DOUBLE_EQ(rkm::symmetric_hausdorff(g, f), 3.0);
    EXPECT_THROW(rkm::directed_hausdorff(Matrix(0, 1), column({1})), rkm::InvalidInput);
}

TEST(Hausdorff, SymmetricVariantIsSymmetric) {
    std::mt19937_64 gen(52);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix f = rkm::testing::random_matrix(gen, 1 + trial % 5, 3);
        const Matrix g = rkm::testing::random_matrix(gen, 1 + trial % 4, 3);
        EXPECT_EQ(rkm::symmetric_hausdorff(f, g), rkm::symmetric_hausdorff(g, f));
    }
}

TEST(AlignRotation, RecoversKnownRotation) {
    std::mt19937_64 gen(53);
    const LoadingMatrix a1(rkm::testing::random_orthonormal_qr(gen, 6, 3));
    EXPECT_LE((rkm::align_rotation(a1, a1) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix r0 = rkm::testing::random_rotation(gen, 3);
        const LoadingMatrix a2(a1.values() * r0);
        EXPECT_LE((rkm::align_rotation(a1, a2) - r0).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(AlignRotation, BeatsRandomProbes) {
    std::mt19937_64 gen(54);
    const LoadingMatrix a1(rkm::testing::random_orthonormal_qr(gen, 7, 3));
    const LoadingMatrix a2(rkm::testing::random_orthonormal_qr(gen, 7, 3));
    const Matrix r = rkm::align_rotation(a1, a2);
    const double best = (a1.values() * r - a2.values()).norm();
    for (int probe = 0; probe < 100; ++probe) {
        const Matrix other = rkm::testing::random_rotation(gen, 3);
        EXPECT_LE(best, (a1.values() * other - a2.values()).norm() + 1e-12);
    }
    EXPECT_THROW(rkm::align_rotation(a1, LoadingMatrix(Matrix::Identity(7, 2))), rkm::InvalidInput);
}

TEST(ParamDistance, AlignmentRemovesRotations) {
    std::mt19937_64 gen(55);
    const Parameter theta{CentroidSet(rkm::testing::random_matrix(gen, 4, 2)),
                          LoadingMatrix(rkm::testing::random_orthonormal_qr(gen, 5, 2))};
    EXPECT_DOUBLE_EQ(rkm::param_distance(theta, theta, true), 0.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix r = rkm::testing::random_rotation(gen, 2);
        // Same model: A -> A R^T, f -> R f.
        const Parameter rotated{CentroidSet(theta.centroids.values() * r.transpose()),
                                LoadingMatrix(theta.loading.values() * r.transpose())};
        EXPECT_NEAR(rkm::param_distance(rotated, theta, true), 0.0, 1e-9);
        EXPECT_GT(rkm::param_distance(rotated, theta, false), 1e-3);

        // Invariance when theta1 is replaced by any rotation of itself.
        const Parameter other{CentroidSet(rkm::testing::random_matrix(gen, 4, 2)),
                              LoadingMatrix(rkm::testing::random_orthonormal_qr(gen, 5, 2))};
        const Parameter other_rotated{CentroidSet(other.centroids.values() * r.transpose()),
                                      LoadingMatrix(other.loading.values() * r.transpose())};
        EXPECT_NEAR(rkm::param_distance(other_rotated, theta, true), rkm::param_distance(other, theta, true), 1e-9);
    }
}

TEST(ParamDistance, ShapeMismatch) {
    const Parameter a{CentroidSet(column({1})), LoadingMatrix(column({1, 0}))};
    const Parameter b{CentroidSet(column({1})), LoadingMatrix(column({1, 0, 0}))};
    EXPECT_THROW(rkm::param_distance(a, b, true), rkm::InvalidInput);
}

} // namespace
