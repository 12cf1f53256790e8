#include <random>

#include <gtest/gtest.h>

#include "rkm/model_selection.hpp"
#include "test_support.hpp"

namespace {

using rkm::CentroidSet;
using rkm::DataMatrix;
using rkm::LoadingMatrix;
using rkm::Matrix;

Matrix make(Eigen::Index r, Eigen::Index c, std::initializer_list<double> values) {
    Matrix m(r, c);
    auto it = values.begin();
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = *it++;
        }
    }
    return m;
}

TEST(VrHat, HandExamples) {
    const LoadingMatrix e1(make(2, 1, {1, 0}));
    // Two point masses, each at its own projected centroid.
    const DataMatrix masses(make(4, 2, {2, 0, 2, 0, -2, 0, -2, 0}));
    EXPECT_DOUBLE_EQ(rkm::vr_hat(masses, e1, CentroidSet(make(2, 1, {2, -2}))), 0.0);

    // Single centroid at the projected mean.
    const DataMatrix spread(make(3, 2, {1, 5, 2, 6, 6, 7}));
    EXPECT_DOUBLE_EQ(rkm::vr_hat(spread, e1, CentroidSet(make(1, 1, {3}))), 1.0);

    const double eps = 0.37;
    const DataMatrix x(make(4, 2, {1, 0, -1, 0, 1, eps, -1, eps}));
    EXPECT_DOUBLE_EQ(rkm::vr_hat(x, e1, CentroidSet(make(2, 1, {1, -1}))), 0.0);
}

TEST(VrHat, ZeroProjectedVarianceIsDegenerate) {
    const DataMatrix x(make(2, 2, {1, 3, 1, -3}));
    EXPECT_THROW(rkm::vr_hat(x, LoadingMatrix(make(2, 1, {1, 0})), CentroidSet(make(1, 1, {1}))),
                 rkm::DegenerateData);
}

TEST(VrHat, RotationAndScaleInvariance) {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix x = rkm::testing::random_matrix(gen, 40, 5);
        const Matrix a = rkm::testing::random_orthonormal_qr(gen, 5, 3);
        const Matrix f = rkm::testing::random_matrix(gen, 4, 3);
        const Matrix r = rkm::testing::random_rotation(gen, 3);
        const double base = rkm::vr_hat(DataMatrix(x), LoadingMatrix(a), CentroidSet(f));
        EXPECT_NEAR(rkm::vr_hat(DataMatrix(x), LoadingMatrix(a * r.transpose()), CentroidSet(f * r.transpose())), base,
                    1e-10);
        const double c = 3.7;
        EXPECT_NEAR(rkm::vr_hat(DataMatrix(c * x), LoadingMatrix(a), CentroidSet(c * f)), base, 1e-12);
    }
}

TEST(Delta2Profile, HandExamples) {
    const std::vector<double> single{0.4};
    EXPECT_DOUBLE_EQ(rkm::delta2_profile(single)[0], -0.4);

    const std::vector<double> linear{0.1, 0.2, 0.3, 0.4, 0.5};
    const auto flat = rkm::delta2_profile(linear);
    for (std::size_t q = 1; q + 1 < linear.size(); ++q) {
        EXPECT_NEAR(flat[q], 0.0, 1e-15);
    }

    const std::vector<double> jump{0.1, 0.2, 0.9};
    EXPECT_NEAR(rkm::delta2_profile(jump)[1], 0.6, 1e-15);
    // Literal form: 0.9 - 0.4 - 0.1.
    EXPECT_NEAR(rkm::delta2_profile(jump, rkm::Delta2Form::literal)[1], 0.4, 1e-15);

    const std::vector<double> zeros(4, 0.0);
    for (double d : rkm::delta2_profile(zeros)) {
        EXPECT_EQ(d, 0.0);
    }
    EXPECT_THROW(rkm::delta2_profile(std::vector<double>{}), rkm::InvalidInput);
}

TEST(Delta2Profile, CurvatureMaximumIsSelected) {
    // Concave rise to q* = 3, flat afterwards.
    const std::vector<double> vr{0.05, 0.08, 0.10, 0.60, 0.61, 0.62};
    const auto d2 = rkm::delta2_profile(vr);
    EXPECT_EQ(rkm::argmax_dimension(d2), 3);
    // Ties go to the smallest q.
    const std::vector<double> tied{1.0, 3.0, 3.0};
    EXPECT_EQ(rkm::argmax_dimension(tied), 2);
}

TEST(SelectDimension, CollinearClustersGiveOneDimension) {
    std::mt19937_64 gen(42);
    for (int seed = 0; seed < 20; ++seed) {
        const Eigen::Vector3d direction = rkm::testing::random_orthonormal_qr(gen, 3, 1);
        Matrix centers(3, 3);
        for (int c = 0; c < 3; ++c) {
            centers.row(c) = (10.0 * (c - 1)) * direction.transpose();
        }
        const Matrix x = rkm::testing::blobs(gen, centers, 30, 0.5);
        rkm::SolverConfig config;
        config.restarts = 10;
        config.seed = static_cast<std::uint64_t>(seed);
        const auto profile = rkm::select_dimension(DataMatrix(x), 3, 2, config);
        EXPECT_EQ(profile.q_hat, 1) << "seed " << seed;
        ASSERT_EQ(profile.fits.size(), 2u);
        for (double v : profile.vr) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(SelectDimension, RejectsBadRanges) {
    const DataMatrix x(Matrix::Identity(4, 3));
    rkm::SolverConfig config;
    EXPECT_THROW(rkm::select_dimension(x, 1, 1, config), rkm::InvalidInput);
    EXPECT_THROW(rkm::select_dimension(x, 3, 3, config), rkm::InvalidInput);
    EXPECT_THROW(rkm::select_dimension(x, 3, 0, config), rkm::InvalidInput);
}

} // namespace
