#ifndef RKM_LINALG_HPP
#define RKM_LINALG_HPP

#include <cstdint>

#include "rkm/rng.hpp"
#include "rkm/types.hpp"

namespace rkm {

/// Matrix of independent standard normal entries drawn from rng, filled
/// column-major.
inline Matrix gaussian_matrix(Index rows, Index cols, SplitMix64 &rng) {
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) {
            m(r, c) = rng.normal();
        }
    }
    return m;
}

/// Appends columns to `basis` (p x r, orthonormal) until it has `target`
/// orthonormal columns. New directions come from Gaussian draws keyed by
/// `seed`, orthogonalised by two passes of modified Gram-Schmidt.
inline Matrix complete_orthonormal(const Matrix &basis, Index target, std::uint64_t seed) {
    const Index p = basis.rows();
    detail::require(target <= p, "cannot complete more than p orthonormal columns");
    Matrix out(p, target);
    out.leftCols(basis.cols()) = basis;
    SplitMix64 rng(derive_seed(seed, {0x636f6d70ULL}));
    Index filled = basis.cols();
    while (filled < target) {
        Vector v(p);
        for (Index r = 0; r < p; ++r) {
            v(r) = rng.normal();
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (Index c = 0; c < filled; ++c) {
                v -= out.col(c).dot(v) * out.col(c);
            }
        }
        const double norm = v.norm();
        if (norm > 1e-8) {
            out.col(filled++) = v / norm;
        }
    }
    return out;
}

/**
 * Orthonormal polar factor of the tall matrix m (p x q, p >= q): the
 * column-orthonormal A maximizing trace(A^T m). With m = P S Q^T this is
 * P Q^T. When m is rank deficient the left singular vectors belonging to
 * (numerically) zero singular values are replaced by a seeded orthonormal
 * completion, so the result is always well defined.
 */
inline Matrix polar_factor(const Matrix &m, std::uint64_t seed = 0) {
    detail::require(m.rows() >= m.cols(), "polar factor needs rows >= cols");
    const Index q = m.cols();
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector &sigma = svd.singularValues();
    const double scale = sigma.size() > 0 ? sigma(0) : 0.0;
    const double cutoff = scale * static_cast<double>(m.rows()) * 1e-13;
    Index rank = 0;
    while (rank < q && sigma(rank) > cutoff && sigma(rank) > 0.0) {
        ++rank;
    }
    Matrix left = svd.matrixU();
    if (rank < q) {
        left = complete_orthonormal(svd.matrixU().leftCols(rank), q, seed);
    }
    return left * svd.matrixV().transpose();
}

/// Polar factor of a Gaussian p x q matrix: a rotation-invariant random frame.
inline Matrix random_orthonormal(Index p, Index q, SplitMix64 &rng) {
    return polar_factor(gaussian_matrix(p, q, rng), rng());
}

} // namespace rkm

#endif
