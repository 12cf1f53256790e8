#ifndef RKM_OBJECTIVE_HPP
#define RKM_OBJECTIVE_HPP

#include <limits>

#include "rkm/types.hpp"

namespace rkm {

/// (1/n) sum_i min_j ||x_i - A f_j||^2. Multiply by n for the sum form.
///
/// The nearest center is found in the subspace (||x - A f||^2 and
/// ||A^T x - f||^2 differ by a term independent of f); the residual is then
/// evaluated in the full space.
inline double rkm_objective(const DataMatrix &x, const LoadingMatrix &a, const CentroidSet &f) {
    detail::require_same_p(x, a);
    detail::require_same_q(a, f);
    const Matrix &xv = x.values();
    const Matrix y = xv * a.values();
    const Matrix &fv = f.values();
    const Matrix reconstructed = fv * a.values().transpose(); // k x p
    double total = 0.0;
    for (Index i = 0; i < x.n(); ++i) {
        Index nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < f.k(); ++j) {
            const double d = (y.row(i) - fv.row(j)).squaredNorm();
            if (d < best) {
                best = d;
                nearest = j;
            }
        }
        total += (xv.row(i) - reconstructed.row(nearest)).squaredNorm();
    }
    return total / static_cast<double>(x.n());
}

/// (1/n) ||X - U F A^T||_F^2 for a fixed assignment, evaluated directly.
inline double assigned_objective(const DataMatrix &x, const LoadingMatrix &a, const CentroidSet &f,
                                 const Assignment &u) {
    detail::require_same_p(x, a);
    detail::require_same_q(a, f);
    detail::require_labels(x, u);
    detail::require(u.k() <= f.k(), "assignment references more clusters than centroids");
    const Matrix reconstructed = f.values() * a.values().transpose(); // k x p
    double total = 0.0;
    for (Index i = 0; i < x.n(); ++i) {
        total += (x.row(i) - reconstructed.row(u[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total / static_cast<double>(x.n());
}

struct ObjectiveTerms {
    /// (1/n) ||X - X A A^T||_F^2, the PCA reconstruction part.
    double pca_term = 0.0;
    /// (1/n) ||X A - U F||_F^2, k-means in the subspace.
    double km_term = 0.0;

    double total() const { return pca_term + km_term; }
};

inline ObjectiveTerms decompose_objective(const DataMatrix &x, const LoadingMatrix &a, const CentroidSet &f,
                                          const Assignment &u) {
    detail::require_same_p(x, a);
    detail::require_same_q(a, f);
    detail::require_labels(x, u);
    detail::require(u.k() <= f.k(), "assignment references more clusters than centroids");
    const Matrix &xv = x.values();
    const Matrix &av = a.values();
    const Matrix y = xv * av;
    const double n = static_cast<double>(x.n());

    ObjectiveTerms terms;
    terms.pca_term = (xv - y * av.transpose()).squaredNorm() / n;
    double km = 0.0;
    for (Index i = 0; i < x.n(); ++i) {
        km += (y.row(i) - f.row(u[static_cast<std::size_t>(i)])).squaredNorm();
    }
    terms.km_term = km / n;
    return terms;
}

} // namespace rkm

#endif
