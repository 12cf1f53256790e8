#ifndef RKM_CONSISTENCY_HPP
#define RKM_CONSISTENCY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rkm/baselines.hpp"
#include "rkm/metrics.hpp"
#include "rkm/model_selection.hpp"
#include "rkm/parallel.hpp"
#include "rkm/rng.hpp"
#include "rkm/solver.hpp"
#include "rkm/synthetic.hpp"
#include "rkm/types.hpp"

namespace rkm {

/// Discrete distribution on m support points in R^p.
class PopulationSpec {
public:
    PopulationSpec(Matrix atoms, std::vector<double> weights) : atoms_(std::move(atoms)), weights_(std::move(weights)) {
        detail::require(atoms_.rows() >= 1 && atoms_.cols() >= 1, "population needs at least one atom");
        detail::require(atoms_.allFinite(), "population atoms must be finite");
        detail::require(static_cast<Index>(weights_.size()) == atoms_.rows(), "one weight per atom is required");
        double total = 0.0;
        for (double w : weights_) {
            detail::require(w >= 0.0 && std::isfinite(w), "population weights must be nonnegative");
            total += w;
        }
        detail::require(std::abs(total - 1.0) <= 1e-12, "population weights must sum to 1");
    }

    static PopulationSpec uniform(Matrix atoms) {
        const auto m = static_cast<std::size_t>(atoms.rows());
        return PopulationSpec(std::move(atoms), std::vector<double>(m, 1.0 / static_cast<double>(m)));
    }

    /// The four atoms (+-1, +-0.1) with equal weights.
    static PopulationSpec four_point() {
        Matrix atoms(4, 2);
        atoms << 1.0, 0.1, 1.0, -0.1, -1.0, 0.1, -1.0, -0.1;
        return uniform(std::move(atoms));
    }

    const Matrix &atoms() const { return atoms_; }
    const std::vector<double> &weights() const { return weights_; }
    Index m() const { return atoms_.rows(); }
    Index p() const { return atoms_.cols(); }

    Vector mean() const {
        Vector mu = Vector::Zero(p());
        for (Index i = 0; i < m(); ++i) {
            mu += weights_[static_cast<std::size_t>(i)] * atoms_.row(i).transpose();
        }
        return mu;
    }

    /// n i.i.d. draws by inversion of the cumulative weights.
    DataMatrix sample(Index n, SplitMix64 &rng) const {
        std::vector<double> cumulative(weights_.size());
        std::partial_sum(weights_.begin(), weights_.end(), cumulative.begin());
        Matrix out(n, p());
        for (Index i = 0; i < n; ++i) {
            const double u = rng.uniform() * cumulative.back();
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            auto atom = static_cast<Index>(std::min<std::ptrdiff_t>(it - cumulative.begin(), m() - 1));
            while (weights_[static_cast<std::size_t>(atom)] == 0.0 && atom > 0) {
                --atom;
            }
            out.row(i) = atoms_.row(atom);
        }
        return DataMatrix(std::move(out));
    }

private:
    Matrix atoms_;
    std::vector<double> weights_;
};

/// Weighted risk sum_i w_i min_j ||x_i - A f_j||^2 of a parameter.
inline double population_risk(const PopulationSpec &pop, const Parameter &theta) {
    detail::require(pop.p() == theta.loading.p(), "population and parameter differ in p");
    const Matrix reconstructed = theta.centroids.values() * theta.loading.values().transpose();
    const Matrix y = pop.atoms() * theta.loading.values();
    double total = 0.0;
    for (Index i = 0; i < pop.m(); ++i) {
        Index nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < theta.centroids.k(); ++j) {
            const double d = (y.row(i) - theta.centroids.row(j)).squaredNorm();
            if (d < best) {
                best = d;
                nearest = j;
            }
        }
        total += pop.weights()[static_cast<std::size_t>(i)] * (pop.atoms().row(i) - reconstructed.row(nearest)).squaredNorm();
    }
    return total;
}

/// Population analogue of vr_hat; nullopt when the projected variance is zero.
inline std::optional<double> population_vr(const PopulationSpec &pop, const Parameter &theta) {
    const Matrix y = pop.atoms() * theta.loading.values();
    const Eigen::RowVectorXd center = (pop.mean().transpose() * theta.loading.values());
    double within = 0.0;
    double total = 0.0;
    for (Index i = 0; i < pop.m(); ++i) {
        const double w = pop.weights()[static_cast<std::size_t>(i)];
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < theta.centroids.k(); ++j) {
            best = std::min(best, (y.row(i) - theta.centroids.row(j)).squaredNorm());
        }
        within += w * best;
        total += w * (y.row(i) - center).squaredNorm();
    }
    if (!(total > 0.0)) {
        return std::nullopt;
    }
    return within / total;
}

struct OracleResult {
    double loss = 0.0;
    LoadingMatrix loading;
    CentroidSet centroids;
    /// Angle of the winning direction in [0, pi).
    double angle = 0.0;
    /// Certified bound on loss - (true global minimum).
    double grid_gap = 0.0;

    Parameter parameter() const { return Parameter{centroids, loading}; }
};

inline constexpr int default_oracle_grid = 2000;

namespace detail {

inline OracleResult oracle_search(const Matrix &points, std::vector<double> weights, int k, int grid_size) {
    require(points.cols() == 2, "the global-minimum oracle only supports p = 2 (and q = 1)");
    require(grid_size >= 1, "oracle grid size must be positive");
    // Zero-weight points contribute nothing; drop them.
    std::vector<Index> support;
    double total = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        if (weights[static_cast<std::size_t>(i)] > 0.0) {
            support.push_back(i);
            total += weights[static_cast<std::size_t>(i)];
        }
    }
    require(k >= 1 && k <= static_cast<int>(support.size()), "oracle needs 1 <= k <= number of support points");

    double radius2 = 0.0;
    for (Index i : support) {
        radius2 = std::max(radius2, points.row(i).squaredNorm());
    }

    const std::size_t m = support.size();
    std::vector<double> t(m), orth(m), sorted_t(m), sorted_w(m);
    std::vector<std::size_t> order(m);
    double best_loss = std::numeric_limits<double>::infinity();
    double best_angle = 0.0;
    Matrix best_centers;
    for (int g = 0; g < grid_size; ++g) {
        const double angle = std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid_size);
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        double residual = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const Index i = support[r];
            t[r] = c * points(i, 0) + s * points(i, 1);
            const double perp = -s * points(i, 0) + c * points(i, 1);
            residual += weights[static_cast<std::size_t>(i)] * perp * perp;
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
        for (std::size_t r = 0; r < m; ++r) {
            sorted_t[r] = t[order[r]];
            sorted_w[r] = weights[static_cast<std::size_t>(support[order[r]])] / total;
        }
        const KmeansSolution line = kmeans_1d_exact_weighted(sorted_t, sorted_w, k);
        const double loss = residual / total + line.loss;
        if (loss < best_loss) {
            best_loss = loss;
            best_angle = angle;
            best_centers = line.centers;
        }
    }

    Matrix direction(2, 1);
    direction << std::cos(best_angle), std::sin(best_angle);
    const double lipschitz = 4.0 * radius2;
    return OracleResult{best_loss, LoadingMatrix(direction), CentroidSet(best_centers), best_angle,
                        lipschitz * std::numbers::pi / static_cast<double>(grid_size)};
}

} // namespace detail

/**
 * Near-global RKM optimum for p = 2, q = 1. For each of grid_size
 * directions (cos t, sin t), t in [0, pi), the remaining problem is 1-D
 * k-means on the projections, solved exactly; the best direction wins.
 * The loss as a function of t is 4 R^2 Lipschitz (R the largest norm), so
 * grid_gap = 4 R^2 pi / grid_size bounds the distance to the true optimum.
 */
inline OracleResult oracle_global_min(const DataMatrix &x, int k, int grid_size = default_oracle_grid) {
    return detail::oracle_search(x.values(), std::vector<double>(static_cast<std::size_t>(x.n()), 1.0), k,
                                 grid_size);
}

inline OracleResult oracle_global_min(const PopulationSpec &pop, int k, int grid_size = default_oracle_grid) {
    return detail::oracle_search(pop.atoms(), pop.weights(), k, grid_size);
}

/// Oracle losses m_1(P), ..., m_k(P); consistency runs require them to be
/// strictly decreasing.
inline std::vector<double> oracle_loss_profile(const PopulationSpec &pop, int k, int grid_size = default_oracle_grid) {
    std::vector<double> losses;
    for (int j = 1; j <= k; ++j) {
        losses.push_back(oracle_global_min(pop, j, grid_size).loss);
    }
    return losses;
}

inline bool strictly_decreasing(const std::vector<double> &values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] < values[i - 1])) {
            return false;
        }
    }
    return true;
}

/// Type-7 (linear interpolation) sample quantile.
inline double quantile(std::vector<double> values, double prob) {
    detail::require(!values.empty(), "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;

    double iqr() const { return q3 - q1; }

    static Quartiles of(const std::vector<double> &values) {
        return Quartiles{quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75)};
    }
};

struct ReplicationRecord {
    Index n = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    /// m_k(P_n): fitted in-sample loss.
    double loss = 0.0;
    /// Aligned product distance from the fit to the reference optimum.
    double distance = 0.0;
    /// Risk of the fitted parameter under the population.
    double population_risk = 0.0;
    /// VR-hat(q); empty when the projected sample variance is zero.
    std::optional<double> vr;
};

struct SampleSizeSummary {
    Index n = 0;
    Quartiles loss;
    Quartiles distance;
    Quartiles abs_loss_error;
    std::optional<Quartiles> vr;
};

struct ConvergenceReport {
    int k = 0;
    Index q = 0;
    std::vector<Index> n_grid;
    int reps = 0;
    /// m_k(P) of the reference optimum.
    double reference_loss = 0.0;
    /// VR(q | P) at the reference optimum.
    std::optional<double> reference_vr;
    /// "oracle" when certified by oracle_global_min, "analytic" when supplied.
    std::string reference_kind;
    double grid_gap = 0.0;
    std::vector<ReplicationRecord> records;
    std::vector<SampleSizeSummary> summaries;
};

struct ConsistencyOptions {
    int oracle_grid = default_oracle_grid;
    /// Reference optimum; required unless p = 2 and q = 1.
    std::optional<Parameter> reference;
};

/**
 * For every n in n_grid and every replication, samples n objects from pop,
 * fits RKM and records the fitted loss, the aligned distance to the
 * reference optimum, the population risk of the fit and VR-hat(q).
 * Replication (i, r) uses data stream derive_seed(seed, {i, r, 0}) and
 * solver seed derive_seed(seed, {i, r, 1}); records are ordered by (n, rep).
 */
inline ConvergenceReport consistency_experiment(const PopulationSpec &pop, int k, Index q,
                                                const std::vector<Index> &n_grid, int reps, SolverConfig config,
                                                const ConsistencyOptions &options = {}) {
    detail::require(!n_grid.empty(), "n_grid must not be empty");
    detail::require(reps >= 1, "reps must be >= 1");
    detail::require(q >= 1 && q <= pop.p(), "consistency experiment needs 1 <= q <= p");
    for (Index n : n_grid) {
        detail::require(n >= k, "every sample size must be at least k");
    }

    ConvergenceReport report;
    report.k = k;
    report.q = q;
    report.n_grid = n_grid;
    report.reps = reps;

    std::optional<Parameter> reference = options.reference;
    if (reference) {
        report.reference_kind = "analytic";
        report.reference_loss = population_risk(pop, *reference);
    } else {
        detail::require(pop.p() == 2 && q == 1,
                        "no reference optimum given and the oracle only covers p = 2, q = 1");
        const auto profile = oracle_loss_profile(pop, k, options.oracle_grid);
        if (!strictly_decreasing(profile)) {
            throw InvalidInput("population fails the distinctness check m_1 > ... > m_k");
        }
        const OracleResult oracle = oracle_global_min(pop, k, options.oracle_grid);
        reference = oracle.parameter();
        report.reference_kind = "oracle";
        report.reference_loss = oracle.loss;
        report.grid_gap = oracle.grid_gap;
    }
    report.reference_vr = population_vr(pop, *reference);

    config.k = k;
    config.q = q;
    const std::size_t per_n = static_cast<std::size_t>(reps);
    report.records.resize(n_grid.size() * per_n);
    parallel_for(report.records.size(), [&](std::size_t task) {
        const std::size_t n_index = task / per_n;
        const int rep = static_cast<int>(task % per_n);
        SplitMix64 data_rng(derive_seed(config.seed, {n_index, static_cast<std::uint64_t>(rep), 0}));
        const DataMatrix sample = pop.sample(n_grid[n_index], data_rng);
        SolverConfig local = config;
        local.seed = derive_seed(config.seed, {n_index, static_cast<std::uint64_t>(rep), 1});
        const RkmSolution fit = fit_rkm(sample, local);
        const Parameter fitted{fit.centroids, fit.loading};

        ReplicationRecord record;
        record.n = n_grid[n_index];
        record.rep = rep;
        record.seed = local.seed;
        record.loss = fit.loss;
        record.distance = param_distance(fitted, *reference, true);
        record.population_risk = population_risk(pop, fitted);
        try {
            record.vr = vr_hat(sample, fit);
        } catch (const DegenerateData &) {
            record.vr.reset();
        }
        report.records[task] = record;
    });

    for (std::size_t n_index = 0; n_index < n_grid.size(); ++n_index) {
        std::vector<double> losses, distances, errors, vrs;
        for (std::size_t r = 0; r < per_n; ++r) {
            const auto &record = report.records[n_index * per_n + r];
            losses.push_back(record.loss);
            distances.push_back(record.distance);
            errors.push_back(std::abs(record.loss - report.reference_loss));
            if (record.vr) {
                vrs.push_back(*record.vr);
            }
        }
        SampleSizeSummary summary;
        summary.n = n_grid[n_index];
        summary.loss = Quartiles::of(losses);
        summary.distance = Quartiles::of(distances);
        summary.abs_loss_error = Quartiles::of(errors);
        if (!vrs.empty()) {
            summary.vr = Quartiles::of(vrs);
        }
        report.summaries.push_back(summary);
    }
    return report;
}

/// Same replications as consistency_experiment, for studying VR-hat(q)
/// against VR(q | P). Rejects populations where VR(q | P) is undefined.
inline ConvergenceReport vr_consistency_experiment(const PopulationSpec &pop, int k, Index q,
                                                   const std::vector<Index> &n_grid, int reps, SolverConfig config,
                                                   const ConsistencyOptions &options = {}) {
    ConvergenceReport report = consistency_experiment(pop, k, q, n_grid, reps, config, options);
    if (!report.reference_vr) {
        throw DegenerateData("VR(q | P) is undefined: the population has zero projected variance");
    }
    return report;
}

struct AgreementSetting {
    std::string name;
    Index q_true = 2;
    Index p1 = 5;
    Index p2 = 5;
    Index p3 = 5;
};

inline std::vector<AgreementSetting> table1_settings() {
    return {{"table1-q2p5", 2, 5, 5, 5},
            {"table1-q2p10", 2, 10, 10, 10},
            {"table1-q3p5", 3, 5, 5, 5},
            {"table1-q3p10", 3, 10, 10, 10}};
}

struct AgreementRecord {
    std::size_t setting = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    int q_hat = 0;
    int q_star = 0;
    std::vector<double> ari;
    std::vector<double> vr;
    std::vector<double> delta2;
};

struct AgreementRow {
    AgreementSetting setting;
    int reps = 0;
    int agreements = 0;

    double rate() const { return reps > 0 ? static_cast<double>(agreements) / static_cast<double>(reps) : 0.0; }
};

struct AgreementTable {
    std::vector<AgreementRow> rows;
    std::vector<AgreementRecord> records;
};

/**
 * Per replication: generate a dataset for the setting, standardize it, run
 * the dimension selector over q = 1..min(K-1, p), score every fit by ARI
 * against the true labels, and count agreement of q-hat with the
 * ARI-optimal q* (ties to the smallest q). The same fit at each q feeds
 * both VR-hat and ARI. Replication (s, r) uses dataset seed
 * derive_seed(seed, {s, r, 0}) and selector seed derive_seed(seed, {s, r, 1}).
 */
inline AgreementTable agreement_experiment(const std::vector<AgreementSetting> &settings, int reps, Index n,
                                           int clusters, SolverConfig config, SelectorOptions selector = {}) {
    detail::require(!settings.empty(), "at least one setting is required");
    detail::require(reps >= 1, "reps must be >= 1");
    AgreementTable table;
    const auto per_setting = static_cast<std::size_t>(reps);
    table.records.resize(settings.size() * per_setting);
    parallel_for(table.records.size(), [&](std::size_t task) {
        const std::size_t s = task / per_setting;
        const int rep = static_cast<int>(task % per_setting);
        DatasetSpec spec;
        spec.clusters = clusters;
        spec.q = settings[s].q_true;
        spec.p1 = settings[s].p1;
        spec.p2 = settings[s].p2;
        spec.p3 = settings[s].p3;
        spec.n = n;
        spec.seed = derive_seed(config.seed, {s, static_cast<std::uint64_t>(rep), 0});
        const GeneratedDataset data = generate_dataset(spec);

        SolverConfig local = config;
        local.seed = derive_seed(config.seed, {s, static_cast<std::uint64_t>(rep), 1});
        const int q_max = max_profile_dimension(clusters, spec.p());
        const VrProfile profile = select_dimension(data.z, clusters, q_max, local, selector);

        AgreementRecord record;
        record.setting = s;
        record.rep = rep;
        record.seed = spec.seed;
        for (const auto &fit : profile.fits) {
            record.ari.push_back(adjusted_rand_index(fit.assignment, data.labels));
        }
        record.q_hat = profile.q_hat;
        record.q_star = argmax_dimension(record.ari);
        record.vr = profile.vr;
        record.delta2 = profile.delta2;
        table.records[task] = std::move(record);
    });
    for (std::size_t s = 0; s < settings.size(); ++s) {
        AgreementRow row{settings[s], reps, 0};
        for (std::size_t r = 0; r < per_setting; ++r) {
            const auto &record = table.records[s * per_setting + r];
            row.agreements += record.q_hat == record.q_star ? 1 : 0;
        }
        table.rows.push_back(row);
    }
    return table;
}

struct RateBound {
    /// min(1, raw).
    double bound = 1.0;
    /// 8 (2n)^{k(p+1)} exp(-n eps^2 / (512 B^2)); may overflow to infinity.
    double raw = 0.0;
    double log_raw = 0.0;
};

/**
 * Finite-sample deviation bound on P(|m_k(P_n) - m_k(P)| >= eps) for
 * populations supported in ||x||^2 <= B. Valid when n (eps / 8B)^2 >= 2.
 */
inline RateBound rate_bound(double n, int k, int p, double radius_bound, double epsilon) {
    detail::require(n >= 1 && k >= 1 && p >= 1, "rate bound needs n, k, p >= 1");
    detail::require(radius_bound > 0.0 && epsilon > 0.0, "rate bound needs B > 0 and epsilon > 0");
    const double ratio = epsilon / (8.0 * radius_bound);
    const double condition = n * ratio * ratio;
    if (!(condition >= 2.0)) {
        throw InvalidInput("rate bound precondition n (eps / 8B)^2 >= 2 violated: value is " +
                           std::to_string(condition));
    }
    RateBound out;
    out.log_raw = std::log(8.0) + static_cast<double>(k) * static_cast<double>(p + 1) * std::log(2.0 * n) -
                  n * epsilon * epsilon / (512.0 * radius_bound * radius_bound);
    const double direct = 8.0 * std::pow(2.0 * n, static_cast<double>(k) * static_cast<double>(p + 1)) *
                          std::exp(-n * epsilon * epsilon / (512.0 * radius_bound * radius_bound));
    out.raw = std::isfinite(direct) && direct > 0.0 ? direct : std::exp(out.log_raw);
    out.bound = out.log_raw >= 0.0 ? 1.0 : std::min(1.0, out.raw);
    return out;
}

} // namespace rkm

#endif
