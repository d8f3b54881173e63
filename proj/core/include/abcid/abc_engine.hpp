#pragma once

#include "abcid/series_models.hpp"
#include "abcid/summaries.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace abcid::abc {

enum class DistanceKind { euclidean, diag_variance_weighted, covariance_weighted, score_ols_ar2, lv_raw_path };

std::string_view to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(std::string_view name);

/// How two data sets are compared.
///
/// The first three kinds compare summary vectors. For the weighted kinds an
/// empty `scale` / `matrix` means "estimate from the simulated statistics of
/// the run". score_ols_ar2 compares series through the AR(2) criterion
/// gradient at the observed OLS estimate, weighted by `matrix` (identity when
/// empty). lv_raw_path is the mean summed squared path difference.
struct DistanceSpec {
    DistanceKind kind = DistanceKind::euclidean;
    std::vector<double> scale;  // per-component standard deviations
    std::vector<double> matrix; // row-major covariance or score weight

    static DistanceSpec euclidean() { return {}; }
    static DistanceSpec diag_variance_weighted(std::vector<double> sd = {});
    static DistanceSpec covariance_weighted(std::vector<double> covariance = {});
    static DistanceSpec score_ols_ar2(std::vector<double> omega = {});
    static DistanceSpec lv_raw_path();

    bool compares_statistics() const noexcept { return kind <= DistanceKind::covariance_weighted; }
};

/// Distance between two summary vectors. Weighted kinds need their scaling
/// data filled in. Throws DimensionError on length mismatch and DomainError
/// for a weight matrix that is not symmetric positive definite.
double compute_distance(const DistanceSpec& spec, std::span<const double> a, std::span<const double> b);

/// Series-level distance: lv_raw_path or score_ols_ar2 (`a` is the observed
/// series whose OLS estimate anchors the gradient).
double compute_distance(const DistanceSpec& spec, const TimeSeries& a, const TimeSeries& b);

/// (1/R) sum_j sum_i (y_j(t_i) - z_j(t_i))^2 over a bivariate pair.
double lv_raw_path_distance(const TimeSeries& y, const TimeSeries& z);

struct Tolerance {
    enum class Mode { absolute, quantile };
    Mode mode = Mode::quantile;
    double value = 0.01;

    static Tolerance absolute(double epsilon) { return {Mode::absolute, epsilon}; }
    static Tolerance quantile(double q) { return {Mode::quantile, q}; }
};

struct AbcConfig {
    std::size_t n_draws = 10000;
    Tolerance tolerance{};
    std::uint64_t seed = 0;
    unsigned workers = 1;

    /// Throws std::invalid_argument: N >= 1, eps >= 0, q in (0, 1).
    void validate() const;
};

/// What is matched: a statistic set under a statistic distance, or a
/// series-level distance with no statistics.
struct Discrepancy {
    std::optional<stats::StatisticSet> statistics;
    DistanceSpec distance;

    static Discrepancy on_statistics(stats::StatisticSet set, DistanceSpec spec = DistanceSpec::euclidean());
    static Discrepancy score(std::vector<double> omega = {});
    static Discrepancy lv_raw_path();
};

struct AcceptedDraw {
    ParameterVector theta;
    double distance = 0.0;
    std::size_t index = 0;
};

struct Posterior {
    std::vector<AcceptedDraw> accepted;
    double tolerance_used = 0.0;
    std::size_t n_proposed = 0;
    double acceptance_rate = 0.0;
    /// Set when an absolute tolerance admitted nothing.
    bool no_acceptances = false;
    /// Draws whose simulation broke down numerically; their distance is +inf.
    std::size_t simulation_failures = 0;

    std::size_t size() const noexcept { return accepted.size(); }
    bool empty() const noexcept { return accepted.empty(); }
    std::size_t dimension() const;
    /// Values of one parameter coordinate across accepted draws.
    std::vector<double> coordinate(std::size_t j) const;
};

/// Statistics of N simulated data sets, one row per draw.
struct StatisticMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<char> failed;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Prior draws 0..n-1 of the model under `seed`.
std::vector<ParameterVector> draw_proposals(const ModelSpec& model, std::size_t n, std::uint64_t seed);

/// Simulates draw i with stream i of `seed` and evaluates `set` on it.
StatisticMatrix simulate_statistics(const ModelSpec& model, std::span<const ParameterVector> thetas,
                                    const stats::StatisticSet& set, std::size_t length, std::uint64_t seed,
                                    unsigned workers);

/// Fills in data-driven scaling of a weighted statistic distance from the
/// successful rows of `sims` restricted to `columns` (all when empty).
DistanceSpec calibrate(const DistanceSpec& spec, const StatisticMatrix& sims, std::span<const std::size_t> columns = {});

/// Distance of each simulated row (restricted to `columns`) to `observed`;
/// failed rows get +inf.
std::vector<double> statistic_distances(const DistanceSpec& spec, std::span<const double> observed,
                                        const StatisticMatrix& sims, std::span<const std::size_t> columns = {});

/// The ceil(qN)-th smallest distance.
double select_quantile_tolerance(std::span<const double> distances, double q);

/// Accept/reject step. Quantile mode keeps exactly ceil(qN) draws, ordered by
/// (distance, index); absolute mode keeps every draw with distance <= eps.
/// Accepted draws are reported in draw-index order.
Posterior accept(std::span<const ParameterVector> thetas, std::span<const double> distances, const Tolerance& tolerance);

/// Rejection ABC: prior draw, simulate a series of the observed length,
/// compare, keep the close ones. Deterministic in (config.seed) and
/// independent of config.workers.
Posterior run_rejection_abc(const TimeSeries& observed, const ModelSpec& model, const Discrepancy& discrepancy,
                            const AbcConfig& config);

/// exp(-u^2 / eps^2): the Gaussian kernel divided by its value at zero.
double kernel_acceptance_probability(double u, double epsilon);

/// Kernel-accept ABC on a scalar statistic: draw i is kept with probability
/// kernel_acceptance_probability(eta(y) - eta(z_i), epsilon) using uniform
/// stream i. config.tolerance is ignored.
Posterior run_kernel_abc(const TimeSeries& observed, const ModelSpec& model, const stats::StatisticSet& statistic,
                         double epsilon, const AbcConfig& config);

struct KdeGrid {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t points = 512;
};

struct KdeEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

/// 1.06 * sd * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian-kernel density on a uniform grid (default min-3bw .. max+3bw),
/// normalised so its trapezoid integral over the grid is 1. Throws
/// DomainError for fewer than two samples or zero spread.
KdeEstimate kde(std::span<const double> samples, std::optional<KdeGrid> grid = std::nullopt);
KdeEstimate kde_marginal(const Posterior& posterior, std::size_t coordinate,
                         std::optional<KdeGrid> grid = std::nullopt);

double trapezoid(std::span<const double> x, std::span<const double> y);

struct PosteriorSummary {
    std::vector<double> mean;
    std::vector<double> std;
    /// Per-coordinate KDE argmax; absent when a KDE cannot be formed.
    std::optional<std::vector<double>> mode;
};

PosteriorSummary posterior_summaries(const Posterior& posterior);

/// Fraction of accepted draws with ||theta - theta0|| >= delta.
double concentration_probability(const Posterior& posterior, const ParameterVector& theta0, double delta);

/// `theta1,...,thetap,distance`
void write_posterior_csv(std::ostream& out, const Posterior& posterior);
/// `grid,density`
void write_kde_csv(std::ostream& out, const KdeEstimate& estimate);

} // namespace abcid::abc
