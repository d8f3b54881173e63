#include "abcid/abc_engine.hpp"

#include "abcid/error.hpp"
#include "abcid/parallel.hpp"
#include "abcid/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace abcid::abc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Matrix = Eigen::MatrixXd;

Matrix square_from(const std::vector<double>& flat, std::size_t dim, const char* what) {
    if (flat.size() != dim * dim) {
        throw DimensionError(std::string(what) + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * dim + j];
        }
    }
    return m;
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
Matrix cholesky_lower(const Matrix& m, const char* what) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DomainError(std::string(what) + " is not symmetric");
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DomainError(std::string(what) + " is not positive definite");
    }
    const Matrix lower = llt.matrixL();
    if (lower.diagonal().minCoeff() <= 0.0) {
        throw DomainError(std::string(what) + " is not positive definite");
    }
    return lower;
}

/// A distance with its matrix work done once.
class PreparedMetric {
public:
    PreparedMetric(const DistanceSpec& spec, std::size_t dim) : kind_(spec.kind), dim_(dim) {
        switch (kind_) {
        case DistanceKind::euclidean: break;
        case DistanceKind::diag_variance_weighted:
            if (spec.scale.size() != dim) {
                throw DimensionError("diagonal scaling needs one standard deviation per component");
            }
            inv_scale_.resize(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                if (!(spec.scale[i] > 0.0) || !std::isfinite(spec.scale[i])) {
                    throw DomainError("diagonal scaling needs strictly positive standard deviations");
                }
                inv_scale_[i] = 1.0 / spec.scale[i];
            }
            break;
        case DistanceKind::covariance_weighted: {
            const Matrix lower = cholesky_lower(square_from(spec.matrix, dim, "covariance matrix"), "covariance matrix");
            transform_ = lower.triangularView<Eigen::Lower>().solve(Matrix::Identity(lower.rows(), lower.cols()));
            break;
        }
        case DistanceKind::score_ols_ar2: {
            const std::vector<double> omega = spec.matrix.empty() ? std::vector<double>{1.0, 0.0, 0.0, 1.0} : spec.matrix;
            transform_ = cholesky_lower(square_from(omega, 2, "score weight matrix"), "score weight matrix").transpose();
            break;
        }
        case DistanceKind::lv_raw_path: break;
        }
    }

    double operator()(std::span<const double> a, std::span<const double> b) const {
        if (a.size() != b.size() || a.size() != dim_) {
            throw DimensionError("distance operands have mismatched dimensions");
        }
        switch (kind_) {
        case DistanceKind::euclidean:
        case DistanceKind::lv_raw_path: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                const double d = a[i] - b[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case DistanceKind::diag_variance_weighted: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                const double d = (a[i] - b[i]) * inv_scale_[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case DistanceKind::covariance_weighted:
        case DistanceKind::score_ols_ar2: {
            Eigen::VectorXd diff(static_cast<Eigen::Index>(dim_));
            for (std::size_t i = 0; i < dim_; ++i) diff(static_cast<Eigen::Index>(i)) = a[i] - b[i];
            return (transform_ * diff).norm();
        }
        }
        return kInf;
    }

private:
    DistanceKind kind_;
    std::size_t dim_;
    std::vector<double> inv_scale_;
    Matrix transform_;
};

/// Score distance with beta-hat(y) fixed.
class ScoreDistance {
public:
    ScoreDistance(const DistanceSpec& spec, const TimeSeries& observed)
        : metric_(spec, 2), beta_(stats::ols_ar2_estimate(observed.values()).beta) {}

    double operator()(const TimeSeries& simulated) const {
        const auto g = stats::ols_ar2_criterion_gradient(simulated.values(), beta_);
        const std::array<double, 2> zero{0.0, 0.0};
        return metric_(g, zero);
    }

private:
    PreparedMetric metric_;
    std::array<double, 2> beta_;
};

std::size_t quantile_count(double q, std::size_t n) {
    const double raw = q * static_cast<double>(n);
    // Guard against q*N landing a hair above an integer through rounding.
    const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::clamp<std::size_t>(k, 1, n);
}

} // namespace

std::string_view to_string(DistanceKind kind) {
    switch (kind) {
    case DistanceKind::euclidean: return "euclidean";
    case DistanceKind::diag_variance_weighted: return "diag_variance_weighted";
    case DistanceKind::covariance_weighted: return "covariance_weighted";
    case DistanceKind::score_ols_ar2: return "score_ols_ar2";
    case DistanceKind::lv_raw_path: return "lv_raw_path";
    }
    return "unknown";
}

DistanceKind distance_kind_from_string(std::string_view name) {
    for (auto k : {DistanceKind::euclidean, DistanceKind::diag_variance_weighted, DistanceKind::covariance_weighted,
                   DistanceKind::score_ols_ar2, DistanceKind::lv_raw_path}) {
        if (to_string(k) == name) return k;
    }
    if (name == "diag") return DistanceKind::diag_variance_weighted;
    if (name == "covariance") return DistanceKind::covariance_weighted;
    if (name == "score") return DistanceKind::score_ols_ar2;
    throw std::invalid_argument("unknown distance '" + std::string(name) + "'");
}

DistanceSpec DistanceSpec::diag_variance_weighted(std::vector<double> sd) {
    return {DistanceKind::diag_variance_weighted, std::move(sd), {}};
}

DistanceSpec DistanceSpec::covariance_weighted(std::vector<double> covariance) {
    return {DistanceKind::covariance_weighted, {}, std::move(covariance)};
}

DistanceSpec DistanceSpec::score_ols_ar2(std::vector<double> omega) {
    return {DistanceKind::score_ols_ar2, {}, std::move(omega)};
}

DistanceSpec DistanceSpec::lv_raw_path() { return {DistanceKind::lv_raw_path, {}, {}}; }

double compute_distance(const DistanceSpec& spec, std::span<const double> a, std::span<const double> b) {
    if (!spec.compares_statistics()) {
        throw std::invalid_argument(std::string(to_string(spec.kind)) + " compares series, not summary vectors");
    }
    if (a.size() != b.size()) {
        throw DimensionError("distance operands have mismatched dimensions");
    }
    return PreparedMetric(spec, a.size())(a, b);
}

double lv_raw_path_distance(const TimeSeries& y, const TimeSeries& z) {
    if (y.dimension() != 2 || z.dimension() != 2 || y.length() != z.length()) {
        throw DimensionError("raw path distance needs two bivariate series of equal length");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        const auto a = y.coordinate(j);
        const auto b = z.coordinate(j);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
    }
    return s / static_cast<double>(y.length());
}

double compute_distance(const DistanceSpec& spec, const TimeSeries& a, const TimeSeries& b) {
    switch (spec.kind) {
    case DistanceKind::lv_raw_path: return lv_raw_path_distance(a, b);
    case DistanceKind::score_ols_ar2: return ScoreDistance(spec, a)(b);
    default: throw std::invalid_argument(std::string(to_string(spec.kind)) + " compares summary vectors, not series");
    }
}

void AbcConfig::validate() const {
    if (n_draws < 1) {
        throw std::invalid_argument("ABC needs at least one draw");
    }
    if (tolerance.mode == Tolerance::Mode::absolute) {
        if (!(tolerance.value >= 0.0)) {
            throw std::invalid_argument("absolute tolerance must be >= 0");
        }
    } else if (!(tolerance.value > 0.0 && tolerance.value < 1.0)) {
        throw std::invalid_argument("quantile tolerance must lie strictly inside (0, 1)");
    }
}

Discrepancy Discrepancy::on_statistics(stats::StatisticSet set, DistanceSpec spec) {
    if (!spec.compares_statistics()) {
        throw std::invalid_argument("statistic matching needs a statistic distance");
    }
    return {std::move(set), std::move(spec)};
}

Discrepancy Discrepancy::score(std::vector<double> omega) {
    return {std::nullopt, DistanceSpec::score_ols_ar2(std::move(omega))};
}

Discrepancy Discrepancy::lv_raw_path() { return {std::nullopt, DistanceSpec::lv_raw_path()}; }

std::size_t Posterior::dimension() const { return accepted.empty() ? 0 : accepted.front().theta.size(); }

std::vector<double> Posterior::coordinate(std::size_t j) const {
    std::vector<double> out;
    out.reserve(accepted.size());
    for (const auto& a : accepted) {
        out.push_back(a.theta[j]);
    }
    return out;
}

std::vector<ParameterVector> draw_proposals(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
    std::vector<ParameterVector> thetas(n);
    for (std::size_t i = 0; i < n; ++i) {
        thetas[i] = draw_prior(model.model, seed, i, model.prior).theta;
    }
    return thetas;
}

StatisticMatrix simulate_statistics(const ModelSpec& model, std::span<const ParameterVector> thetas,
                                    const stats::StatisticSet& set, std::size_t length, std::uint64_t seed,
                                    unsigned workers) {
    StatisticMatrix m;
    m.rows = thetas.size();
    m.cols = set.dimension();
    m.data.assign(m.rows * m.cols, 0.0);
    m.failed.assign(m.rows, 0);
    parallel_for(m.rows, workers, [&](std::size_t i) {
        std::span<double> out(m.data.data() + i * m.cols, m.cols);
        try {
            const TimeSeries z = model.simulate(thetas[i], length, seed, i);
            stats::evaluate_into(set, z, out);
        } catch (const NumericError&) {
            m.failed[i] = 1;
            std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
        }
    });
    return m;
}

DistanceSpec calibrate(const DistanceSpec& spec, const StatisticMatrix& sims, std::span<const std::size_t> columns) {
    std::vector<std::size_t> cols(columns.begin(), columns.end());
    if (cols.empty()) {
        cols.resize(sims.cols);
        std::iota(cols.begin(), cols.end(), 0);
    }
    const std::size_t d = cols.size();
    const bool need_scale = spec.kind == DistanceKind::diag_variance_weighted && spec.scale.empty();
    const bool need_cov = spec.kind == DistanceKind::covariance_weighted && spec.matrix.empty();
    if (!need_scale && !need_cov) {
        return spec;
    }
    std::vector<double> mean(d, 0.0);
    std::vector<double> cov(d * d, 0.0);
    std::size_t n = 0;
    for (std::size_t r = 0; r < sims.rows; ++r) {
        if (sims.failed[r]) continue;
        ++n;
        const auto row = sims.row(r);
        // Welford update of mean and co-moment.
        std::vector<double> delta(d);
        for (std::size_t i = 0; i < d; ++i) {
            delta[i] = row[cols[i]] - mean[i];
            mean[i] += delta[i] / static_cast<double>(n);
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                cov[i * d + j] += delta[i] * (row[cols[j]] - mean[j]);
            }
        }
    }
    if (n < 2) {
        throw DomainError("too few successful simulations to estimate distance scaling");
    }
    for (auto& c : cov) c /= static_cast<double>(n - 1);
    DistanceSpec out = spec;
    if (need_scale) {
        out.scale.resize(d);
        for (std::size_t i = 0; i < d; ++i) out.scale[i] = std::sqrt(cov[i * d + i]);
    } else {
        // Symmetrise exactly; the accumulation order can leave 1-ulp asymmetry.
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                const double v = 0.5 * (cov[i * d + j] + cov[j * d + i]);
                cov[i * d + j] = cov[j * d + i] = v;
            }
        }
        out.matrix = std::move(cov);
    }
    return out;
}

std::vector<double> statistic_distances(const DistanceSpec& spec, std::span<const double> observed,
                                        const StatisticMatrix& sims, std::span<const std::size_t> columns) {
    std::vector<std::size_t> cols(columns.begin(), columns.end());
    if (cols.empty()) {
        cols.resize(sims.cols);
        std::iota(cols.begin(), cols.end(), 0);
    }
    if (observed.size() != cols.size()) {
        throw DimensionError("observed statistics do not match the selected columns");
    }
    const PreparedMetric metric(spec, cols.size());
    std::vector<double> out(sims.rows, kInf);
    std::vector<double> buf(cols.size());
    for (std::size_t r = 0; r < sims.rows; ++r) {
        if (sims.failed[r]) continue;
        const auto row = sims.row(r);
        for (std::size_t i = 0; i < cols.size(); ++i) buf[i] = row[cols[i]];
        out[r] = metric(observed, buf);
    }
    return out;
}

double select_quantile_tolerance(std::span<const double> distances, double q) {
    if (distances.empty()) {
        throw std::invalid_argument("quantile of an empty distance list");
    }
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("quantile must lie strictly inside (0, 1)");
    }
    std::vector<double> sorted(distances.begin(), distances.end());
    const std::size_t k = quantile_count(q, sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    return sorted[k - 1];
}

Posterior accept(std::span<const ParameterVector> thetas, std::span<const double> distances, const Tolerance& tolerance) {
    if (thetas.size() != distances.size()) {
        throw DimensionError("one distance per proposal is required");
    }
    const std::size_t n = thetas.size();
    Posterior post;
    post.n_proposed = n;
    for (double d : distances) {
        if (std::isinf(d)) ++post.simulation_failures;
    }
    std::vector<std::size_t> keep;
    if (tolerance.mode == Tolerance::Mode::quantile) {
        if (n == 0) {
            throw std::invalid_argument("quantile acceptance needs at least one proposal");
        }
        const std::size_t k = quantile_count(tolerance.value, n);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        const auto before = [&](std::size_t a, std::size_t b) {
            return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
        };
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
        keep.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(keep.begin(), keep.end());
        post.tolerance_used = distances[order[k - 1]];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (distances[i] <= tolerance.value) keep.push_back(i);
        }
        post.tolerance_used = tolerance.value;
    }
    post.accepted.reserve(keep.size());
    for (std::size_t i : keep) {
        post.accepted.push_back({thetas[i], distances[i], i});
    }
    post.acceptance_rate = n == 0 ? 0.0 : static_cast<double>(keep.size()) / static_cast<double>(n);
    post.no_acceptances = post.accepted.empty();
    return post;
}

namespace {

void check_observed_length(const TimeSeries& observed, const ModelSpec& model) {
    if (model.model == Model::lv && observed.length() != model.lv.n_points) {
        throw DimensionError("observed LV series length differs from the configured number of observation points");
    }
}

} // namespace

Posterior run_rejection_abc(const TimeSeries& observed, const ModelSpec& model, const Discrepancy& discrepancy,
                            const AbcConfig& config) {
    config.validate();
    check_observed_length(observed, model);
    const auto thetas = draw_proposals(model, config.n_draws, config.seed);
    const std::size_t T = observed.length();

    std::vector<double> distances;
    if (discrepancy.distance.compares_statistics()) {
        if (!discrepancy.statistics) {
            throw std::invalid_argument("statistic distance without a statistic set");
        }
        const auto& set = *discrepancy.statistics;
        const auto obs = stats::evaluate_statistic_set(set, observed);
        const auto sims = simulate_statistics(model, thetas, set, T, config.seed, config.workers);
        distances = statistic_distances(calibrate(discrepancy.distance, sims), obs.values, sims);
    } else {
        distances.assign(thetas.size(), kInf);
        if (discrepancy.distance.kind == DistanceKind::score_ols_ar2) {
            const ScoreDistance score(discrepancy.distance, observed);
            parallel_for(thetas.size(), config.workers, [&](std::size_t i) {
                try {
                    distances[i] = score(model.simulate(thetas[i], T, config.seed, i));
                } catch (const NumericError&) {
                }
            });
        } else {
            parallel_for(thetas.size(), config.workers, [&](std::size_t i) {
                try {
                    distances[i] = lv_raw_path_distance(observed, model.simulate(thetas[i], T, config.seed, i));
                } catch (const NumericError&) {
                }
            });
        }
    }
    return accept(thetas, distances, config.tolerance);
}

double kernel_acceptance_probability(double u, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be > 0");
    }
    return std::exp(-(u * u) / (epsilon * epsilon));
}

Posterior run_kernel_abc(const TimeSeries& observed, const ModelSpec& model, const stats::StatisticSet& statistic,
                         double epsilon, const AbcConfig& config) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be > 0");
    }
    if (statistic.dimension() != 1) {
        throw DimensionError("kernel ABC needs a scalar statistic");
    }
    if (config.n_draws < 1) {
        throw std::invalid_argument("ABC needs at least one draw");
    }
    check_observed_length(observed, model);
    const auto thetas = draw_proposals(model, config.n_draws, config.seed);
    const double obs = stats::evaluate_statistic_set(statistic, observed).values[0];
    const auto sims = simulate_statistics(model, thetas, statistic, observed.length(), config.seed, config.workers);

    Posterior post;
    post.n_proposed = thetas.size();
    post.tolerance_used = epsilon;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        if (sims.failed[i]) {
            ++post.simulation_failures;
            continue;
        }
        const double u = obs - sims.row(i)[0];
        rng::Stream coin(config.seed, rng::Purpose::accept, i);
        if (coin.uniform() < kernel_acceptance_probability(u, epsilon)) {
            post.accepted.push_back({thetas[i], std::abs(u), i});
        }
    }
    post.acceptance_rate = static_cast<double>(post.accepted.size()) / static_cast<double>(post.n_proposed);
    post.no_acceptances = post.accepted.empty();
    return post;
}

// ---------------------------------------------------------------------------
// Density estimation and summaries

double silverman_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) {
        throw DomainError("bandwidth needs at least two samples");
    }
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("trapezoid rule needs matching abscissae and ordinates");
    }
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    return s;
}

KdeEstimate kde(std::span<const double> samples, std::optional<KdeGrid> grid) {
    const double bw = silverman_bandwidth(samples);
    if (!(bw > 0.0)) {
        throw DomainError("zero bandwidth: samples have no spread");
    }
    KdeGrid g;
    if (grid) {
        g = *grid;
        if (!(g.hi > g.lo) || g.points < 2) {
            throw std::invalid_argument("KDE grid needs hi > lo and at least two points");
        }
    } else {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        g = {*mn - 3.0 * bw, *mx + 3.0 * bw, 512};
    }
    KdeEstimate est;
    est.bandwidth = bw;
    est.grid.resize(g.points);
    est.density.assign(g.points, 0.0);
    const double dx = (g.hi - g.lo) / static_cast<double>(g.points - 1);
    for (std::size_t k = 0; k < g.points; ++k) {
        est.grid[k] = g.lo + dx * static_cast<double>(k);
    }
    const double inv_bw = 1.0 / bw;
    for (std::size_t k = 0; k < g.points; ++k) {
        double s = 0.0;
        for (double v : samples) {
            const double z = (est.grid[k] - v) * inv_bw;
            s += std::exp(-0.5 * z * z);
        }
        est.density[k] = s;
    }
    const double area = trapezoid(est.grid, est.density);
    if (!(area > 0.0)) {
        throw DomainError("KDE grid carries no mass");
    }
    for (auto& v : est.density) v /= area;
    return est;
}

KdeEstimate kde_marginal(const Posterior& posterior, std::size_t coordinate, std::optional<KdeGrid> grid) {
    if (posterior.size() < 2) {
        throw DomainError("KDE needs at least two accepted draws");
    }
    if (coordinate >= posterior.dimension()) {
        throw DimensionError("posterior coordinate out of range");
    }
    const auto values = posterior.coordinate(coordinate);
    return kde(values, grid);
}

PosteriorSummary posterior_summaries(const Posterior& posterior) {
    if (posterior.empty()) {
        throw DomainError("summaries of an empty posterior");
    }
    const std::size_t p = posterior.dimension();
    const auto n = static_cast<double>(posterior.size());
    PosteriorSummary s;
    s.mean.assign(p, 0.0);
    s.std.assign(p, 0.0);
    for (const auto& a : posterior.accepted) {
        for (std::size_t j = 0; j < p; ++j) s.mean[j] += a.theta[j];
    }
    for (auto& m : s.mean) m /= n;
    if (posterior.size() > 1) {
        for (const auto& a : posterior.accepted) {
            for (std::size_t j = 0; j < p; ++j) {
                const double d = a.theta[j] - s.mean[j];
                s.std[j] += d * d;
            }
        }
        for (auto& v : s.std) v = std::sqrt(v / (n - 1.0));
    }
    try {
        std::vector<double> mode(p);
        for (std::size_t j = 0; j < p; ++j) {
            const auto est = kde_marginal(posterior, j);
            const auto it = std::max_element(est.density.begin(), est.density.end());
            mode[j] = est.grid[static_cast<std::size_t>(it - est.density.begin())];
        }
        s.mode = std::move(mode);
    } catch (const DomainError&) {
        s.mode.reset();
    }
    return s;
}

double concentration_probability(const Posterior& posterior, const ParameterVector& theta0, double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("neighbourhood radius must be > 0");
    }
    if (posterior.empty()) {
        throw DomainError("concentration of an empty posterior");
    }
    std::size_t outside = 0;
    for (const auto& a : posterior.accepted) {
        if (distance(a.theta, theta0) >= delta) ++outside;
    }
    return static_cast<double>(outside) / static_cast<double>(posterior.size());
}

void write_posterior_csv(std::ostream& out, const Posterior& posterior) {
    const std::size_t p = posterior.dimension();
    for (std::size_t j = 0; j < p; ++j) out << "theta" << (j + 1) << ',';
    out << "distance\n";
    out << std::setprecision(17);
    for (const auto& a : posterior.accepted) {
        for (std::size_t j = 0; j < p; ++j) out << a.theta[j] << ',';
        out << a.distance << '\n';
    }
}

void write_kde_csv(std::ostream& out, const KdeEstimate& estimate) {
    out << "grid,density\n" << std::setprecision(17);
    for (std::size_t k = 0; k < estimate.grid.size(); ++k) {
        out << estimate.grid[k] << ',' << estimate.density[k] << '\n';
    }
}

} // namespace abcid::abc
