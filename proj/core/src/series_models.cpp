#include "abcid/series_models.hpp"

#include "abcid/error.hpp"
#include "abcid/rng.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace abcid {

std::string_view to_string(Model model) {
    switch (model) {
    case Model::ar1: return "ar1";
    case Model::ma2: return "ma2";
    case Model::gauss_mean: return "gauss_mean";
    case Model::lv: return "lv";
    }
    return "unknown";
}

Model model_from_string(std::string_view name) {
    if (name == "ar1") return Model::ar1;
    if (name == "ma2") return Model::ma2;
    if (name == "gauss_mean" || name == "gauss") return Model::gauss_mean;
    if (name == "lv") return Model::lv;
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::size_t parameter_dimension(Model model) {
    return (model == Model::ma2 || model == Model::lv) ? 2 : 1;
}

bool ma2_satisfies_constraints(double theta1, double theta2) {
    return theta1 > -2.0 && theta1 < 2.0 && theta1 + theta2 > -1.0 && theta1 - theta2 < 1.0;
}

bool ma2_in_triangle(double theta1, double theta2) {
    return ma2_satisfies_constraints(theta1, theta2) && theta2 < 1.0;
}

bool in_region(Model model, std::span<const double> v) {
    if (v.size() != parameter_dimension(model)) {
        return false;
    }
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    switch (model) {
    case Model::ar1: return std::abs(v[0]) < 1.0;
    case Model::ma2: return ma2_satisfies_constraints(v[0], v[1]);
    case Model::gauss_mean: return true;
    case Model::lv: return v[0] > 0.0 && v[1] > 0.0;
    }
    return false;
}

ParameterVector::ParameterVector(Model m, std::vector<double> v) : model(m), values(std::move(v)) {
    if (values.size() != parameter_dimension(model)) {
        throw DimensionError("parameter vector for " + std::string(to_string(model)) + " needs " +
                             std::to_string(parameter_dimension(model)) + " values");
    }
}

double distance(const ParameterVector& a, const ParameterVector& b) {
    if (a.size() != b.size()) {
        throw DimensionError("parameter vectors differ in dimension");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

void require_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw DomainError("time series contains a non-finite observation");
        }
    }
}

} // namespace

TimeSeries::TimeSeries(std::vector<double> values, SeriesSource source) : source_(std::move(source)) {
    if (values.empty()) {
        throw DomainError("time series must be nonempty");
    }
    require_finite(values);
    columns_.push_back(std::move(values));
}

TimeSeries::TimeSeries(std::vector<double> x1, std::vector<double> x2, SeriesSource source)
    : source_(std::move(source)) {
    if (x1.empty() || x1.size() != x2.size()) {
        throw DimensionError("bivariate series needs two nonempty coordinates of equal length");
    }
    require_finite(x1);
    require_finite(x2);
    columns_.push_back(std::move(x1));
    columns_.push_back(std::move(x2));
}

std::span<const double> TimeSeries::values() const {
    if (dimension() != 1) {
        throw DimensionError("expected a scalar series");
    }
    return columns_.front();
}

std::span<const double> TimeSeries::coordinate(std::size_t j) const {
    if (j >= columns_.size()) {
        throw DimensionError("coordinate index out of range");
    }
    return columns_[j];
}

void TimeSeries::set_times(std::vector<double> times) {
    if (times.size() != length()) {
        throw DimensionError("time axis length differs from series length");
    }
    times_ = std::move(times);
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
    out << (series.dimension() == 1 ? "t,x1\n" : "t,x1,x2\n");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < series.length(); ++i) {
        if (series.times()) {
            out << (*series.times())[i];
        } else {
            out << (i + 1);
        }
        for (std::size_t j = 0; j < series.dimension(); ++j) {
            out << ',' << series.coordinate(j)[i];
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Lotka-Volterra

void LvConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw DomainError("LV step must be positive");
    }
    if (!(t_end > 0.0) || n_points == 0) {
        throw DomainError("LV needs t_end > 0 and at least one observation");
    }
    const double ratio = spacing() / step;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "LV step " << step << " must divide the observation spacing " << spacing();
        throw DomainError(msg.str());
    }
    for (double s : noise_sd) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw DomainError("LV noise standard deviations must be finite and >= 0");
        }
    }
    if (!(theta[0] > 0.0) || !(theta[1] > 0.0)) {
        throw DomainError("LV parameters must be strictly positive");
    }
    if (!(x0[0] >= 0.0) || !(x0[1] >= 0.0)) {
        throw DomainError("LV initial state must be non-negative");
    }
}

LvConfig LvConfig::with_points(std::size_t n, double max_step) const {
    LvConfig copy = *this;
    copy.n_points = n;
    const double per_obs = std::ceil(copy.spacing() / max_step - 1e-9);
    copy.step = copy.spacing() / std::max(1.0, per_obs);
    return copy;
}

std::string_view to_string(LvMode mode) {
    return mode == LvMode::deterministic ? "deterministic" : "noise_matched";
}

LvMode lv_mode_from_string(std::string_view name) {
    if (name == "deterministic") return LvMode::deterministic;
    if (name == "noise_matched") return LvMode::noise_matched;
    throw std::invalid_argument("unknown LV mode '" + std::string(name) + "'");
}

namespace {

using State = std::array<double, 2>;

inline State lv_rhs(const State& x, const std::array<double, 2>& theta) noexcept {
    return {theta[0] * x[0] - x[0] * x[1], theta[1] * x[0] * x[1] - x[1]};
}

inline State rk4_step(const State& x, double h, const std::array<double, 2>& theta) noexcept {
    const State k1 = lv_rhs(x, theta);
    const State k2 = lv_rhs({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]}, theta);
    const State k3 = lv_rhs({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]}, theta);
    const State k4 = lv_rhs({x[0] + h * k3[0], x[1] + h * k3[1]}, theta);
    return {x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

constexpr double kLvStateCap = 1e6;

} // namespace

TimeSeries integrate_lv(const LvConfig& config) {
    config.validate();
    const auto steps_per_obs = static_cast<std::size_t>(std::llround(config.spacing() / config.step));
    std::vector<double> x1(config.n_points), x2(config.n_points), times(config.n_points);
    State x = config.x0;
    for (std::size_t i = 0; i < config.n_points; ++i) {
        for (std::size_t s = 0; s < steps_per_obs; ++s) {
            x = rk4_step(x, config.step, config.theta);
            if (!(x[0] >= 0.0 && x[0] <= kLvStateCap && x[1] >= 0.0 && x[1] <= kLvStateCap)) {
                std::ostringstream msg;
                msg << "LV state left [0, 1e6]^2 at theta=(" << config.theta[0] << ", " << config.theta[1] << ")";
                throw NumericError(msg.str());
            }
        }
        x1[i] = x[0];
        x2[i] = x[1];
        times[i] = static_cast<double>(i + 1) * config.spacing();
    }
    SeriesSource src{SeriesSource::Kind::simulated, ParameterVector(Model::lv, {config.theta[0], config.theta[1]}), 0};
    TimeSeries out(std::move(x1), std::move(x2), std::move(src));
    out.set_times(std::move(times));
    return out;
}

TimeSeries simulate_lv_observations(const LvConfig& config, LvMode mode, std::uint64_t seed, std::uint64_t stream) {
    TimeSeries path = integrate_lv(config);
    SeriesSource src{SeriesSource::Kind::simulated, ParameterVector(Model::lv, {config.theta[0], config.theta[1]}), seed};
    std::vector<double> x1(path.coordinate(0).begin(), path.coordinate(0).end());
    std::vector<double> x2(path.coordinate(1).begin(), path.coordinate(1).end());
    if (mode == LvMode::noise_matched) {
        rng::Stream rs(seed, rng::Purpose::noise, stream);
        for (std::size_t i = 0; i < x1.size(); ++i) {
            x1[i] += config.noise_sd[0] * rs.normal();
            x2[i] += config.noise_sd[1] * rs.normal();
        }
    }
    TimeSeries out(std::move(x1), std::move(x2), std::move(src));
    out.set_times(*path.times());
    return out;
}

// ---------------------------------------------------------------------------
// Scalar simulators

TimeSeries simulate_ar1(double theta, std::size_t length, std::uint64_t seed, std::uint64_t stream) {
    if (!(std::abs(theta) < 1.0)) {
        throw DomainError("AR(1) coefficient must satisfy |theta| < 1");
    }
    if (length < 2) {
        throw DomainError("AR(1) series needs length >= 2");
    }
    rng::Stream rs(seed, rng::Purpose::simulate, stream);
    std::vector<double> y(length);
    // y_1 from the stationary law N(0, 1/(1 - theta^2)).
    y[0] = rs.normal() / std::sqrt(1.0 - theta * theta);
    for (std::size_t t = 1; t < length; ++t) {
        y[t] = theta * y[t - 1] + rs.normal();
    }
    return TimeSeries(std::move(y), {SeriesSource::Kind::simulated, ParameterVector(Model::ar1, {theta}), seed});
}

TimeSeries simulate_ma2(std::array<double, 2> theta, std::size_t length, std::uint64_t seed, std::uint64_t stream) {
    if (!ma2_satisfies_constraints(theta[0], theta[1])) {
        throw DomainError("MA(2) coefficients violate the invertibility constraints");
    }
    if (length < 3) {
        throw DomainError("MA(2) series needs length >= 3");
    }
    rng::Stream rs(seed, rng::Purpose::simulate, stream);
    // Two burn-in innovations e_{-1}, e_0 so y_1 is already stationary.
    double e_lag2 = rs.normal();
    double e_lag1 = rs.normal();
    std::vector<double> y(length);
    for (std::size_t t = 0; t < length; ++t) {
        const double e = rs.normal();
        y[t] = e + theta[0] * e_lag1 + theta[1] * e_lag2;
        e_lag2 = e_lag1;
        e_lag1 = e;
    }
    return TimeSeries(std::move(y),
                      {SeriesSource::Kind::simulated, ParameterVector(Model::ma2, {theta[0], theta[1]}), seed});
}

TimeSeries simulate_iid_normal(double mean, std::size_t length, std::uint64_t seed, std::uint64_t stream) {
    if (length < 1) {
        throw DomainError("i.i.d. normal series needs length >= 1");
    }
    rng::Stream rs(seed, rng::Purpose::simulate, stream);
    std::vector<double> y(length);
    for (auto& v : y) {
        v = mean + rs.normal();
    }
    return TimeSeries(std::move(y), {SeriesSource::Kind::simulated, ParameterVector(Model::gauss_mean, {mean}), seed});
}

// ---------------------------------------------------------------------------
// Priors

PriorDraw draw_prior(Model model, std::uint64_t seed, std::uint64_t index, const PriorOptions& options) {
    rng::Stream rs(seed, rng::Purpose::prior, index);
    switch (model) {
    case Model::ar1:
        return {ParameterVector(Model::ar1, {2.0 * rs.uniform() - 1.0}), 1};
    case Model::ma2: {
        std::size_t attempts = 0;
        while (true) {
            ++attempts;
            const double t1 = 4.0 * rs.uniform() - 2.0;
            const double t2 = 2.0 * rs.uniform() - 1.0;
            if (ma2_in_triangle(t1, t2)) {
                return {ParameterVector(Model::ma2, {t1, t2}), attempts};
            }
        }
    }
    case Model::gauss_mean:
        return {ParameterVector(Model::gauss_mean, {rs.normal()}), 1};
    case Model::lv: {
        const double a = options.lv_low[0] + (options.lv_high[0] - options.lv_low[0]) * rs.uniform();
        const double b = options.lv_low[1] + (options.lv_high[1] - options.lv_low[1]) * rs.uniform();
        return {ParameterVector(Model::lv, {a, b}), 1};
    }
    }
    throw std::logic_error("unhandled model");
}

std::vector<ParameterVector> sample_prior(Model model, std::size_t count, std::uint64_t seed,
                                          const PriorOptions& options) {
    if (count < 1) {
        throw DomainError("prior sample count must be >= 1");
    }
    std::vector<ParameterVector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(draw_prior(model, seed, i, options).theta);
    }
    return out;
}

TimeSeries ModelSpec::simulate(const ParameterVector& theta, std::size_t length, std::uint64_t seed,
                               std::uint64_t stream) const {
    switch (model) {
    case Model::ar1: return simulate_ar1(theta[0], length, seed, stream);
    case Model::ma2: return simulate_ma2({theta[0], theta[1]}, length, seed, stream);
    case Model::gauss_mean: return simulate_iid_normal(theta[0], length, seed, stream);
    case Model::lv: {
        LvConfig cfg = lv;
        cfg.theta = {theta[0], theta[1]};
        return simulate_lv_observations(cfg, lv_mode, seed, stream);
    }
    }
    throw std::logic_error("unhandled model");
}

} // namespace abcid
