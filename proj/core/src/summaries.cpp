#include "abcid/summaries.hpp"

#include "abcid/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace abcid::stats {

StatisticDescriptor StatisticDescriptor::autocov(int lag) {
    if (lag < 0) {
        throw std::invalid_argument("autocovariance lag must be >= 0");
    }
    return {StatKind::autocov, lag};
}

StatisticDescriptor StatisticDescriptor::lv_mean(int coordinate) {
    if (coordinate != 1 && coordinate != 2) {
        throw std::invalid_argument("LV coordinate must be 1 or 2");
    }
    return {StatKind::lv_mean, coordinate};
}

StatisticDescriptor StatisticDescriptor::lv_var(int coordinate) {
    if (coordinate != 1 && coordinate != 2) {
        throw std::invalid_argument("LV coordinate must be 1 or 2");
    }
    return {StatKind::lv_var, coordinate};
}

namespace {

bool parse_suffix(std::string_view token, std::string_view prefix, int& value) {
    if (token.size() <= prefix.size() || token.substr(0, prefix.size()) != prefix) {
        return false;
    }
    const auto digits = token.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    return ec == std::errc() && ptr == digits.data() + digits.size();
}

} // namespace

StatisticDescriptor StatisticDescriptor::parse(std::string_view token) {
    int value = 0;
    if (parse_suffix(token, "acov", value)) return autocov(value);
    if (parse_suffix(token, "lv_mean", value)) return lv_mean(value);
    if (parse_suffix(token, "lv_var", value)) return lv_var(value);
    if (token == "mean") return mean();
    if (token == "third") return third_moment();
    if (token == "ols_ar2") return ols_ar2();
    throw std::invalid_argument("unknown statistic '" + std::string(token) + "'");
}

std::string StatisticDescriptor::name() const {
    switch (kind) {
    case StatKind::autocov: return "acov" + std::to_string(param);
    case StatKind::mean: return "mean";
    case StatKind::third_moment: return "third";
    case StatKind::ols_ar2: return "ols_ar2";
    case StatKind::lv_mean: return "lv_mean" + std::to_string(param);
    case StatKind::lv_var: return "lv_var" + std::to_string(param);
    }
    return "?";
}

std::size_t StatisticDescriptor::min_length() const noexcept {
    switch (kind) {
    case StatKind::autocov: return static_cast<std::size_t>(param) + 1;
    case StatKind::ols_ar2: return 5;
    case StatKind::lv_mean:
    case StatKind::lv_var: return 2;
    default: return 1;
    }
}

// ---------------------------------------------------------------------------

StatisticSet::StatisticSet(std::string name, StatisticDescriptor first, std::vector<StatisticDescriptor> rest)
    : name_(std::move(name)) {
    descriptors_.reserve(rest.size() + 1);
    descriptors_.push_back(first);
    descriptors_.insert(descriptors_.end(), rest.begin(), rest.end());
    validate();
}

StatisticSet StatisticSet::from_list(std::string name, std::vector<StatisticDescriptor> descriptors) {
    if (descriptors.empty()) {
        throw std::invalid_argument("statistic set '" + name + "' is empty");
    }
    StatisticSet set;
    set.name_ = std::move(name);
    set.descriptors_ = std::move(descriptors);
    set.validate();
    return set;
}

StatisticSet StatisticSet::from_names(std::string name, const std::vector<std::string>& tokens) {
    std::vector<StatisticDescriptor> ds;
    ds.reserve(tokens.size());
    for (const auto& t : tokens) {
        ds.push_back(StatisticDescriptor::parse(t));
    }
    return from_list(std::move(name), std::move(ds));
}

void StatisticSet::validate() const {
    for (std::size_t i = 0; i < descriptors_.size(); ++i) {
        for (std::size_t j = i + 1; j < descriptors_.size(); ++j) {
            if (descriptors_[i] == descriptors_[j]) {
                throw std::invalid_argument("statistic set '" + name_ + "' repeats " + descriptors_[i].name());
            }
        }
        if (descriptors_[i].series_dimension() != descriptors_.front().series_dimension()) {
            throw std::invalid_argument("statistic set '" + name_ + "' mixes scalar and bivariate statistics");
        }
    }
}

StatisticSet StatisticSet::named(std::string_view name) {
    using D = StatisticDescriptor;
    const auto a = [](int lag) { return D::autocov(lag); };
    const std::string n(name);
    if (n == "eta1") return {n, a(0), {a(1)}};
    if (n == "eta2") return {n, a(0), {a(1), a(2)}};
    if (n == "eta3") return {n, a(0), {a(1), a(2), a(3)}};
    if (n == "eta4") return {n, a(0), {a(1), a(2), a(3), D::mean()}};
    if (n == "eta5") return {n, a(0), {a(1), a(2), a(3), D::mean(), D::third_moment()}};
    if (n == "eta6") return {n, a(0), {a(1), a(3)}};
    if (n == "eta7") return {n, a(0), {a(1), a(3), D::third_moment()}};
    if (n == "eta8") return {n, a(0), {a(1), a(3), D::third_moment(), a(2)}};
    if (n == "ols_ar2") return {n, D::ols_ar2()};
    if (n == "lv_ols") return {n, D::lv_mean(1), {D::lv_mean(2), D::lv_var(1), D::lv_var(2)}};
    if (n == "lv_means") return {n, D::lv_mean(1), {D::lv_mean(2)}};
    if (n == "lv_vars") return {n, D::lv_var(1), {D::lv_var(2)}};
    if (n == "sample_mean") return {n, D::mean()};
    if (n == "acov1") return {n, a(1)};
    throw std::invalid_argument("unknown statistic set '" + n + "'");
}

std::size_t StatisticSet::dimension() const noexcept {
    std::size_t d = 0;
    for (const auto& s : descriptors_) d += s.dimension();
    return d;
}

std::size_t StatisticSet::min_length() const noexcept {
    std::size_t m = 1;
    for (const auto& s : descriptors_) m = std::max(m, s.min_length());
    return m;
}

bool StatisticSet::is_prefix_of(const StatisticSet& other) const noexcept {
    if (descriptors_.size() > other.descriptors_.size()) {
        return false;
    }
    return std::equal(descriptors_.begin(), descriptors_.end(), other.descriptors_.begin());
}

std::vector<std::size_t> StatisticSet::columns_within(const StatisticSet& other) const {
    std::vector<std::size_t> offsets_in_other;
    std::size_t off = 0;
    for (const auto& d : other.descriptors_) {
        offsets_in_other.push_back(off);
        off += d.dimension();
    }
    std::vector<std::size_t> columns;
    for (const auto& d : descriptors_) {
        const auto it = std::find(other.descriptors_.begin(), other.descriptors_.end(), d);
        if (it == other.descriptors_.end()) {
            return {};
        }
        const std::size_t base = offsets_in_other[static_cast<std::size_t>(it - other.descriptors_.begin())];
        for (std::size_t k = 0; k < d.dimension(); ++k) {
            columns.push_back(base + k);
        }
    }
    return columns;
}

// ---------------------------------------------------------------------------

double autocov(std::span<const double> y, std::size_t lag) {
    const std::size_t T = y.size();
    if (lag >= T) {
        throw DomainError("autocovariance lag " + std::to_string(lag) + " needs a series longer than " +
                          std::to_string(T));
    }
    double s = 0.0;
    for (std::size_t t = lag; t < T; ++t) {
        s += y[t] * y[t - lag];
    }
    return s / static_cast<double>(T);
}

double autocov(const TimeSeries& series, std::size_t lag) { return autocov(series.values(), lag); }

double sample_mean(std::span<const double> y) {
    if (y.empty()) {
        throw DomainError("mean of an empty series");
    }
    double s = 0.0;
    for (double v : y) s += v;
    return s / static_cast<double>(y.size());
}

double sample_third_moment(std::span<const double> y) {
    if (y.empty()) {
        throw DomainError("third moment of an empty series");
    }
    double s = 0.0;
    for (double v : y) s += v * v * v;
    return s / static_cast<double>(y.size());
}

namespace {

void require_ar2_length(std::size_t T) {
    if (T < 5) {
        throw DomainError("AR(2) criterion needs a series of length >= 5");
    }
}

} // namespace

double ols_ar2_criterion(std::span<const double> y, std::array<double, 2> beta) {
    require_ar2_length(y.size());
    double s = 0.0;
    for (std::size_t t = 2; t < y.size(); ++t) {
        const double e = y[t] - beta[0] * y[t - 1] - beta[1] * y[t - 2];
        s += e * e;
    }
    return s / static_cast<double>(y.size());
}

AuxiliaryEstimate ols_ar2_estimate(std::span<const double> y) {
    require_ar2_length(y.size());
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (std::size_t t = 2; t < y.size(); ++t) {
        const double a = y[t - 1];
        const double b = y[t - 2];
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        r1 += y[t] * a;
        r2 += y[t] * b;
    }
    const double det = s11 * s22 - s12 * s12;
    if (!(std::abs(det) > 1e-12 * s11 * s22) || s11 == 0.0 || s22 == 0.0) {
        throw DegenerateDesignError("AR(2) normal equations are singular");
    }
    AuxiliaryEstimate est;
    est.beta = {(r1 * s22 - r2 * s12) / det, (r2 * s11 - r1 * s12) / det};
    est.criterion_value_at_min = ols_ar2_criterion(y, est.beta);
    return est;
}

AuxiliaryEstimate ols_ar2_estimate(const TimeSeries& series) { return ols_ar2_estimate(series.values()); }

std::array<double, 2> ols_ar2_criterion_gradient(std::span<const double> y, std::array<double, 2> beta) {
    require_ar2_length(y.size());
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t t = 2; t < y.size(); ++t) {
        const double e = y[t] - beta[0] * y[t - 1] - beta[1] * y[t - 2];
        g1 += y[t - 1] * e;
        g2 += y[t - 2] * e;
    }
    const double scale = -2.0 / static_cast<double>(y.size());
    return {scale * g1, scale * g2};
}

namespace {

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

void require_bivariate(const TimeSeries& series) {
    if (series.dimension() != 2) {
        throw DimensionError("LV statistics need a bivariate series");
    }
}

} // namespace

SummaryVector lv_olstats(const TimeSeries& series) {
    require_bivariate(series);
    if (series.length() < 2) {
        throw DomainError("LV statistics need at least two observations");
    }
    return {{mean_of(series.coordinate(0)), mean_of(series.coordinate(1)), variance_of(series.coordinate(0)),
             variance_of(series.coordinate(1))},
            "lv_ols",
            series.length()};
}

void evaluate_into(const StatisticSet& set, const TimeSeries& series, std::span<double> out) {
    if (out.size() != set.dimension()) {
        throw DimensionError("output buffer does not match statistic set dimension");
    }
    if (series.dimension() != set.series_dimension()) {
        throw DimensionError("statistic set '" + set.name() + "' expects a " +
                             (set.series_dimension() == 1 ? "scalar" : "bivariate") + " series");
    }
    std::size_t k = 0;
    for (const auto& d : set.descriptors()) {
        switch (d.kind) {
        case StatKind::autocov: out[k++] = autocov(series.values(), static_cast<std::size_t>(d.param)); break;
        case StatKind::mean: out[k++] = sample_mean(series.values()); break;
        case StatKind::third_moment: out[k++] = sample_third_moment(series.values()); break;
        case StatKind::ols_ar2: {
            const auto est = ols_ar2_estimate(series.values());
            out[k++] = est.beta[0];
            out[k++] = est.beta[1];
            break;
        }
        case StatKind::lv_mean: out[k++] = mean_of(series.coordinate(static_cast<std::size_t>(d.param - 1))); break;
        case StatKind::lv_var: out[k++] = variance_of(series.coordinate(static_cast<std::size_t>(d.param - 1))); break;
        }
    }
}

SummaryVector evaluate_statistic_set(const StatisticSet& set, const TimeSeries& series) {
    SummaryVector sv;
    sv.values.resize(set.dimension());
    evaluate_into(set, series, sv.values);
    sv.produced_by = set.name();
    sv.series_length = series.length();
    return sv;
}

} // namespace abcid::stats
