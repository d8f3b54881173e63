#pragma once

#include "abcid/series_models.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abcid::stats {

enum class StatKind { autocov, mean, third_moment, ols_ar2, lv_mean, lv_var };

/// One statistic. `param` is the lag for autocov and the 1-based coordinate
/// for lv_mean / lv_var; unused otherwise.
struct StatisticDescriptor {
    StatKind kind = StatKind::autocov;
    int param = 0;

    static StatisticDescriptor autocov(int lag);
    static StatisticDescriptor mean() { return {StatKind::mean, 0}; }
    static StatisticDescriptor third_moment() { return {StatKind::third_moment, 0}; }
    static StatisticDescriptor ols_ar2() { return {StatKind::ols_ar2, 0}; }
    static StatisticDescriptor lv_mean(int coordinate);
    static StatisticDescriptor lv_var(int coordinate);

    /// Parses "acov<j>", "mean", "third", "ols_ar2", "lv_mean<j>", "lv_var<j>".
    static StatisticDescriptor parse(std::string_view token);

    std::string name() const;
    /// Number of values contributed (2 for ols_ar2, else 1).
    std::size_t dimension() const noexcept { return kind == StatKind::ols_ar2 ? 2 : 1; }
    /// Series dimension the statistic expects.
    std::size_t series_dimension() const noexcept {
        return (kind == StatKind::lv_mean || kind == StatKind::lv_var) ? 2 : 1;
    }
    /// Minimum series length for the statistic to be defined.
    std::size_t min_length() const noexcept;

    bool operator==(const StatisticDescriptor&) const = default;
};

/// Ordered, named, nonempty list of distinct statistics.
class StatisticSet {
public:
    /// A set always has a first member, so an empty set cannot be spelled.
    StatisticSet(std::string name, StatisticDescriptor first, std::vector<StatisticDescriptor> rest = {});
    /// Throws std::invalid_argument on an empty or duplicated list.
    static StatisticSet from_list(std::string name, std::vector<StatisticDescriptor> descriptors);
    static StatisticSet from_names(std::string name, const std::vector<std::string>& tokens);

    /// Built-in sets:
    ///   eta1 = (acov0, acov1)          eta5 = eta4 + third
    ///   eta2 = eta1 + acov2            eta6 = eta1 + acov3
    ///   eta3 = eta2 + acov3            eta7 = eta6 + third
    ///   eta4 = eta3 + mean             eta8 = eta7 + acov2
    ///   ols_ar2, lv_ols (means then variances), lv_means, lv_vars,
    ///   sample_mean, acov1.
    static StatisticSet named(std::string_view name);

    const std::string& name() const noexcept { return name_; }
    const std::vector<StatisticDescriptor>& descriptors() const noexcept { return descriptors_; }
    std::size_t dimension() const noexcept;
    std::size_t series_dimension() const noexcept { return descriptors_.front().series_dimension(); }
    std::size_t min_length() const noexcept;

    /// True when `this` lists the same descriptors as the front of `other`.
    bool is_prefix_of(const StatisticSet& other) const noexcept;
    /// Output column offsets of this set's values inside `other`'s output, or
    /// empty if some descriptor is missing from `other`.
    std::vector<std::size_t> columns_within(const StatisticSet& other) const;

private:
    StatisticSet() = default;
    void validate() const;

    std::string name_;
    std::vector<StatisticDescriptor> descriptors_;
};

struct SummaryVector {
    std::vector<double> values;
    std::string produced_by;
    std::size_t series_length = 0;
};

struct AuxiliaryEstimate {
    std::array<double, 2> beta{};
    double criterion_value_at_min = 0.0;
};

/// (1/T) * sum_{t=lag+1}^{T} y_t y_{t-lag}; non-centred, divisor T.
double autocov(std::span<const double> y, std::size_t lag);
double autocov(const TimeSeries& series, std::size_t lag);

double sample_mean(std::span<const double> y);
double sample_third_moment(std::span<const double> y);

/// Q(y; beta) = (1/T) sum_{t=3}^{T} (y_t - b1 y_{t-1} - b2 y_{t-2})^2.
double ols_ar2_criterion(std::span<const double> y, std::array<double, 2> beta);

/// Exact minimiser of Q via the 2x2 normal equations. Needs T >= 5; throws
/// DegenerateDesignError when the normal matrix is singular.
AuxiliaryEstimate ols_ar2_estimate(std::span<const double> y);
AuxiliaryEstimate ols_ar2_estimate(const TimeSeries& series);

/// dQ/dbeta = (-2/T) (sum y_{t-1} e_t, sum y_{t-2} e_t) with e_t the residual at beta.
std::array<double, 2> ols_ar2_criterion_gradient(std::span<const double> y, std::array<double, 2> beta);

/// Per-coordinate sample mean and divisor-R_T variance of a bivariate series,
/// ordered (mean1, mean2, var1, var2).
SummaryVector lv_olstats(const TimeSeries& series);

/// Writes the set's values into `out` (size must equal set.dimension()).
void evaluate_into(const StatisticSet& set, const TimeSeries& series, std::span<double> out);
SummaryVector evaluate_statistic_set(const StatisticSet& set, const TimeSeries& series);

} // namespace abcid::stats
