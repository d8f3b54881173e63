#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abcid {

enum class Model { ar1, ma2, gauss_mean, lv };

std::string_view to_string(Model model);
/// Accepts "ar1", "ma2", "gauss_mean" (or "gauss"), "lv".
Model model_from_string(std::string_view name);
/// Number of structural parameters.
std::size_t parameter_dimension(Model model);

/// MA(2) invertibility conditions as the model is usually stated:
/// -2 < t1 < 2, t1 + t2 > -1, t1 - t2 < 1. The set is unbounded in t2.
bool ma2_satisfies_constraints(double theta1, double theta2);
/// The compact triangle with vertices (-2,1), (2,1), (0,-1): the constraints
/// above plus t2 < 1. MA(2) priors live here.
bool ma2_in_triangle(double theta1, double theta2);

/// Region membership used for simulator preconditions: |t| < 1 for AR(1),
/// the MA(2) constraints, both components strictly positive for LV.
bool in_region(Model model, std::span<const double> values);

struct ParameterVector {
    Model model = Model::gauss_mean;
    std::vector<double> values;

    ParameterVector() = default;
    ParameterVector(Model m, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    bool operator==(const ParameterVector&) const = default;
};

double distance(const ParameterVector& a, const ParameterVector& b);

struct SeriesSource {
    enum class Kind { observed, simulated };
    Kind kind = Kind::observed;
    std::optional<ParameterVector> theta;
    std::uint64_t seed = 0;
};

/// Scalar or bivariate series of finite observations.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values, SeriesSource source = {});
    TimeSeries(std::vector<double> x1, std::vector<double> x2, SeriesSource source = {});

    std::size_t length() const noexcept { return columns_.front().size(); }
    std::size_t dimension() const noexcept { return columns_.size(); }

    /// The scalar observations; throws DimensionError for a bivariate series.
    std::span<const double> values() const;
    /// Coordinate j in {0, 1}.
    std::span<const double> coordinate(std::size_t j) const;

    /// Observation times, when the series lives on a continuous time axis.
    const std::optional<std::vector<double>>& times() const noexcept { return times_; }
    void set_times(std::vector<double> times);

    const SeriesSource& source() const noexcept { return source_; }

private:
    std::vector<std::vector<double>> columns_;
    std::optional<std::vector<double>> times_;
    SeriesSource source_;
};

/// CSV with header `t,x1` or `t,x1,x2`; t is the observation time when known,
/// otherwise the 1-based index.
void write_series_csv(std::ostream& out, const TimeSeries& series);

/// Deterministic Lotka-Volterra experiment:
///   dx1/dt = theta1 x1 - x1 x2,   dx2/dt = theta2 x1 x2 - x2
/// observed at t_i = i * t_end / n_points, i = 1..n_points, with additive
/// diagonal Gaussian measurement noise.
struct LvConfig {
    std::array<double, 2> theta{1.0, 1.0};
    std::array<double, 2> x0{1.0, 0.5};
    double t_end = 15.0;
    std::size_t n_points = 500;
    double step = 0.01;
    std::array<double, 2> noise_sd{0.5, 0.5};

    /// Throws DomainError unless the invariants hold: step > 0, the
    /// observation spacing is a whole number of steps, noise_sd >= 0 and finite,
    /// theta strictly positive, x0 non-negative.
    void validate() const;

    double spacing() const noexcept { return t_end / static_cast<double>(n_points); }

    /// Copy with `n` observation points and the largest step <= max_step that
    /// divides the new spacing.
    LvConfig with_points(std::size_t n, double max_step = 0.01) const;
};

enum class LvMode { deterministic, noise_matched };

std::string_view to_string(LvMode mode);
LvMode lv_mode_from_string(std::string_view name);

TimeSeries simulate_ar1(double theta, std::size_t length, std::uint64_t seed, std::uint64_t stream = 0);
TimeSeries simulate_ma2(std::array<double, 2> theta, std::size_t length, std::uint64_t seed,
                        std::uint64_t stream = 0);
TimeSeries simulate_iid_normal(double mean, std::size_t length, std::uint64_t seed, std::uint64_t stream = 0);

/// Classical RK4 path sampled at the observation times. No randomness.
/// Throws NumericError if the state leaves [0, 1e6]^2.
TimeSeries integrate_lv(const LvConfig& config);

TimeSeries simulate_lv_observations(const LvConfig& config, LvMode mode, std::uint64_t seed,
                                    std::uint64_t stream = 0);

struct PriorOptions {
    /// Uniform box for LV parameters, per coordinate (lo, hi).
    std::array<double, 2> lv_low{0.0, 0.0};
    std::array<double, 2> lv_high{3.0, 3.0};
};

struct PriorDraw {
    ParameterVector theta;
    /// Proposals consumed, > 1 only for the MA(2) rejection sampler.
    std::size_t attempts = 1;
};

/// Draw `index` of the prior for `model`: a pure function of (seed, index).
///   AR(1): Uniform(-1, 1); MA(2): uniform on the triangle by rejection from
///   (-2,2)x(-1,1); Gaussian mean: N(0,1); LV: uniform on the configured box.
PriorDraw draw_prior(Model model, std::uint64_t seed, std::uint64_t index, const PriorOptions& options = {});

std::vector<ParameterVector> sample_prior(Model model, std::size_t count, std::uint64_t seed,
                                          const PriorOptions& options = {});

/// Everything needed to turn a parameter draw into a simulated data set.
struct ModelSpec {
    Model model = Model::ma2;
    LvConfig lv{};
    LvMode lv_mode = LvMode::noise_matched;
    PriorOptions prior{};

    /// Simulates stream `stream` of `seed` at `theta`. For LV the length is
    /// the config's n_points and `length` is ignored.
    TimeSeries simulate(const ParameterVector& theta, std::size_t length, std::uint64_t seed,
                        std::uint64_t stream) const;
    /// True when simulate() ignores the seed.
    bool deterministic() const noexcept { return model == Model::lv && lv_mode == LvMode::deterministic; }
};

} // namespace abcid
