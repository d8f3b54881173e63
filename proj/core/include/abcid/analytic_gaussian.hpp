#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

namespace abcid::gauss {

/// Closed-form ABC posterior of the Gaussian-mean model (N(0,1) prior, unit
/// noise, sample-mean statistic, Gaussian kernel of width epsilon).
struct PseudoPosterior {
    double eta_y = 0.0;
    double T = 1.0;
    double epsilon = 0.0;
    /// eta_y / (1/T + eps^2 + 1)
    double mean = 0.0;
    /// (1 + T eps^2) / (T + 1 + T eps^2)
    double variance = 1.0;
};

/// std::invalid_argument unless T >= 1 and epsilon >= 0.
PseudoPosterior pseudo_posterior_params(double eta_y, double T, double epsilon);

double erf(double x);
/// Standard normal CDF.
double normal_cdf(double x);

struct TailQuery {
    double theta0 = 0.0;
    double delta = 0.1;
    double eta_y = 0.0;
    double T = 1.0;
    double epsilon = 0.0;

    /// std::invalid_argument unless delta > 0, T >= 1, epsilon >= 0.
    void validate() const;
};

/// x1 = f (delta - theta0 + eta_y / (eps^2 + 1/T + 1)),
/// x2 = f (delta + theta0 - eta_y / (eps^2 + 1/T + 1)),
/// f  = sqrt((T eps^2 + T + 1) / (T eps^2 + 1)).
std::pair<double, double> x_terms(const TailQuery& query);

/// -(sqrt2/4)(erf(x1) - 1) - (sqrt2/4)(erf(x2) - 1), with no renormalisation. Ranges over
/// [0, sqrt2/2], not [0, 1].
double tail_prob_erf(const TailQuery& query);

/// Pr(|theta - theta0| >= delta) under the pseudo-posterior, from the normal CDF.
double tail_prob_cdf_oracle(const TailQuery& query);

enum class LimitOrder { eps_then_T, T_then_eps };

std::string_view to_string(LimitOrder order);
LimitOrder limit_order_from_string(std::string_view name);

struct SweepOptions {
    double theta0 = 0.0;
    double delta = 0.1;
    /// Draw eta(y) as theta0 + Z / sqrt(T), the exact law of a sample mean
    /// of T unit-variance observations; otherwise eta(y) = theta0.
    bool simulate_eta = true;
    std::uint64_t seed = 0;
    /// The corner test asserts both probabilities fall below this.
    double corner_threshold = 1e-3;
};

struct SweepRow {
    LimitOrder order = LimitOrder::eps_then_T;
    double T = 1.0;
    double epsilon = 0.0;
    double eta_y = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double prob_erf = 0.0;
    double prob_oracle = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    /// Both probabilities at the last evaluated cell are below the threshold.
    bool corner_below_threshold = false;
    SweepRow corner;
};

/// Evaluates both tail probabilities over the grid, nesting the loops in the
/// requested order: eps_then_T sweeps eps (outer) then T (inner); T_then_eps
/// the other way round. Grids must be positive (epsilon may be 0) and
/// monotone toward the limit: eps decreasing, T increasing. eta(y) for a
/// given T is drawn from stream T so both orders see the same data.
SweepTable sequential_limit_sweep(LimitOrder order, const SweepOptions& options, const std::vector<double>& eps_grid,
                                  const std::vector<double>& T_grid);

/// `order,T,epsilon,x1,x2,prob_paper,prob_oracle`
void write_sweep_csv(std::ostream& out, const SweepTable& table, bool header = true);

} // namespace abcid::gauss
