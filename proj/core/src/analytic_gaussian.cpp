#include "abcid/analytic_gaussian.hpp"

#include "abcid/rng.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace abcid::gauss {

PseudoPosterior pseudo_posterior_params(double eta_y, double T, double epsilon) {
    if (!(T >= 1.0)) throw std::invalid_argument("pseudo-posterior needs T >= 1");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("pseudo-posterior needs epsilon >= 0");
    const double e2 = epsilon * epsilon;
    PseudoPosterior p;
    p.eta_y = eta_y;
    p.T = T;
    p.epsilon = epsilon;
    p.mean = eta_y / (1.0 / T + e2 + 1.0);
    p.variance = (1.0 + T * e2) / (T + 1.0 + T * e2);
    return p;
}

double erf(double x) { return std::erf(x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void TailQuery::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("tail query needs delta > 0");
    if (!(T >= 1.0)) throw std::invalid_argument("tail query needs T >= 1");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("tail query needs epsilon >= 0");
}

std::pair<double, double> x_terms(const TailQuery& q) {
    q.validate();
    const double e2 = q.epsilon * q.epsilon;
    const double f = std::sqrt((q.T * e2 + q.T + 1.0) / (q.T * e2 + 1.0));
    const double m = q.eta_y / (e2 + 1.0 / q.T + 1.0);
    return {f * (q.delta - q.theta0 + m), f * (q.delta + q.theta0 - m)};
}

double tail_prob_erf(const TailQuery& query) {
    const auto [x1, x2] = x_terms(query);
    const double c = std::numbers::sqrt2 / 4.0;
    // Adding 0.0 turns the -0.0 of saturated erf terms into +0.0.
    return -c * (erf(x1) - 1.0) - c * (erf(x2) - 1.0) + 0.0;
}

double tail_prob_cdf_oracle(const TailQuery& query) {
    query.validate();
    const auto p = pseudo_posterior_params(query.eta_y, query.T, query.epsilon);
    const double s = std::sqrt(p.variance);
    const double lower = normal_cdf((query.theta0 - query.delta - p.mean) / s);
    const double upper = normal_cdf((p.mean - query.theta0 - query.delta) / s);
    return lower + upper;
}

std::string_view to_string(LimitOrder order) {
    return order == LimitOrder::eps_then_T ? "eps_then_T" : "T_then_eps";
}

LimitOrder limit_order_from_string(std::string_view name) {
    if (name == "eps_then_T") return LimitOrder::eps_then_T;
    if (name == "T_then_eps") return LimitOrder::T_then_eps;
    throw std::invalid_argument("unknown limit order '" + std::string(name) + "'");
}

SweepTable sequential_limit_sweep(LimitOrder order, const SweepOptions& options, const std::vector<double>& eps_grid,
                                  const std::vector<double>& T_grid) {
    if (eps_grid.empty() || T_grid.empty()) throw std::invalid_argument("sweep grids must be nonempty");
    if (!(options.delta > 0.0)) throw std::invalid_argument("sweep needs delta > 0");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] >= 0.0)) throw std::invalid_argument("epsilon grid must be non-negative");
        if (i && !(eps_grid[i] < eps_grid[i - 1])) throw std::invalid_argument("epsilon grid must decrease");
    }
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        if (!(T_grid[i] >= 1.0)) throw std::invalid_argument("T grid entries must be >= 1");
        if (i && !(T_grid[i] > T_grid[i - 1])) throw std::invalid_argument("T grid must increase");
    }
    const auto eta_for = [&](double T) {
        if (!options.simulate_eta) return options.theta0;
        rng::Stream s(options.seed, rng::Purpose::sweep, static_cast<std::uint64_t>(std::llround(T)));
        return options.theta0 + s.normal() / std::sqrt(T);
    };
    SweepTable table;
    const auto cell = [&](double T, double eps) {
        TailQuery q{options.theta0, options.delta, eta_for(T), T, eps};
        const auto [x1, x2] = x_terms(q);
        table.rows.push_back({order, T, eps, q.eta_y, x1, x2, tail_prob_erf(q), tail_prob_cdf_oracle(q)});
    };
    if (order == LimitOrder::eps_then_T) {
        for (double eps : eps_grid)
            for (double T : T_grid) cell(T, eps);
    } else {
        for (double T : T_grid)
            for (double eps : eps_grid) cell(T, eps);
    }
    table.corner = table.rows.back();
    table.corner_below_threshold =
        table.corner.prob_erf < options.corner_threshold && table.corner.prob_oracle < options.corner_threshold;
    return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table, bool header) {
    if (header) out << "order,T,epsilon,x1,x2,prob_paper,prob_oracle\n";
    out << std::setprecision(17);
    for (const auto& r : table.rows) {
        out << to_string(r.order) << ',' << r.T << ',' << r.epsilon << ',' << r.x1 << ',' << r.x2 << ','
            << r.prob_erf << ',' << r.prob_oracle << '\n';
    }
}

} // namespace abcid::gauss
