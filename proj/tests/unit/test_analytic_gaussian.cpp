#include "abcid/analytic_gaussian.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace abcid::gauss;
namespace gauss = abcid::gauss;

namespace {

// Composite Simpson rule in long double with a fixed 1e-4 step.
double erf_oracle(double x) {
    const long double a = std::abs(x);
    const int n = 2 * static_cast<int>(std::ceil(a / 2e-4L)) + 2;
    const long double h = a / n;
    long double s = 1.0L + std::exp(-a * a);
    for (int i = 1; i < n; ++i) {
        const long double t = h * i;
        s += (i % 2 ? 4.0L : 2.0L) * std::exp(-t * t);
    }
    const long double v = s * h / 3.0L * 2.0L / std::sqrt(std::numbers::pi_v<long double>);
    return static_cast<double>(x < 0 ? -v : v);
}

TailQuery query(double theta0, double delta, double eta, double T, double eps) { return {theta0, delta, eta, T, eps}; }

} // namespace

TEST(PseudoPosterior, Examples) {
    const auto p = pseudo_posterior_params(1.0, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(p.mean, 0.5);
    EXPECT_DOUBLE_EQ(p.variance, 0.5);
    for (double T : {1.0, 10.0, 1e6}) EXPECT_DOUBLE_EQ(pseudo_posterior_params(0.3, T, 0.0).variance, 1.0 / (T + 1.0));
    const double T = 1e9, e2 = 0.01;
    EXPECT_NEAR(pseudo_posterior_params(0.0, T, 0.1).variance, (T * e2 + 1.0) / (T * e2 + T + 1.0), 1e-6);
    EXPECT_THROW(pseudo_posterior_params(0.0, 0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(pseudo_posterior_params(0.0, 2.0, -0.1), std::invalid_argument);
}

TEST(PseudoPosterior, VarianceInUnitInterval) {
    for (double T : {1.0, 3.0, 100.0, 1e8})
        for (double e : {0.0, 1e-3, 0.5, 10.0}) {
            const double v = pseudo_posterior_params(0.0, T, e).variance;
            EXPECT_GT(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
}

TEST(Erf, Examples) {
    EXPECT_EQ(gauss::erf(0.0), 0.0);
    EXPECT_NEAR(gauss::erf(1.0), 0.8427007929, 1e-9);
    for (int k = 0; k < 100; ++k) {
        const double x = -5.0 + 0.1 * k + 0.013;
        EXPECT_EQ(gauss::erf(-x), -gauss::erf(x));
        EXPECT_LT(std::abs(gauss::erf(x)), 1.0);
    }
}

TEST(Erf, MatchesQuadratureOracle) {
    for (double x = -6.0; x <= 6.0; x += 0.05) EXPECT_NEAR(gauss::erf(x), erf_oracle(x), 1e-12) << x;
}

TEST(XTerms, Examples) {
    const auto [x1, x2] = x_terms(query(0.0, 0.1, 0.0, 3.0, 0.0));
    EXPECT_NEAR(x1, 0.2, 1e-15);
    EXPECT_NEAR(x2, 0.2, 1e-15);
    EXPECT_THROW(x_terms(query(0.0, 0.0, 0.0, 3.0, 0.0)), std::invalid_argument);
    EXPECT_THROW(x_terms(query(0.0, 0.1, 0.0, 0.5, 0.0)), std::invalid_argument);
}

TEST(XTerms, SymmetricWhenMeanMatchesTruth) {
    const double T = 50.0, eps = 0.2, eta = 0.7;
    const double theta0 = eta / (eps * eps + 1.0 / T + 1.0);
    const auto [x1, x2] = x_terms(query(theta0, 0.1, eta, T, eps));
    EXPECT_NEAR(x1, x2, 1e-14);
}

TEST(XTerms, EpsilonZeroReduction) {
    for (double T : {1.0, 7.0, 100.0, 1e4, 1e6})
        for (double eta : {-0.4, 0.0, 0.25})
            for (double theta0 : {-0.2, 0.0, 0.3}) {
                const double delta = 0.1;
                const auto [x1, x2] = x_terms(query(theta0, delta, eta, T, 0.0));
                const double m = eta / (1.0 / T + 1.0);
                const double scale = std::max(1.0, std::sqrt(T + 1.0));
                EXPECT_NEAR(x1, std::sqrt(T + 1.0) * (delta - theta0 + m), 1e-12 * scale);
                EXPECT_NEAR(x2, std::sqrt(T + 1.0) * (delta + theta0 - m), 1e-12 * scale);
            }
}

TEST(TailProb, SaturatesToZero) {
    EXPECT_NEAR(tail_prob_erf(query(0.0, 0.1, 0.0, 1e12, 0.0)), 0.0, 1e-12);
    EXPECT_NEAR(tail_prob_cdf_oracle(query(0.0, 0.1, 0.0, 1e12, 0.0)), 0.0, 1e-12);
}

TEST(TailProb, SmallRadiusLimits) {
    EXPECT_NEAR(tail_prob_erf(query(0.0, 1e-12, 0.0, 10.0, 0.0)), std::numbers::sqrt2 / 2.0, 1e-10);
    EXPECT_NEAR(tail_prob_cdf_oracle(query(0.0, 1e-12, 0.0, 10.0, 0.0)), 1.0, 1e-10);
}

TEST(TailProb, OracleTwoSidedOneSigma) {
    // T=1, eps=0, eta=1: mean 0.5, sd sqrt(0.5)
    const double p = tail_prob_cdf_oracle(query(0.5, std::sqrt(0.5), 1.0, 1.0, 0.0));
    EXPECT_NEAR(p, std::erfc(1.0 / std::numbers::sqrt2), 1e-14);
    EXPECT_NEAR(p, 0.31731050786291415, 1e-12);
}

TEST(TailProb, MonotoneInRadiusAndBounded) {
    for (double eta : {-0.3, 0.0, 0.2})
        for (double T : {1.0, 20.0, 1000.0})
            for (double eps : {0.0, 0.05, 1.0}) {
                double pe = 2.0, po = 2.0;
                for (double d = 1e-3; d < 3.0; d *= 1.3) {
                    const auto q = query(0.1, d, eta, T, eps);
                    const double e = tail_prob_erf(q), o = tail_prob_cdf_oracle(q);
                    EXPECT_LE(e, pe);
                    EXPECT_LE(o, po);
                    EXPECT_GE(e, 0.0);
                    EXPECT_LE(e, std::numbers::sqrt2 / 2.0 + 1e-15);
                    EXPECT_GE(o, 0.0);
                    EXPECT_LE(o, 1.0);
                    pe = e;
                    po = o;
                }
            }
}

TEST(TailProb, CornerOfTheLimit) {
    const auto q = query(0.0, 0.1, 0.0, 1e6, 1e-3);
    EXPECT_LT(tail_prob_erf(q), 1e-3);
    EXPECT_LT(tail_prob_cdf_oracle(q), 1e-3);
}

// A tiny oracle value forces a tiny closed-form value; the converse fails,
// because the closed form uses gauss::erf(x) where the normal tail needs gauss::erf(x / sqrt2).
TEST(TailProb, SmallOracleImpliesSmallClosedForm) {
    for (double T = 1.0; T < 1e8; T *= 1.7)
        for (double eps : {0.0, 1e-3, 0.1, 1.0})
            for (double eta : {-0.2, 0.0, 0.05}) {
                const auto q = query(0.0, 0.1, eta, T, eps);
                if (tail_prob_cdf_oracle(q) < 1e-6) {
                    EXPECT_LT(tail_prob_erf(q), 1e-4) << T << ' ' << eps;
                }
            }
}

TEST(TailProb, SmallClosedFormDoesNotImplySmallOracle) {
    // x1 = x2 = sqrt(T+1) delta = 3.5
    const auto q = query(0.0, 0.1, 0.0, 1224.0, 0.0);
    EXPECT_LT(tail_prob_erf(q), 1e-6);
    EXPECT_GT(tail_prob_cdf_oracle(q), 1e-4);
}

TEST(Sweep, BothOrdersReachTheCorner) {
    const std::vector<double> eps{1.0, 0.1, 0.01, 1e-3};
    const std::vector<double> T{10, 100, 1e4, 1e6};
    SweepOptions o;
    o.seed = 4;
    for (auto order : {LimitOrder::eps_then_T, LimitOrder::T_then_eps}) {
        const auto t = sequential_limit_sweep(order, o, eps, T);
        EXPECT_EQ(t.rows.size(), 16u);
        EXPECT_TRUE(t.corner_below_threshold);
        EXPECT_EQ(t.corner.T, 1e6);
        EXPECT_EQ(t.corner.epsilon, 1e-3);
    }
    const auto a = sequential_limit_sweep(LimitOrder::eps_then_T, o, eps, T);
    const auto b = sequential_limit_sweep(LimitOrder::T_then_eps, o, eps, T);
    EXPECT_EQ(a.corner.eta_y, b.corner.eta_y);
    EXPECT_EQ(a.rows[1].T, 100.0);
    EXPECT_EQ(b.rows[1].epsilon, 0.1);
}

TEST(Sweep, EpsilonZeroRowShrinksWithT) {
    SweepOptions o;
    o.simulate_eta = false;
    const auto t = sequential_limit_sweep(LimitOrder::eps_then_T, o, {0.0}, {10, 100, 1e4, 1e6});
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LT(t.rows[i].prob_oracle, t.rows[i - 1].prob_oracle);
    EXPECT_LT(t.rows.back().prob_erf, 1e-12);
}

TEST(Sweep, FixedLargeTSmallEpsilon) {
    SweepOptions o;
    o.simulate_eta = false;
    const auto t = sequential_limit_sweep(LimitOrder::T_then_eps, o, {1.0, 0.1, 0.01, 1e-3}, {1e9});
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GT(t.rows[i].x1, t.rows[i - 1].x1);
    // With eta = theta0 = 0: x1 = delta sqrt((T eps^2 + T + 1) / (T eps^2 + 1)) ~ delta sqrt((eps^2 + 1) / eps^2)
    EXPECT_NEAR(t.rows[2].x1, 0.1 * std::sqrt((1e-4 + 1.0) / 1e-4), 1e-3);
    EXPECT_LT(t.rows.back().prob_oracle, 1e-3);
}

TEST(Sweep, GridValidation) {
    const SweepOptions o;
    EXPECT_THROW(sequential_limit_sweep(LimitOrder::eps_then_T, o, {0.1, 0.2}, {10}), std::invalid_argument);
    EXPECT_THROW(sequential_limit_sweep(LimitOrder::eps_then_T, o, {0.1}, {10, 5}), std::invalid_argument);
    EXPECT_THROW(sequential_limit_sweep(LimitOrder::eps_then_T, o, {}, {10}), std::invalid_argument);
    EXPECT_THROW(limit_order_from_string("sideways"), std::invalid_argument);
    EXPECT_EQ(limit_order_from_string(to_string(LimitOrder::T_then_eps)), LimitOrder::T_then_eps);
}

TEST(Sweep, CsvHeader) {
    std::ostringstream out;
    write_sweep_csv(out, sequential_limit_sweep(LimitOrder::eps_then_T, SweepOptions{}, {0.1}, {10}));
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "order,T,epsilon,x1,x2,prob_paper,prob_oracle");
}
