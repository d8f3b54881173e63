#include "abcid/analytic_gaussian.hpp"
#include "abcid/diagnostics.hpp"
#include "abcid/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace abcid;
using namespace abcid::diag;

namespace {

abc::PosteriorSummary summary(std::vector<double> mode, std::vector<double> sd) {
    abc::PosteriorSummary s;
    s.mean = mode;
    s.std = std::move(sd);
    s.mode = std::move(mode);
    return s;
}

AugmentationPlan small_plan(std::vector<std::string> names) {
    AugmentationPlan p;
    p.theta0 = ParameterVector(Model::ma2, {0.6, 0.2});
    p.length = 500;
    p.config.n_draws = 4000;
    p.config.tolerance = abc::Tolerance::quantile(0.02);
    p.config.seed = 17;
    for (const auto& n : names) p.sets.push_back(stats::StatisticSet::named(n));
    return p;
}

} // namespace

TEST(Jump, Examples) {
    const auto a = summary({0.5, 0.3}, {0.1, 0.1});
    const auto same = detect_jump(a, a);
    EXPECT_EQ(same.metric, 0.0);
    EXPECT_FALSE(same.flag);
    const auto one = detect_jump(a, summary({0.6, 0.3}, {0.2, 0.2}));
    EXPECT_NEAR(one.metric, 1.0, 1e-12);
    EXPECT_FALSE(one.flag);
    const auto big = detect_jump(a, summary({0.9, 0.3}, {0.1, 0.1}));
    EXPECT_NEAR(big.metric, 4.0, 1e-12);
    EXPECT_TRUE(big.flag);
    EXPECT_FALSE(detect_jump(a, summary({0.9, 0.3}, {0.1, 0.1}), 5.0).flag);
}

TEST(Jump, ZeroSpread) {
    const auto a = summary({0.5, 0.3}, {0.0, 0.0});
    EXPECT_EQ(detect_jump(a, a).metric, 0.0);
    EXPECT_FALSE(detect_jump(a, a).flag);
    const auto moved = detect_jump(a, summary({0.5, 0.31}, {0.0, 0.0}));
    EXPECT_TRUE(std::isinf(moved.metric));
    EXPECT_TRUE(moved.flag);
}

TEST(Jump, FallsBackToMeanAndChecksDimension) {
    auto a = summary({0.0}, {1.0});
    a.mode.reset();
    auto b = summary({2.0}, {1.0});
    b.mode.reset();
    EXPECT_NEAR(detect_jump(a, b).metric, 2.0, 1e-12);
    EXPECT_THROW(detect_jump(a, summary({0.0, 1.0}, {1.0, 1.0})), DimensionError);
}

TEST(Augmentation, PlanValidation) {
    EXPECT_THROW(small_plan({}).validate(), std::invalid_argument);
    EXPECT_THROW(small_plan({"eta2", "eta6"}).validate(), std::invalid_argument);
    EXPECT_NO_THROW(small_plan({"eta1", "eta6", "eta7", "eta8"}).validate());
    auto p = small_plan({"eta1"});
    p.theta0.reset();
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Augmentation, IdenticalSetsGiveZeroJump) {
    const auto r = run_augmentation_sequence(small_plan({"eta1", "eta1"}));
    ASSERT_EQ(r.steps.size(), 2u);
    EXPECT_FALSE(r.steps[0].jump_metric.has_value());
    EXPECT_EQ(*r.steps[1].jump_metric, 0.0);
    EXPECT_FALSE(r.steps[1].jump_flag);
}

TEST(Augmentation, SharedSimulationsEqualSeparateRuns) {
    const auto plan = small_plan({"eta1", "eta2", "eta3"});
    const auto report = run_augmentation_sequence(plan);
    const auto y = observed_series(plan.model, *plan.theta0, plan.length, plan.config.seed);
    for (std::size_t k = 0; k < plan.sets.size(); ++k) {
        const auto alone = abc::run_rejection_abc(y, plan.model, abc::Discrepancy::on_statistics(plan.sets[k]), plan.config);
        const auto& shared = report.steps[k].posterior;
        ASSERT_EQ(alone.size(), shared.size());
        for (std::size_t i = 0; i < alone.size(); ++i) {
            EXPECT_EQ(alone.accepted[i].index, shared.accepted[i].index);
            EXPECT_EQ(alone.accepted[i].distance, shared.accepted[i].distance);
        }
    }
}

TEST(Augmentation, JumpIgnoresDrawOrder) {
    const auto report = run_augmentation_sequence(small_plan({"eta1", "eta2"}));
    auto shuffled = report.steps[1].posterior;
    std::mt19937 gen(3);
    std::shuffle(shuffled.accepted.begin(), shuffled.accepted.end(), gen);
    const auto j = detect_jump(report.steps[0].summary, abc::posterior_summaries(shuffled));
    EXPECT_NEAR(j.metric, *report.steps[1].jump_metric, 1e-9);
}

TEST(Augmentation, CsvHeader) {
    std::ostringstream out;
    write_augmentation_csv(out, run_augmentation_sequence(small_plan({"eta1", "eta2"})));
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
              "step,set,tolerance,mode1,mode2,mean1,mean2,std1,std2,jump_metric,jump_flag");
}

TEST(Consistency, Validation) {
    abc::AbcConfig cfg;
    const ParameterVector t0(Model::ma2, {0.6, 0.2});
    const auto set = stats::StatisticSet::named("eta1");
    EXPECT_THROW(consistency_sweep(ModelSpec{}, t0, set, {100, 100}, 0.1, cfg), std::invalid_argument);
    EXPECT_THROW(consistency_sweep(ModelSpec{}, t0, set, {100}, 0.0, cfg), std::invalid_argument);
    EXPECT_THROW(consistency_sweep(ModelSpec{}, t0, set, {}, 0.1, cfg), std::invalid_argument);
}

TEST(Consistency, HugeRadiusGivesZero) {
    abc::AbcConfig cfg;
    cfg.n_draws = 2000;
    cfg.tolerance = abc::Tolerance::quantile(0.05);
    cfg.seed = 3;
    const auto probe = consistency_sweep(ModelSpec{}, ParameterVector(Model::ma2, {0.6, 0.2}),
                                         stats::StatisticSet::named("eta1"), {100, 300}, 5.0, cfg);
    for (const auto& r : probe.rows) EXPECT_EQ(r.probability, 0.0);
}

// A uniform acceptance window of half-width e has the variance of a normal
// kernel with sd e / sqrt(3); the analytic tail probability at that width is
// the reference.
TEST(Consistency, GaussianMeanMatchesAnalyticTail) {
    ModelSpec m;
    m.model = Model::gauss_mean;
    const ParameterVector t0(Model::gauss_mean, {1.0});
    abc::AbcConfig cfg;
    cfg.n_draws = 50000;
    cfg.tolerance = abc::Tolerance::quantile(0.01);
    cfg.seed = 19;
    const double delta = 0.05;
    const std::vector<std::size_t> sizes{50, 200, 1000};
    const auto probe = consistency_sweep(m, t0, stats::StatisticSet::named("sample_mean"), sizes, delta, cfg);
    for (const auto& r : probe.rows) {
        const auto y = observed_series(m, t0, r.T, cfg.seed, r.T);
        const gauss::TailQuery q{1.0, delta, stats::sample_mean(y.values()), double(r.T), r.tolerance_used / std::sqrt(3.0)};
        const double p = gauss::tail_prob_cdf_oracle(q);
        const double se = std::sqrt(p * (1.0 - p) / double(r.posterior.size()));
        EXPECT_NEAR(r.probability, p, 3.0 * se) << "T=" << r.T;
    }
}
