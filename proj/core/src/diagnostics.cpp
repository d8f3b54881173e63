#include "abcid/diagnostics.hpp"

#include "abcid/error.hpp"
#include "abcid/rng.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace abcid::diag {

TimeSeries observed_series(const ModelSpec& model, const ParameterVector& theta0, std::size_t length,
                           std::uint64_t seed, std::uint64_t index) {
    return model.simulate(theta0, length, rng::derive_seed(seed, rng::Purpose::observed, index), 0);
}

JumpResult detect_jump(const abc::PosteriorSummary& prev, const abc::PosteriorSummary& curr, double threshold) {
    const auto& a = prev.mode ? *prev.mode : prev.mean;
    const auto& b = curr.mode ? *curr.mode : curr.mean;
    if (a.size() != b.size() || prev.std.size() != a.size()) {
        throw DimensionError("jump detection needs summaries of equal dimension");
    }
    double shift = 0.0;
    double var = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        shift += (a[j] - b[j]) * (a[j] - b[j]);
        var += prev.std[j] * prev.std[j];
    }
    shift = std::sqrt(shift);
    const double pooled = std::sqrt(var / static_cast<double>(a.size()));
    if (pooled == 0.0) {
        if (shift == 0.0) return {0.0, false};
        return {std::numeric_limits<double>::infinity(), true};
    }
    const double metric = shift / pooled;
    return {metric, metric > threshold};
}

void AugmentationPlan::validate() const {
    if (sets.empty()) {
        throw std::invalid_argument("augmentation plan needs at least one statistic set");
    }
    for (std::size_t k = 1; k < sets.size(); ++k) {
        if (!sets[k - 1].is_prefix_of(sets[k])) {
            throw std::invalid_argument("statistic set " + sets[k].name() + " does not extend " + sets[k - 1].name());
        }
    }
    if (!observed && !theta0) {
        throw std::invalid_argument("augmentation plan needs observed data or a true parameter");
    }
    if (!observed && length == 0) {
        throw std::invalid_argument("augmentation plan needs a series length for synthetic data");
    }
    config.validate();
}

AugmentationReport run_augmentation_sequence(const AugmentationPlan& plan) {
    plan.validate();
    const TimeSeries y = plan.observed ? *plan.observed : observed_series(plan.model, *plan.theta0, plan.length, plan.config.seed);
    const auto& full = plan.sets.back();
    const auto obs_full = stats::evaluate_statistic_set(full, y).values;
    const auto thetas = abc::draw_proposals(plan.model, plan.config.n_draws, plan.config.seed);
    const auto sims =
        abc::simulate_statistics(plan.model, thetas, full, y.length(), plan.config.seed, plan.config.workers);

    AugmentationReport report;
    report.threshold = plan.threshold;
    for (std::size_t k = 0; k < plan.sets.size(); ++k) {
        const auto& set = plan.sets[k];
        const auto cols = set.columns_within(full);
        std::vector<double> obs;
        for (auto c : cols) obs.push_back(obs_full[c]);
        const auto spec = abc::calibrate(plan.distance, sims, cols);
        const auto distances = abc::statistic_distances(spec, obs, sims, cols);

        AugmentationStep step;
        step.set_name = set.name();
        step.posterior = abc::accept(thetas, distances, plan.config.tolerance);
        step.tolerance_used = step.posterior.tolerance_used;
        if (step.posterior.empty()) {
            throw DomainError("no draws accepted for statistic set " + set.name());
        }
        step.summary = abc::posterior_summaries(step.posterior);
        if (k > 0) {
            const auto jump = detect_jump(report.steps.back().summary, step.summary, plan.threshold);
            step.jump_metric = jump.metric;
            step.jump_flag = jump.flag;
        }
        report.steps.push_back(std::move(step));
    }
    return report;
}

ConsistencyProbe consistency_sweep(const ModelSpec& model, const ParameterVector& theta0,
                                   const stats::StatisticSet& set, const std::vector<std::size_t>& sizes, double delta,
                                   const abc::AbcConfig& config, const abc::DistanceSpec& distance) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("consistency sweep needs delta > 0");
    }
    if (sizes.empty()) {
        throw std::invalid_argument("consistency sweep needs at least one sample size");
    }
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (!(sizes[i] > sizes[i - 1])) throw std::invalid_argument("sample sizes must be strictly ascending");
    }
    ConsistencyProbe probe;
    probe.delta = delta;
    const auto discrepancy = abc::Discrepancy::on_statistics(set, distance);
    for (std::size_t T : sizes) {
        const TimeSeries y = observed_series(model, theta0, T, config.seed, T);
        ConsistencyRow row;
        row.T = T;
        row.posterior = abc::run_rejection_abc(y, model, discrepancy, config);
        if (row.posterior.empty()) {
            throw DomainError("no draws accepted at T = " + std::to_string(T));
        }
        row.tolerance_used = row.posterior.tolerance_used;
        row.probability = abc::concentration_probability(row.posterior, theta0, delta);
        const auto s = abc::posterior_summaries(row.posterior);
        row.mean = s.mean;
        row.std = s.std;
        probe.rows.push_back(std::move(row));
    }
    return probe;
}

void write_augmentation_csv(std::ostream& out, const AugmentationReport& report) {
    const std::size_t p = report.steps.empty() ? 0 : report.steps.front().summary.mean.size();
    out << "step,set,tolerance";
    for (const char* col : {"mode", "mean", "std"}) {
        for (std::size_t j = 0; j < p; ++j) out << ',' << col << (j + 1);
    }
    out << ",jump_metric,jump_flag\n" << std::setprecision(17);
    for (std::size_t k = 0; k < report.steps.size(); ++k) {
        const auto& s = report.steps[k];
        out << (k + 1) << ',' << s.set_name << ',' << s.tolerance_used;
        for (std::size_t j = 0; j < p; ++j) {
            out << ',';
            if (s.summary.mode) out << (*s.summary.mode)[j];
        }
        for (double v : s.summary.mean) out << ',' << v;
        for (double v : s.summary.std) out << ',' << v;
        out << ',';
        if (s.jump_metric) out << *s.jump_metric;
        out << ',' << (s.jump_flag ? 1 : 0) << '\n';
    }
}

void write_consistency_csv(std::ostream& out, const ConsistencyProbe& probe) {
    const std::size_t p = probe.rows.empty() ? 0 : probe.rows.front().mean.size();
    out << "T,probability,tolerance";
    for (std::size_t j = 0; j < p; ++j) out << ",mean" << (j + 1);
    for (std::size_t j = 0; j < p; ++j) out << ",std" << (j + 1);
    out << '\n' << std::setprecision(17);
    for (const auto& r : probe.rows) {
        out << r.T << ',' << r.probability << ',' << r.tolerance_used;
        for (double v : r.mean) out << ',' << v;
        for (double v : r.std) out << ',' << v;
        out << '\n';
    }
}

} // namespace abcid::diag
