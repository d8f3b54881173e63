#pragma once

#include "abcid/abc_engine.hpp"
#include "abcid/series_models.hpp"
#include "abcid/summaries.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace abcid::diag {

/// Observed data set `index` at theta0: its seed is derived from `seed`, so
/// it never shares random numbers with the ABC simulations.
TimeSeries observed_series(const ModelSpec& model, const ParameterVector& theta0, std::size_t length,
                           std::uint64_t seed, std::uint64_t index = 0);

struct JumpResult {
    double metric = 0.0;
    bool flag = false;
};

/// ||mode_curr - mode_prev|| over the pooled standard deviation of `prev`
/// (root mean of its per-coordinate variances). Summaries without a mode fall
/// back to the mean. Zero pooled spread gives +inf (flagged) when the modes
/// differ and 0 when they agree.
JumpResult detect_jump(const abc::PosteriorSummary& prev, const abc::PosteriorSummary& curr, double threshold = 3.0);

struct AugmentationPlan {
    ModelSpec model;
    /// Truth for a synthetic study; ignored when `observed` is set.
    std::optional<ParameterVector> theta0;
    std::optional<TimeSeries> observed;
    /// Length of the synthetic observed series.
    std::size_t length = 0;
    /// Each set extends (or repeats) the one before it.
    std::vector<stats::StatisticSet> sets;
    abc::AbcConfig config;
    abc::DistanceSpec distance = abc::DistanceSpec::euclidean();
    double threshold = 3.0;

    /// std::invalid_argument for an empty or non-nested list, or missing data.
    void validate() const;
};

struct AugmentationStep {
    std::string set_name;
    double tolerance_used = 0.0;
    abc::PosteriorSummary summary;
    /// Absent for the first step.
    std::optional<double> jump_metric;
    bool jump_flag = false;
    abc::Posterior posterior;
};

struct AugmentationReport {
    std::vector<AugmentationStep> steps;
    double threshold = 3.0;
};

/// Rejection ABC for every set of the plan on one shared set of prior draws
/// and simulated series; only the statistics differ between steps.
AugmentationReport run_augmentation_sequence(const AugmentationPlan& plan);

struct ConsistencyRow {
    std::size_t T = 0;
    /// Fraction of accepted draws at distance >= delta from theta0.
    double probability = 0.0;
    std::vector<double> mean;
    std::vector<double> std;
    double tolerance_used = 0.0;
    abc::Posterior posterior;
};

struct ConsistencyProbe {
    double delta = 0.0;
    std::vector<ConsistencyRow> rows;
};

/// One fresh observed series per T (data set index T), then a full ABC run.
/// Sizes must be strictly ascending; delta > 0.
ConsistencyProbe consistency_sweep(const ModelSpec& model, const ParameterVector& theta0,
                                   const stats::StatisticSet& set, const std::vector<std::size_t>& sizes, double delta,
                                   const abc::AbcConfig& config,
                                   const abc::DistanceSpec& distance = abc::DistanceSpec::euclidean());

/// `step,set,tolerance,mode1,...,mean1,...,std1,...,jump_metric,jump_flag`
void write_augmentation_csv(std::ostream& out, const AugmentationReport& report);
/// `T,probability,tolerance,mean1,...,std1,...`
void write_consistency_csv(std::ostream& out, const ConsistencyProbe& probe);

} // namespace abcid::diag
