#include "commands.hpp"

#include "abcid/abc_engine.hpp"
#include "abcid/analytic_gaussian.hpp"
#include "abcid/binding.hpp"
#include "abcid/diagnostics.hpp"
#include "abcid/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

namespace abcid::cli {

namespace {

using nlohmann::json;
using KeySet = std::set<std::string>;

const KeySet kGlobalKeys{"experiment", "plan", "seed", "workers", "out"};
const KeySet kModelKeys{"model.name",     "model.theta0",     "model.n_points", "model.t_end", "model.step",
                        "model.x0",       "model.noise_sd",   "model.simulation", "prior.low", "prior.high"};
const KeySet kAbcKeys{"abc.n_draws", "abc.quantile", "abc.epsilon", "abc.distance", "abc.method", "abc.bandwidth"};

KeySet join(std::initializer_list<KeySet> parts) {
    KeySet out;
    for (const auto& p : parts) out.insert(p.begin(), p.end());
    return out;
}

/// Runs `parse` and turns its std::invalid_argument into a located ConfigError.
template <class F>
auto field(const Config& cfg, const std::string& key, F&& parse) {
    try {
        return parse();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        cfg.fail(key, e.what());
    }
}

std::array<double, 2> pair_of(const Config& cfg, const std::string& key, std::array<double, 2> fallback) {
    if (!cfg.has(key)) return fallback;
    const auto v = cfg.get_doubles(key);
    if (v.size() != 2) cfg.fail(key, "expected two numbers");
    return {v[0], v[1]};
}

ModelSpec model_spec(const Config& cfg) {
    ModelSpec spec;
    spec.model = field(cfg, "model.name", [&] { return model_from_string(cfg.get_string("model.name")); });
    if (spec.model == Model::lv) {
        LvConfig lv;
        lv.t_end = cfg.get_double("model.t_end", lv.t_end);
        lv.x0 = pair_of(cfg, "model.x0", lv.x0);
        lv.noise_sd = pair_of(cfg, "model.noise_sd", lv.noise_sd);
        const auto max_step = cfg.get_double("model.step", 0.01);
        const auto n = cfg.get_int("model.n_points", static_cast<long long>(lv.n_points));
        if (n < 2) cfg.fail("model.n_points", "needs at least two observation points");
        field(cfg, "model.n_points", [&] {
            spec.lv = lv.with_points(static_cast<std::size_t>(n), max_step);
            spec.lv.validate();
            return 0;
        });
        spec.lv_mode = field(cfg, "model.simulation",
                             [&] { return lv_mode_from_string(cfg.get_string("model.simulation", "noise_matched")); });
        spec.prior.lv_low = pair_of(cfg, "prior.low", spec.prior.lv_low);
        spec.prior.lv_high = pair_of(cfg, "prior.high", spec.prior.lv_high);
    }
    return spec;
}

ParameterVector theta0_of(const Config& cfg, const ModelSpec& spec) {
    return field(cfg, "model.theta0", [&] { return ParameterVector(spec.model, cfg.get_doubles("model.theta0")); });
}

stats::StatisticSet resolve_set(const Config& cfg, const std::string& key, const std::vector<std::string>& tokens) {
    return field(cfg, key, [&] {
        if (tokens.size() == 1) {
            try {
                return stats::StatisticSet::named(tokens[0]);
            } catch (const std::invalid_argument&) {
            }
        }
        return stats::StatisticSet::from_names("custom", tokens);
    });
}

abc::AbcConfig abc_config(const Config& cfg, const RunContext& ctx) {
    abc::AbcConfig c;
    const auto n = cfg.get_int("abc.n_draws", static_cast<long long>(c.n_draws));
    if (n < 1) cfg.fail("abc.n_draws", "must be >= 1");
    c.n_draws = static_cast<std::size_t>(n);
    if (cfg.has("abc.quantile") && cfg.has("abc.epsilon")) {
        cfg.fail("abc.epsilon", "set either abc.quantile or abc.epsilon, not both");
    }
    c.tolerance = cfg.has("abc.epsilon") ? abc::Tolerance::absolute(cfg.get_double("abc.epsilon"))
                                         : abc::Tolerance::quantile(cfg.get_double("abc.quantile", 0.01));
    c.seed = ctx.seed;
    c.workers = ctx.workers;
    field(cfg, cfg.has("abc.epsilon") ? "abc.epsilon" : "abc.quantile", [&] {
        c.validate();
        return 0;
    });
    return c;
}

abc::DistanceSpec distance_of(const Config& cfg, const char* fallback) {
    const auto kind = field(cfg, "abc.distance",
                            [&] { return abc::distance_kind_from_string(cfg.get_string("abc.distance", fallback)); });
    return abc::DistanceSpec{kind, {}, {}};
}

TimeSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open data file");
    std::string line;
    std::getline(in, line);
    const auto header = split_list(line);
    if (header.size() < 2 || header.size() > 3 || header[0] != "t") {
        throw ConfigError(path + ":1: expected header t,x1 or t,x1,x2");
    }
    std::vector<double> t, x1, x2;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_list(line);
        if (cells.size() != header.size()) throw ConfigError(path + ":" + std::to_string(line_no) + ": wrong column count");
        try {
            t.push_back(std::stod(cells[0]));
            x1.push_back(std::stod(cells[1]));
            if (cells.size() == 3) x2.push_back(std::stod(cells[2]));
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": not a number");
        }
    }
    if (x1.empty()) throw ConfigError(path + ": no observations");
    SeriesSource src{SeriesSource::Kind::observed, std::nullopt, 0};
    TimeSeries s = header.size() == 3 ? TimeSeries(x1, x2, src) : TimeSeries(x1, src);
    s.set_times(t);
    return s;
}

TimeSeries observed_data(const Config& cfg, const ModelSpec& spec, const RunContext& ctx, std::size_t index = 0) {
    if (cfg.has("data.file")) return read_series_csv(cfg.get_string("data.file"));
    const auto theta0 = theta0_of(cfg, spec);
    std::size_t length = spec.model == Model::lv ? spec.lv.n_points : 0;
    if (spec.model != Model::lv) {
        const auto l = cfg.get_int("data.length");
        if (l < 1) cfg.fail("data.length", "must be >= 1");
        length = static_cast<std::size_t>(l);
    }
    // Observed LV data always carry measurement noise, whatever the simulator mode.
    ModelSpec truth = spec;
    truth.lv_mode = LvMode::noise_matched;
    return field(cfg, "model.theta0", [&] { return diag::observed_series(truth, theta0, length, ctx.seed, index); });
}

json to_json(const std::vector<double>& v) { return json(v); }

json summary_json(const abc::Posterior& post) {
    json j;
    j["n_proposed"] = post.n_proposed;
    j["accepted"] = post.size();
    j["tolerance_used"] = post.tolerance_used;
    j["acceptance_rate"] = post.acceptance_rate;
    j["no_acceptances"] = post.no_acceptances;
    j["simulation_failures"] = post.simulation_failures;
    if (!post.empty()) {
        const auto s = abc::posterior_summaries(post);
        j["mean"] = to_json(s.mean);
        j["std"] = to_json(s.std);
        j["mode"] = s.mode ? to_json(*s.mode) : json(nullptr);
    }
    return j;
}

/// Prior support per coordinate, for KDE grids comparable across runs.
std::optional<abc::KdeGrid> kde_grid_for(const ModelSpec& spec, std::size_t j) {
    switch (spec.model) {
    case Model::ma2: return j == 0 ? abc::KdeGrid{-2.0, 2.0, 512} : abc::KdeGrid{-1.0, 1.0, 512};
    case Model::ar1: return abc::KdeGrid{-1.0, 1.0, 512};
    case Model::lv: return abc::KdeGrid{spec.prior.lv_low[j], spec.prior.lv_high[j], 512};
    case Model::gauss_mean: return std::nullopt;
    }
    return std::nullopt;
}

/// Writes posterior and per-coordinate KDE files; returns the KDEs formed.
std::vector<std::optional<abc::KdeEstimate>> write_posterior_files(OutputDirectory& out, const std::string& stem,
                                                                   const abc::Posterior& post, const ModelSpec& spec) {
    out.write(stem + "_posterior.csv", [&](std::ostream& os) { abc::write_posterior_csv(os, post); });
    std::vector<std::optional<abc::KdeEstimate>> kdes(post.dimension());
    for (std::size_t j = 0; j < post.dimension(); ++j) {
        try {
            kdes[j] = abc::kde_marginal(post, j, kde_grid_for(spec, j));
        } catch (const DomainError&) {
            continue;
        }
        out.write(stem + "_kde_theta" + std::to_string(j + 1) + ".csv",
                  [&](std::ostream& os) { abc::write_kde_csv(os, *kdes[j]); });
    }
    return kdes;
}

void write_overlay(OutputDirectory& out, const std::string& name, const abc::KdeEstimate& kde, double eta_y, double T,
                   double epsilon) {
    const auto pp = gauss::pseudo_posterior_params(eta_y, T, epsilon);
    const double s = std::sqrt(pp.variance);
    out.write(name, [&](std::ostream& os) {
        os << "grid,kde,analytic\n" << std::setprecision(17);
        for (std::size_t k = 0; k < kde.grid.size(); ++k) {
            const double z = (kde.grid[k] - pp.mean) / s;
            const double dens = std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
            os << kde.grid[k] << ',' << kde.density[k] << ',' << dens << '\n';
        }
    });
}

std::string set_stem(const stats::StatisticSet& set) { return set.name(); }

} // namespace

void cmd_abc_run(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    cfg.check_known(join({kGlobalKeys, kModelKeys, kAbcKeys,
                          KeySet{"data.file", "data.length", "data.sizes", "statistics.set", "statistics.sets",
                                     "sweep.delta"}}));
    auto& out = *ctx.out;
    const auto spec = model_spec(cfg);
    const auto config = abc_config(cfg, ctx);
    const auto dist = distance_of(cfg, spec.model == Model::lv ? "lv_raw_path" : "euclidean");

    if (cfg.has("data.sizes")) {
        // Consistency sweep: one posterior per statistic set and sample size.
        const auto theta0 = theta0_of(cfg, spec);
        std::vector<std::size_t> sizes;
        for (double t : cfg.get_doubles("data.sizes")) {
            if (!(t >= 1.0) || std::floor(t) != t) cfg.fail("data.sizes", "sample sizes must be positive integers");
            sizes.push_back(static_cast<std::size_t>(t));
        }
        const double delta = cfg.get_double("sweep.delta", 0.1);
        std::vector<stats::StatisticSet> sets;
        for (const auto& name : cfg.get_strings("statistics.sets", {cfg.get_string("statistics.set", "eta1")})) {
            sets.push_back(resolve_set(cfg, "statistics.sets", {name}));
        }
        if (!dist.compares_statistics()) cfg.fail("abc.distance", "a sweep needs a statistic distance");
        json summary = json::array();
        for (const auto& set : sets) {
            const auto probe = field(cfg, "data.sizes", [&] {
                return diag::consistency_sweep(spec, theta0, set, sizes, delta, config, dist);
            });
            for (const auto& row : probe.rows) {
                write_posterior_files(out, set_stem(set) + "_T" + std::to_string(row.T), row.posterior, spec);
            }
            out.write("consistency_" + set_stem(set) + ".csv",
                      [&](std::ostream& os) { diag::write_consistency_csv(os, probe); });
            json rows = json::array();
            for (const auto& row : probe.rows) {
                rows.push_back({{"T", row.T},
                                {"probability_outside_delta", row.probability},
                                {"tolerance_used", row.tolerance_used},
                                {"mean", row.mean},
                                {"std", row.std}});
            }
            summary.push_back({{"set", set.name()}, {"delta", delta}, {"rows", rows}});
        }
        out.write_json("summary.json", summary);
        return;
    }

    const auto y = observed_data(cfg, spec, ctx);
    out.write("observed.csv", [&](std::ostream& os) { write_series_csv(os, y); });
    const std::string method = cfg.get_string("abc.method", "rejection");
    std::optional<stats::StatisticSet> set;
    if (cfg.has("statistics.set")) set = resolve_set(cfg, "statistics.set", cfg.get_strings("statistics.set"));

    abc::Posterior post;
    double bandwidth = 0.0;
    if (method == "kernel") {
        if (!set) cfg.fail("statistics.set", "kernel ABC needs a scalar statistic");
        bandwidth = cfg.get_double("abc.bandwidth");
        post = field(cfg, "abc.bandwidth", [&] { return abc::run_kernel_abc(y, spec, *set, bandwidth, config); });
    } else if (method == "rejection") {
        abc::Discrepancy d;
        if (dist.compares_statistics()) {
            if (!set) cfg.fail("statistics.set", "statistic distances need a statistic set");
            d = abc::Discrepancy::on_statistics(*set, dist);
        } else {
            d = dist.kind == abc::DistanceKind::score_ols_ar2 ? abc::Discrepancy::score() : abc::Discrepancy::lv_raw_path();
        }
        post = field(cfg, "abc.distance", [&] { return abc::run_rejection_abc(y, spec, d, config); });
    } else {
        cfg.fail("abc.method", "expected 'rejection' or 'kernel'");
    }

    const auto kdes = write_posterior_files(out, "abc", post, spec);
    json summary = summary_json(post);
    summary["method"] = method;
    if (spec.model == Model::gauss_mean && set && set->descriptors().front().kind == stats::StatKind::mean &&
        set->dimension() == 1 && !kdes.empty() && kdes[0]) {
        const double eta_y = stats::sample_mean(y.values());
        const double eps = method == "kernel" ? bandwidth : post.tolerance_used;
        const auto pp = gauss::pseudo_posterior_params(eta_y, static_cast<double>(y.length()), eps);
        write_overlay(out, "overlay.csv", *kdes[0], eta_y, static_cast<double>(y.length()), eps);
        summary["analytic"] = {{"eta_y", eta_y}, {"epsilon", eps}, {"mean", pp.mean}, {"variance", pp.variance}};
    }
    out.write_json("summary.json", summary);
}

void cmd_diagnose_augment(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    cfg.check_known(join({kGlobalKeys, kModelKeys, kAbcKeys,
                          KeySet{"data.file", "data.length", "statistics.sets", "jump.threshold"}}));
    auto& out = *ctx.out;
    diag::AugmentationPlan plan;
    plan.model = model_spec(cfg);
    plan.config = abc_config(cfg, ctx);
    plan.distance = distance_of(cfg, "euclidean");
    if (!plan.distance.compares_statistics()) cfg.fail("abc.distance", "augmentation needs a statistic distance");
    plan.threshold = cfg.get_double("jump.threshold", 3.0);
    if (cfg.has("data.file")) {
        plan.observed = read_series_csv(cfg.get_string("data.file"));
    } else {
        plan.theta0 = theta0_of(cfg, plan.model);
        const auto l = cfg.get_int("data.length");
        if (l < 1) cfg.fail("data.length", "must be >= 1");
        plan.length = static_cast<std::size_t>(l);
    }
    for (const auto& name : cfg.get_strings("statistics.sets")) {
        plan.sets.push_back(resolve_set(cfg, "statistics.sets", {name}));
    }
    const auto report = field(cfg, "statistics.sets", [&] { return diag::run_augmentation_sequence(plan); });

    out.write("augmentation.csv", [&](std::ostream& os) { diag::write_augmentation_csv(os, report); });
    json steps = json::array();
    for (std::size_t k = 0; k < report.steps.size(); ++k) {
        const auto& s = report.steps[k];
        out.write("step" + std::to_string(k + 1) + "_" + s.set_name + "_posterior.csv",
                  [&](std::ostream& os) { abc::write_posterior_csv(os, s.posterior); });
        steps.push_back({{"set", s.set_name},
                         {"tolerance_used", s.tolerance_used},
                         {"mode", s.summary.mode ? json(*s.summary.mode) : json(nullptr)},
                         {"mean", s.summary.mean},
                         {"std", s.summary.std},
                         {"jump_metric", s.jump_metric ? json(std::isinf(*s.jump_metric) ? "inf" : json(*s.jump_metric))
                                                       : json(nullptr)},
                         {"jump_flag", s.jump_flag}});
    }
    out.write_json("augmentation.json", {{"threshold", report.threshold}, {"steps", steps}});
}

namespace {

json witness_json(const ParameterVector& a, const ParameterVector& b) { return {{"theta_a", a.values}, {"theta_b", b.values}}; }

json preimage_json(const binding::PreimageResult& r) {
    const auto list = [](const std::vector<ParameterVector>& v) {
        json j = json::array();
        for (const auto& p : v) j.push_back(p.values);
        return j;
    };
    return {{"target", r.target},
            {"method", binding::to_string(r.method)},
            {"solutions", list(r.solutions)},
            {"infeasible_solutions", list(r.infeasible_solutions)},
            {"suspect", list(r.suspect)}};
}

} // namespace

void cmd_diagnose_injectivity(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    cfg.check_known(join({kGlobalKeys, kModelKeys,
                          KeySet{"statistics.set", "injectivity.mode", "injectivity.rho_min", "injectivity.tau",
                                     "injectivity.points", "injectivity.t_star", "injectivity.sim_points",
                                     "injectivity.sim_tau", "injectivity.sim_rho_min"}}));
    auto& out = *ctx.out;
    const auto spec = model_spec(cfg);
    const auto set = resolve_set(cfg, "statistics.set", cfg.get_strings("statistics.set"));
    const auto b = field(cfg, "statistics.set", [&] {
        try {
            return binding::BindingFunction::for_statistics(spec.model, set);
        } catch (const DomainError& e) {
            throw std::invalid_argument(e.what());
        }
    });
    const auto region = binding::Region::default_for(b);
    const std::string mode = cfg.get_string("injectivity.mode", "analytic");
    if (mode != "analytic" && mode != "simulated") cfg.fail("injectivity.mode", "expected 'analytic' or 'simulated'");

    json j;
    j["binding"] = b.name();
    j["region"] = region.name();
    j["mode"] = mode;
    if (mode == "analytic") {
        const double rho = cfg.get_double("injectivity.rho_min", 0.05);
        const double tau = cfg.get_double("injectivity.tau", 0.01);
        binding::InjectivityOptions opt;
        opt.points_per_dimension = static_cast<std::size_t>(cfg.get_int("injectivity.points", 500));
        opt.workers = ctx.workers;
        const auto v = field(cfg, "injectivity.tau", [&] { return binding::check_injectivity_analytic(b, region, rho, tau, opt); });
        j["injective"] = v.injective;
        j["witness"] = v.witness ? witness_json(v.witness->theta_a, v.witness->theta_b) : json(nullptr);
        j["grid_points"] = v.grid_points;
        j["candidate_pairs"] = v.candidate_pairs;
        j["rho_min"] = v.rho_min;
        j["tau"] = v.tau;
    } else {
        const auto t_star = static_cast<std::size_t>(cfg.get_int("injectivity.t_star", 1000000));
        const auto k = static_cast<std::size_t>(cfg.get_int("injectivity.sim_points", spec.model == Model::ar1 ? 50 : 28));
        const auto sim_region = spec.model == Model::ar1 ? binding::Region::ar1(0.95) : region;
        const auto pts = binding::region_grid(sim_region, k);
        double rho_default = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t m = i + 1; m < pts.size(); ++m) {
                const double d = distance(pts[i], pts[m]);
                if (rho_default == 0.0 || d < rho_default) rho_default = d;
            }
        }
        const double rho = cfg.get_double("injectivity.sim_rho_min", rho_default);
        const double tau = cfg.get_double("injectivity.sim_tau", 1e-3);
        const auto v = field(cfg, "injectivity.t_star", [&] {
            return binding::verify_one_to_one(spec, set, pts, t_star, tau, rho, ctx.seed, ctx.workers);
        });
        j["injective"] = v.injective;
        j["collisions"] = v.collisions;
        j["witness"] = v.witness ? witness_json(v.witness->theta_a, v.witness->theta_b) : json(nullptr);
        if (v.witness) {
            j["witness_statistic_distance"] = v.witness->statistic_distance;
            j["witness_threshold"] = v.witness->threshold;
        }
        j["points"] = pts.size();
        j["t_star"] = v.t_star;
        j["rho_min"] = v.rho_min;
        j["tau"] = v.tau;
        out.write("statistics.csv", [&](std::ostream& os) {
            os << std::setprecision(17);
            for (std::size_t p = 0; p < pts.front().size(); ++p) os << "theta" << (p + 1) << ',';
            for (std::size_t c = 0; c < set.dimension(); ++c) os << "stat" << (c + 1) << ",se" << (c + 1) << (c + 1 < set.dimension() ? "," : "\n");
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (double x : pts[i].values) os << x << ',';
                const auto& s = v.statistics[i];
                for (std::size_t c = 0; c < s.summary.values.size(); ++c) {
                    os << s.summary.values[c] << ',' << s.std_error[c] << (c + 1 < s.summary.values.size() ? "," : "\n");
                }
            }
        });
    }
    if (cfg.has("model.theta0")) {
        const auto theta0 = theta0_of(cfg, spec);
        const auto target = field(cfg, "model.theta0", [&] {
            try {
                return b(theta0.values);
            } catch (const DomainError& e) {
                throw std::invalid_argument(e.what());
            }
        });
        j["preimage"] = preimage_json(binding::solve_preimage(b, target, region));
    }
    out.write_json("injectivity.json", j);
}

void cmd_analytic_sweep(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    cfg.check_known(join({kGlobalKeys, KeySet{"sweep.theta0", "sweep.delta", "sweep.epsilon", "sweep.T",
                                                   "sweep.orders", "sweep.simulate_eta", "sweep.threshold"}}));
    auto& out = *ctx.out;
    gauss::SweepOptions opt;
    opt.theta0 = cfg.get_double("sweep.theta0", 0.0);
    opt.delta = cfg.get_double("sweep.delta", 0.1);
    opt.simulate_eta = cfg.get_bool("sweep.simulate_eta", true);
    opt.corner_threshold = cfg.get_double("sweep.threshold", 1e-3);
    opt.seed = ctx.seed;
    const auto eps = cfg.get_doubles("sweep.epsilon", {0.1, 0.03, 0.01, 0.003, 0.001});
    const auto Ts = cfg.get_doubles("sweep.T", {100, 1000, 10000, 100000, 1000000});
    json orders = json::array();
    std::vector<gauss::SweepTable> tables;
    for (const auto& name : cfg.get_strings("sweep.orders", {"eps_then_T", "T_then_eps"})) {
        const auto order = field(cfg, "sweep.orders", [&] { return gauss::limit_order_from_string(name); });
        tables.push_back(field(cfg, "sweep.epsilon", [&] { return gauss::sequential_limit_sweep(order, opt, eps, Ts); }));
        const auto& c = tables.back().corner;
        orders.push_back({{"order", name},
                          {"corner", {{"T", c.T}, {"epsilon", c.epsilon}, {"prob_erf", c.prob_erf}, {"prob_oracle", c.prob_oracle}}},
                          {"corner_below_threshold", tables.back().corner_below_threshold}});
    }
    out.write("sweep.csv", [&](std::ostream& os) {
        for (std::size_t k = 0; k < tables.size(); ++k) gauss::write_sweep_csv(os, tables[k], k == 0);
    });
    // The eps = 0 x-terms against their reduced form sqrt(T+1)(delta -/+ theta0 +/- eta/(1/T+1)).
    double max_err = 0.0;
    for (double T : Ts) {
        const gauss::TailQuery q{opt.theta0, opt.delta, opt.theta0, T, 0.0};
        const auto [x1, x2] = gauss::x_terms(q);
        const double m = q.eta_y / (1.0 / T + 1.0);
        max_err = std::max({max_err, std::abs(x1 - std::sqrt(T + 1.0) * (q.delta - q.theta0 + m)),
                            std::abs(x2 - std::sqrt(T + 1.0) * (q.delta + q.theta0 - m))});
    }
    out.write_json("sweep.json", {{"threshold", opt.corner_threshold}, {"orders", orders}, {"eps0_reduction_max_error", max_err}});
}

void cmd_lv_study(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    cfg.check_known(join({kGlobalKeys, kModelKeys, kAbcKeys, KeySet{"statistics.set"}}));
    auto& out = *ctx.out;
    const auto spec = model_spec(cfg);
    if (spec.model != Model::lv) cfg.fail("model.name", "lv-study needs model lv");
    const auto theta0 = theta0_of(cfg, spec);
    const auto config = abc_config(cfg, ctx);
    const auto dist = distance_of(cfg, "lv_raw_path");
    const auto y = observed_data(cfg, spec, ctx);
    out.write("observed.csv", [&](std::ostream& os) { write_series_csv(os, y); });

    abc::Discrepancy d = abc::Discrepancy::lv_raw_path();
    if (dist.compares_statistics()) {
        if (!cfg.has("statistics.set")) cfg.fail("statistics.set", "statistic distances need a statistic set");
        d = abc::Discrepancy::on_statistics(resolve_set(cfg, "statistics.set", cfg.get_strings("statistics.set")), dist);
    } else if (dist.kind != abc::DistanceKind::lv_raw_path) {
        cfg.fail("abc.distance", "lv-study supports lv_raw_path or a statistic distance");
    }
    const auto post = field(cfg, "abc.distance", [&] { return abc::run_rejection_abc(y, spec, d, config); });
    write_posterior_files(out, "lv", post, spec);

    json j = summary_json(post);
    j["simulation"] = to_string(spec.lv_mode);
    j["n_points"] = spec.lv.n_points;
    if (!post.empty()) {
        double mn = post.accepted.front().distance;
        for (const auto& a : post.accepted) mn = std::min(mn, a.distance);
        j["min_distance"] = mn;
        const auto s = abc::posterior_summaries(post);
        j["mean_distance_to_theta0"] = std::hypot(s.mean[0] - theta0[0], s.mean[1] - theta0[1]);
    }
    if (d.distance.kind == abc::DistanceKind::lv_raw_path) {
        // Expected squared noise per point and its Monte Carlo spread over R points.
        const double v1 = spec.lv.noise_sd[0] * spec.lv.noise_sd[0];
        const double v2 = spec.lv.noise_sd[1] * spec.lv.noise_sd[1];
        const double sd = std::sqrt(2.0 * v1 * v1 + 2.0 * v2 * v2) / std::sqrt(static_cast<double>(spec.lv.n_points));
        const double floor = v1 + v2 - 3.0 * sd;
        std::size_t below = 0;
        for (const auto& a : post.accepted) below += a.distance <= floor ? 1 : 0;
        j["noise_floor"] = floor;
        j["accepted_at_floor"] = below;
    }
    out.write_json("summary.json", j);
}

} // namespace abcid::cli
