// Runs the acceptance criteria end to end and prints one PASS/FAIL line per
// criterion. Exits 0 unless --strict is given and some criterion failed.

#include "abcid/abc_engine.hpp"
#include "abcid/analytic_gaussian.hpp"
#include "abcid/binding.hpp"
#include "abcid/diagnostics.hpp"
#include "abcid/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

using namespace abcid;

namespace {

constexpr std::uint64_t kSeed = 20240101;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Report {
public:
    void add(const std::string& key, bool ok, const std::string& what) {
        ok_ = ok_ && ok;
        if (!text_.str().empty()) text_ << "; ";
        text_ << key << (ok ? " ok" : " FAILED") << " (" << what << ")";
    }
    Outcome done() const { return {ok_, text_.str()}; }

private:
    bool ok_ = true;
    std::ostringstream text_;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream o;
    o << std::setprecision(digits) << v;
    return o.str();
}

std::string point(const ParameterVector& p) {
    std::ostringstream o;
    o << std::setprecision(4) << '(';
    for (std::size_t i = 0; i < p.size(); ++i) o << (i ? ", " : "") << p[i];
    return o.str() + ')';
}

bool near_point(const ParameterVector& p, std::vector<double> q, double tol) {
    return distance(p, ParameterVector(p.model, std::move(q))) <= tol;
}

bool has_root(const std::vector<ParameterVector>& roots, std::vector<double> q, double tol) {
    return std::ranges::any_of(roots, [&](const ParameterVector& r) { return near_point(r, q, tol); });
}

const ParameterVector kMa2Truth(Model::ma2, {0.6, 0.2});
const std::vector<double> kSpurious{0.5453, 0.3204};

Outcome criterion1() {
    Report r;
    const auto b = binding::BindingFunction::ma2_acov(1);
    const auto res = binding::solve_preimage(b, b(kMa2Truth.values), binding::Region::ma2_triangle());
    std::string roots;
    for (const auto& s : res.solutions) roots += point(s) + " ";
    r.add("two feasible roots", res.solutions.size() == 2 && has_root(res.solutions, {0.6, 0.2}, 1e-3) &&
                                    has_root(res.solutions, kSpurious, 1e-3),
          roots + "via " + std::string(binding::to_string(res.method)));
    return r.done();
}

Outcome criterion2() {
    Report r;
    const auto b = binding::BindingFunction::ols_ar2_on_ma2();
    const auto a = b(std::vector<double>{0.5, 0.5});
    const auto c = b(std::vector<double>{1.0, 2.0});
    const double diff = std::max(std::abs(a[0] - c[0]), std::abs(a[1] - c[1]));
    r.add("b(0.5,0.5) = b(1,2)", diff <= 1e-10, "max difference " + fmt(diff));
    const auto res = binding::solve_preimage(b, a, binding::Region::default_for(b));
    r.add("preimage holds both", has_root(res.solutions, {0.5, 0.5}, 1e-6) && has_root(res.solutions, {1.0, 2.0}, 1e-6),
          std::to_string(res.solutions.size()) + " feasible roots, " + std::to_string(res.suspect.size()) + " suspect");
    return r.done();
}

Outcome criterion3() {
    Report r;
    const auto b = binding::BindingFunction::ar1_acov1();
    const auto v = binding::check_injectivity_analytic(b, binding::Region::ar1(0.99), 0.05, 1e-3);
    r.add("injective on (-0.99, 0.99)", v.injective, std::to_string(v.candidate_pairs) + " candidate pairs");
    const auto res = binding::solve_preimage(b, b(std::vector<double>{0.5}), binding::Region::ar1(0.99));
    const bool infeasible_reported =
        res.infeasible_solutions.size() == 1 && std::abs(res.infeasible_solutions[0][0] + 2.0) < 1e-9;
    r.add("root -1/theta0 reported infeasible", infeasible_reported && res.solutions.size() == 1,
          "theta0 = 0.5, infeasible root " + (res.infeasible_solutions.empty() ? "none" : point(res.infeasible_solutions[0])));
    return r.done();
}

abc::AbcConfig figure_config() {
    abc::AbcConfig c;
    c.n_draws = 50000;
    c.tolerance = abc::Tolerance::quantile(0.01);
    c.seed = kSeed;
    return c;
}

Outcome criterion4() {
    Report r;
    const std::vector<std::size_t> sizes{100, 500, 5000};
    const ModelSpec model;
    const auto eta2 = diag::consistency_sweep(model, kMa2Truth, stats::StatisticSet::named("eta2"), sizes, 0.1, figure_config());
    std::string probs;
    bool decreasing = true;
    for (std::size_t i = 0; i < eta2.rows.size(); ++i) {
        probs += (i ? ", " : "") + fmt(eta2.rows[i].probability, 3);
        if (i && !(eta2.rows[i].probability < eta2.rows[i - 1].probability)) decreasing = false;
    }
    r.add("eta2 strictly decreasing", decreasing, "P = " + probs);
    const double final2 = eta2.rows.back().probability;
    r.add("eta2 final < 0.05", final2 < 0.05, "final " + fmt(final2, 3));

    const auto eta1 = diag::consistency_sweep(model, kMa2Truth, stats::StatisticSet::named("eta1"), sizes, 0.1, figure_config());
    const auto& last = eta1.rows.back();
    r.add("eta1 final > 0.2", last.probability > 0.2, "final " + fmt(last.probability, 3));
    std::size_t near = 0;
    for (const auto& a : last.posterior.accepted) near += near_point(a.theta, kSpurious, 0.05) ? 1 : 0;
    const double frac = double(near) / double(last.posterior.size());
    r.add("eta1 mass near spurious root >= 10%", frac >= 0.10, fmt(100.0 * frac, 3) + "%");
    return r.done();
}

diag::AugmentationReport augment(std::vector<const char*> names) {
    diag::AugmentationPlan plan;
    plan.theta0 = kMa2Truth;
    plan.length = 5000;
    plan.config = figure_config();
    plan.threshold = 3.0;
    for (const char* n : names) plan.sets.push_back(stats::StatisticSet::named(n));
    return diag::run_augmentation_sequence(plan);
}

std::string jumps(const diag::AugmentationReport& rep) {
    std::string s;
    for (std::size_t k = 1; k < rep.steps.size(); ++k) {
        s += (k > 1 ? ", " : "") + rep.steps[k - 1].set_name + "->" + rep.steps[k].set_name + " " +
             fmt(*rep.steps[k].jump_metric, 3) + (rep.steps[k].jump_flag ? "*" : "");
    }
    return s;
}

Outcome criterion5() {
    Report r;
    const auto fig2 = augment({"eta1", "eta2", "eta3", "eta4", "eta5"});
    bool only_first = fig2.steps[1].jump_flag;
    for (std::size_t k = 2; k < fig2.steps.size(); ++k) only_first = only_first && !fig2.steps[k].jump_flag;
    r.add("plan eta1..eta5 flags only eta1->eta2", only_first, jumps(fig2));
    const auto fig5 = augment({"eta1", "eta6", "eta7", "eta8"});
    r.add("plan eta1,eta6,eta7,eta8 flags eta7->eta8", fig5.steps.back().jump_flag, jumps(fig5));
    return r.done();
}

Outcome criterion6() {
    Report r;
    ModelSpec ma2;
    const auto pts = binding::region_grid(binding::Region::ma2_triangle(), 28);
    const auto v = binding::verify_one_to_one(ma2, stats::StatisticSet::named("eta1"), pts, 1000000, 1e-3, 0.07, 7);
    bool witness_ok = false;
    std::string wdesc = "no witness";
    if (v.witness) {
        // The exact partner of theta_a under the analytic binding.
        const auto b = binding::BindingFunction::ma2_acov(1);
        const auto pre = binding::solve_preimage(b, b(v.witness->theta_a.values), binding::Region::ma2_triangle());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : pre.solutions) {
            if (distance(s, v.witness->theta_a) > 1e-6) best = std::min(best, distance(s, v.witness->theta_b));
        }
        witness_ok = best <= 0.05;
        wdesc = point(v.witness->theta_a) + " / " + point(v.witness->theta_b) + ", true partner at distance " + fmt(best, 3);
    }
    r.add("MA(2)/eta1 non-injective", !v.injective && witness_ok,
          "K*=" + std::to_string(pts.size()) + ", " + std::to_string(v.collisions) + " collisions, witness " + wdesc);

    ModelSpec ar1;
    ar1.model = Model::ar1;
    std::vector<ParameterVector> line;
    for (int i = 0; i < 50; ++i) line.emplace_back(Model::ar1, std::vector<double>{-0.95 + 1.9 * i / 49.0});
    const auto a = binding::verify_one_to_one(ar1, stats::StatisticSet::named("acov1"), line, 1000000, 1e-3, 0.03, 7);
    r.add("AR(1)/acov1 injective", a.injective, "K*=50, " + std::to_string(a.collisions) + " collisions");
    return r.done();
}

Outcome criterion7() {
    Report r;
    const ParameterVector truth(Model::lv, {1.0, 1.0});
    abc::AbcConfig cfg;
    cfg.n_draws = 10000;
    cfg.tolerance = abc::Tolerance::quantile(0.01);
    cfg.seed = 11;

    ModelSpec det;
    det.model = Model::lv;
    det.lv_mode = LvMode::deterministic;
    ModelSpec noisy = det;
    noisy.lv_mode = LvMode::noise_matched;
    const auto y = diag::observed_series(noisy, truth, det.lv.n_points, cfg.seed);
    const auto post = abc::run_rejection_abc(y, det, abc::Discrepancy::lv_raw_path(), cfg);
    double min_d = std::numeric_limits<double>::infinity();
    for (const auto& a : post.accepted) min_d = std::min(min_d, a.distance);
    // E = s1^2 + s2^2, Var(nu1^2 + nu2^2) = 2 s1^4 + 2 s2^4; three standard errors below the mean.
    const double v1 = det.lv.noise_sd[0] * det.lv.noise_sd[0], v2 = det.lv.noise_sd[1] * det.lv.noise_sd[1];
    const double floor = v1 + v2 - 3.0 * std::sqrt(2.0 * v1 * v1 + 2.0 * v2 * v2) / std::sqrt(double(det.lv.n_points));
    abc::AbcConfig at_floor = cfg;
    at_floor.tolerance = abc::Tolerance::absolute(floor);
    const auto none = abc::run_rejection_abc(y, det, abc::Discrepancy::lv_raw_path(), at_floor);
    r.add("deterministic min distance above floor", min_d > floor && none.no_acceptances,
          "min " + fmt(min_d) + " vs floor " + fmt(floor) + ", " + std::to_string(none.size()) + " accepted at the floor");

    ModelSpec matched = noisy;
    matched.lv = matched.lv.with_points(2000);
    const auto y2 = diag::observed_series(matched, truth, 2000, cfg.seed);
    const auto p2 = abc::run_rejection_abc(y2, matched, abc::Discrepancy::on_statistics(stats::StatisticSet::named("lv_ols")), cfg);
    const auto s = abc::posterior_summaries(p2);
    const double err = std::max(std::abs(s.mean[0] - 1.0), std::abs(s.mean[1] - 1.0));
    r.add("noise-matched mean within 0.1 of (1,1)", err < 0.1, "mean (" + fmt(s.mean[0]) + ", " + fmt(s.mean[1]) + ")");
    return r.done();
}

Outcome criterion8() {
    Report r;
    gauss::SweepOptions o;
    o.theta0 = 0.0;
    o.delta = 0.1;
    o.seed = kSeed;
    const std::vector<double> eps{0.1, 0.03, 0.01, 0.003, 0.001};
    const std::vector<double> T{100, 1000, 10000, 100000, 1000000};
    for (auto order : {gauss::LimitOrder::eps_then_T, gauss::LimitOrder::T_then_eps}) {
        const auto t = gauss::sequential_limit_sweep(order, o, eps, T);
        r.add(std::string(gauss::to_string(order)) + " corner below 1e-3",
              t.corner_below_threshold && t.corner.T == 1e6 && t.corner.epsilon == 1e-3,
              "erf form " + fmt(t.corner.prob_erf, 3) + ", oracle " + fmt(t.corner.prob_oracle, 3));
    }
    double worst = 0.0;
    for (double Ti : T) {
        for (double eta : {-0.05, 0.0, 0.02}) {
            const gauss::TailQuery q{o.theta0, o.delta, eta, Ti, 0.0};
            const auto [x1, x2] = gauss::x_terms(q);
            const double m = eta / (1.0 / Ti + 1.0);
            const double r1 = std::sqrt(Ti + 1.0) * (o.delta - o.theta0 + m);
            const double r2 = std::sqrt(Ti + 1.0) * (o.delta + o.theta0 - m);
            worst = std::max({worst, std::abs(x1 - r1) / std::max(1.0, std::abs(r1)),
                              std::abs(x2 - r2) / std::max(1.0, std::abs(r2))});
        }
    }
    r.add("eps=0 reduction", worst <= 1e-12, "max relative error " + fmt(worst, 3));
    return r.done();
}

std::set<std::size_t> accepted_indices(const abc::Posterior& p) {
    std::set<std::size_t> s;
    for (const auto& a : p.accepted) s.insert(a.index);
    return s;
}

Outcome criterion9() {
    Report r;
    rng::Stream s(kSeed, rng::Purpose::prior, 999);
    const ModelSpec ma2;
    const auto y = diag::observed_series(ma2, kMa2Truth, 500, kSeed);
    const auto disc = abc::Discrepancy::on_statistics(stats::StatisticSet::named("eta2"));

    {
        abc::AbcConfig c;
        c.n_draws = 4000;
        c.seed = kSeed;
        bool ok = true;
        std::set<std::size_t> prev;
        for (double e : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            c.tolerance = abc::Tolerance::absolute(e);
            const auto cur = accepted_indices(abc::run_rejection_abc(y, ma2, disc, c));
            ok = ok && std::ranges::includes(cur, prev);
            prev = cur;
        }
        r.add("monotone in epsilon", ok, "5 tolerances, N=4000");
    }
    {
        bool ok = true;
        std::size_t checks = 0;
        for (std::size_t n : {1u, 3u, 100u, 997u, 4000u}) {
            std::vector<double> d(n);
            std::vector<ParameterVector> th(n, kMa2Truth);
            for (auto& x : d) x = std::abs(s.normal());
            for (double q : {0.001, 0.01, 0.05, 0.1, 0.37, 0.9}) {
                const auto p = abc::accept(th, d, abc::Tolerance::quantile(q));
                const auto want = std::max<std::size_t>(1, std::size_t(std::ceil(q * double(n) - 1e-9)));
                ok = ok && p.size() == want;
                ++checks;
            }
        }
        r.add("exact ceil(qN) count", ok, std::to_string(checks) + " (N, q) pairs");
    }
    {
        abc::AbcConfig c;
        c.n_draws = 3000;
        c.tolerance = abc::Tolerance::quantile(0.02);
        c.seed = kSeed;
        const auto a = abc::run_rejection_abc(y, ma2, disc, c);
        c.workers = 4;
        const auto b = abc::run_rejection_abc(y, ma2, disc, c);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a.accepted[i].index == b.accepted[i].index && a.accepted[i].distance == b.accepted[i].distance;
        r.add("worker-count invariance", same, "1 vs 4 workers");
    }
    {
        bool ok = true;
        const std::vector<abc::DistanceSpec> specs{abc::DistanceSpec::euclidean(),
                                                   abc::DistanceSpec::diag_variance_weighted({0.5, 1.5, 2.0}),
                                                   abc::DistanceSpec::covariance_weighted({2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 0.5})};
        for (const auto& spec : specs) {
            for (int k = 0; k < 300; ++k) {
                std::vector<double> x(3), yv(3), z(3);
                for (std::size_t j = 0; j < 3; ++j) {
                    x[j] = s.normal();
                    yv[j] = s.normal();
                    z[j] = s.normal();
                }
                const double dxy = abc::compute_distance(spec, x, yv);
                ok = ok && abc::compute_distance(spec, x, x) == 0.0 && dxy > 0.0 &&
                     std::abs(dxy - abc::compute_distance(spec, yv, x)) <= 1e-12 &&
                     abc::compute_distance(spec, x, z) <= dxy + abc::compute_distance(spec, yv, z) + 1e-12;
            }
        }
        r.add("metric axioms", ok, "900 triples over 3 distances");
    }
    {
        struct Case {
            Model model;
            const char* set;
        };
        bool ok = true;
        std::string worst;
        for (const Case c : {Case{Model::ar1, "acov1"}, Case{Model::ma2, "eta1"}, Case{Model::ma2, "eta2"},
                             Case{Model::ma2, "ols_ar2"}}) {
            ModelSpec m;
            m.model = c.model;
            const auto set = stats::StatisticSet::named(c.set);
            const auto b = binding::BindingFunction::for_statistics(c.model, set);
            double max_ratio = 0.0;
            for (std::uint64_t k = 0; k < 20; ++k) {
                std::vector<double> th;
                if (c.model == Model::ar1) {
                    th = {1.8 * s.uniform() - 0.9};
                } else {
                    do {
                        th = {3.6 * s.uniform() - 1.8, 1.8 * s.uniform() - 0.9};
                    } while (!ma2_in_triangle(th[0] * 1.1, th[1] * 1.1 + 0.05) || !ma2_in_triangle(th[0] * 1.1, th[1] - 0.1));
                }
                const auto sim = binding::simulate_binding(m, ParameterVector(c.model, th), set, 1000000, kSeed, k);
                const auto exact = b(th);
                double d2 = 0.0, se2 = 0.0;
                for (std::size_t j = 0; j < exact.size(); ++j) {
                    d2 += std::pow(sim.summary.values[j] - exact[j], 2);
                    se2 += sim.std_error[j] * sim.std_error[j];
                }
                max_ratio = std::max(max_ratio, std::sqrt(d2 / se2));
            }
            ok = ok && max_ratio <= 3.0;
            worst += (worst.empty() ? "" : ", ") + b.name() + " max " + fmt(max_ratio, 3) + " SE";
        }
        r.add("simulated vs analytic binding", ok, worst);
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            std::vector<double> series(30 + k);
            for (auto& v : series) v = s.normal();
            const std::array<double, 2> beta{2.0 * s.uniform() - 1.0, 2.0 * s.uniform() - 1.0};
            const auto g = stats::ols_ar2_criterion_gradient(series, beta);
            const double h = 1e-4;
            const double f0 = (stats::ols_ar2_criterion(series, {beta[0] + h, beta[1]}) -
                               stats::ols_ar2_criterion(series, {beta[0] - h, beta[1]})) / (2 * h);
            const double f1 = (stats::ols_ar2_criterion(series, {beta[0], beta[1] + h}) -
                               stats::ols_ar2_criterion(series, {beta[0], beta[1] - h})) / (2 * h);
            const double scale = std::max({std::abs(g[0]), std::abs(g[1]), 1.0});
            worst = std::max({worst, std::abs(g[0] - f0) / scale, std::abs(g[1] - f1) / scale});
        }
        r.add("OLS gradient vs finite differences", worst < 1e-6, "max relative error " + fmt(worst, 3));
    }
    {
        const LvConfig base;
        auto half = base, fine = base;
        half.step = base.step / 2.0;
        fine.step = base.step / 16.0;
        const auto ref = integrate_lv(fine);
        const auto dev = [&](const TimeSeries& a) {
            double m = 0.0;
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t i = 0; i < a.length(); ++i)
                    m = std::max(m, std::abs(a.coordinate(j)[i] - ref.coordinate(j)[i]));
            return m;
        };
        const double ratio = dev(integrate_lv(base)) / dev(integrate_lv(half));
        r.add("RK4 order-4 self-convergence", ratio >= 12.0, "halving the step cuts the error by " + fmt(ratio, 3));
    }
    {
        double worst = 0.0;
        for (std::size_t n : {2u, 50u, 5000u}) {
            std::vector<double> v(n);
            for (auto& x : v) x = s.normal() * 0.3 + 1.0;
            const auto e = abc::kde(v);
            worst = std::max(worst, std::abs(abc::trapezoid(e.grid, e.density) - 1.0));
        }
        r.add("KDE normalization", worst <= 1e-6, "max |integral - 1| " + fmt(worst, 3));
    }
    return r.done();
}

} // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << " [" << fmt(secs, 3) << " s] "
                  << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << " of " << criteria.size() << " criteria pass" << std::endl;
    return strict && failed ? 1 : 0;
}
