#include "abcid/binding.hpp"

#include "abcid/error.hpp"
#include "abcid/parallel.hpp"
#include "abcid/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace abcid::binding {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double ma2_component(Ma2Component c, double t1, double t2) {
    switch (c) {
    case Ma2Component::acov0: return 1.0 + t1 * t1 + t2 * t2;
    case Ma2Component::acov1: return t1 * (1.0 + t2);
    case Ma2Component::acov2: return t2;
    case Ma2Component::acov3:
    case Ma2Component::mean:
    case Ma2Component::third: return 0.0;
    }
    return kNaN;
}

std::array<double, 2> ols_formula(double t1, double t2) {
    const double g0 = 1.0 + t1 * t1 + t2 * t2;
    const double g1 = t1 * (1.0 + t2);
    const double g2 = t2;
    const double den = g0 - g1 * g1 / g0;
    if (!(std::abs(den) > 1e-14 * g0)) {
        return {kNaN, kNaN};
    }
    const double b1 = (g1 - g1 * g2 / g0) / den;
    const double b2 = g2 / g0 - (g1 / g0) * b1;
    return {b1, b2};
}

Model region_model(const Region& r) { return r.rule == Region::Rule::ar1 ? Model::ar1 : Model::ma2; }

enum class RefineStatus { converged, stagnated, max_iterations };

struct RefineOutcome {
    RefineStatus status;
    std::vector<double> x;
};

double residual(const BindingFunction& b, std::span<const double> target, std::span<const double> x) {
    const auto v = b.formula(x);
    const double r = norm_diff(v, target);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

RefineOutcome gauss_newton(const BindingFunction& b, std::span<const double> target, std::vector<double> x,
                           const PreimageOptions& opt) {
    const std::size_t n = x.size();
    const std::size_t m = target.size();
    double r = residual(b, target, x);
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        if (r <= opt.tolerance) {
            return {RefineStatus::converged, x};
        }
        if (!std::isfinite(r)) {
            return {RefineStatus::stagnated, x};
        }
        const auto fx = b.formula(x);
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            auto xp = x;
            auto xm = x;
            xp[j] += h;
            xm[j] -= h;
            const auto fp = b.formula(xp);
            const auto fm = b.formula(xm);
            for (std::size_t i = 0; i < m; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) rhs(static_cast<Eigen::Index>(i)) = target[i] - fx[i];
        if (!jac.allFinite()) {
            return {RefineStatus::stagnated, x};
        }
        const Eigen::VectorXd dx = jac.colPivHouseholderQr().solve(rhs);
        if (!dx.allFinite()) {
            return {RefineStatus::stagnated, x};
        }
        bool moved = false;
        double lambda = 1.0;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            std::vector<double> xn(n);
            for (std::size_t j = 0; j < n; ++j) xn[j] = x[j] + lambda * dx(static_cast<Eigen::Index>(j));
            const double rn = residual(b, target, xn);
            if (rn < r) {
                x = std::move(xn);
                r = rn;
                moved = true;
                break;
            }
        }
        if (!moved) {
            return {r <= opt.tolerance ? RefineStatus::converged : RefineStatus::stagnated, x};
        }
    }
    return {r <= opt.tolerance ? RefineStatus::converged : RefineStatus::max_iterations, x};
}

void dedupe(std::vector<std::vector<double>>& roots, double tol) {
    std::sort(roots.begin(), roots.end());
    std::vector<std::vector<double>> out;
    for (auto& r : roots) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const auto& o) { return norm_diff(o, r) < tol; });
        if (!seen) out.push_back(std::move(r));
    }
    roots = std::move(out);
}

/// Real roots of a monic quartic x^4 + c2 x^2 + c1 x + c0, Newton-polished.
std::vector<double> quartic_real_roots(double c2, double c1, double c0) {
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(3, 2) = 1.0;
    companion(0, 3) = -c0;
    companion(1, 3) = -c1;
    companion(2, 3) = -c2;
    companion(3, 3) = 0.0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(companion, false);
    const auto p = [&](double x) { return ((x * x + c2) * x + c1) * x + c0; };
    const auto dp = [&](double x) { return (4.0 * x * x + 2.0 * c2) * x + c1; };
    std::vector<double> roots;
    for (int i = 0; i < 4; ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
        double x = z.real();
        for (int k = 0; k < 60; ++k) {
            const double d = dp(x);
            if (d == 0.0) break;
            const double step = p(x) / d;
            const double xn = x - step;
            if (std::abs(p(xn)) >= std::abs(p(x)) && std::abs(step) < 1e-12 * std::max(1.0, std::abs(x))) break;
            x = xn;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        roots.push_back(x);
    }
    return roots;
}

std::vector<std::vector<double>> ma2_analytic_roots(const std::vector<Ma2Component>& comps,
                                                    std::span<const double> target) {
    const auto find = [&](Ma2Component c) -> std::optional<double> {
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (comps[i] == c) return target[i];
        }
        return std::nullopt;
    };
    const auto g0 = find(Ma2Component::acov0);
    const auto g1 = find(Ma2Component::acov1);
    const auto g2 = find(Ma2Component::acov2);

    std::vector<std::vector<double>> roots;
    if (g2) {
        const double t2 = *g2;
        if (g1 && std::abs(1.0 + t2) > 1e-12) {
            roots.push_back({*g1 / (1.0 + t2), t2});
        } else if (g0) {
            const double r = *g0 - 1.0 - t2 * t2;
            if (r >= 0.0) {
                roots.push_back({std::sqrt(r), t2});
                roots.push_back({-std::sqrt(r), t2});
            }
        } else {
            throw DomainError("MA(2) binding with these components does not pin down theta1");
        }
    } else if (g0 && g1) {
        // Substituting t2 = g1/t1 - 1 into the acov0 equation gives
        // t1^4 + (2 - g0) t1^2 - 2 g1 t1 + g1^2 = 0.
        for (double t1 : quartic_real_roots(2.0 - *g0, -2.0 * *g1, *g1 * *g1)) {
            if (std::abs(t1) > 1e-12) roots.push_back({t1, *g1 / t1 - 1.0});
        }
        if (std::abs(*g1) <= 1e-14 && *g0 >= 1.0) {
            roots.push_back({0.0, std::sqrt(*g0 - 1.0)});
            roots.push_back({0.0, -std::sqrt(*g0 - 1.0)});
        }
    } else {
        throw DomainError("MA(2) binding with these components has a continuum of preimages");
    }
    return roots;
}

std::vector<std::vector<double>> grid_roots(const BindingFunction& b, std::span<const double> target, const Region& region,
                                            const PreimageOptions& opt, std::vector<std::vector<double>>& suspect) {
    const std::size_t d = region.dimension();
    const std::size_t n = opt.grid;
    if (n < 3) {
        throw std::invalid_argument("preimage grid needs at least 3 points per dimension");
    }
    const std::size_t cells = d == 1 ? n : n * n;
    std::vector<double> h(d);
    for (std::size_t k = 0; k < d; ++k) h[k] = (region.hi[k] - region.lo[k]) / static_cast<double>(n);
    const auto point = [&](std::size_t c) {
        std::vector<double> x(d);
        std::size_t idx[2] = {c % n, c / n};
        for (std::size_t k = 0; k < d; ++k) x[k] = region.lo[k] + (static_cast<double>(idx[k]) + 0.5) * h[k];
        return x;
    };
    std::vector<double> res(cells);
    parallel_for(cells, opt.workers, [&](std::size_t c) { res[c] = residual(b, target, point(c)); });

    std::vector<std::size_t> minima;
    for (std::size_t c = 0; c < cells; ++c) {
        if (!(res[c] < opt.coarse_threshold)) continue;
        const long i = static_cast<long>(c % n);
        const long j = static_cast<long>(c / n);
        bool is_min = true;
        for (long dj = (d == 2 ? -1 : 0); dj <= (d == 2 ? 1 : 0) && is_min; ++dj) {
            for (long di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const long ii = i + di;
                const long jj = j + dj;
                if (ii < 0 || jj < 0 || ii >= static_cast<long>(n) || jj >= static_cast<long>(n)) continue;
                if (res[static_cast<std::size_t>(jj) * n + static_cast<std::size_t>(ii)] < res[c]) {
                    is_min = false;
                    break;
                }
            }
        }
        if (is_min) minima.push_back(c);
    }

    std::vector<RefineOutcome> outcomes(minima.size());
    parallel_for(minima.size(), opt.workers,
                 [&](std::size_t k) { outcomes[k] = gauss_newton(b, target, point(minima[k]), opt); });
    std::vector<std::vector<double>> roots;
    for (auto& o : outcomes) {
        if (o.status == RefineStatus::converged) {
            roots.push_back(std::move(o.x));
        } else if (o.status == RefineStatus::max_iterations) {
            suspect.push_back(std::move(o.x));
        }
    }
    return roots;
}

} // namespace

std::string_view to_string(Ma2Component c) {
    switch (c) {
    case Ma2Component::acov0: return "acov0";
    case Ma2Component::acov1: return "acov1";
    case Ma2Component::acov2: return "acov2";
    case Ma2Component::acov3: return "acov3";
    case Ma2Component::mean: return "mean";
    case Ma2Component::third: return "third";
    }
    return "unknown";
}

double binding_ar1_acov1(double theta) {
    if (!(std::abs(theta) < 1.0)) {
        throw DomainError("AR(1) binding needs |theta| < 1");
    }
    return theta / (1.0 - theta * theta);
}

std::vector<double> binding_ma2(std::array<double, 2> theta, std::span<const Ma2Component> components) {
    if (!ma2_in_triangle(theta[0], theta[1])) {
        throw DomainError("MA(2) binding needs theta inside the invertibility triangle");
    }
    std::vector<double> out;
    out.reserve(components.size());
    for (auto c : components) out.push_back(ma2_component(c, theta[0], theta[1]));
    return out;
}

std::array<double, 2> binding_ols_ar2_on_ma2(std::array<double, 2> theta) {
    if (!ma2_satisfies_constraints(theta[0], theta[1])) {
        throw DomainError("OLS binding needs theta inside the MA(2) constraint set");
    }
    const auto beta = ols_formula(theta[0], theta[1]);
    if (!std::isfinite(beta[0]) || !std::isfinite(beta[1])) {
        throw DomainError("OLS binding: singular AR(2) design at this theta");
    }
    return beta;
}

BindingFunction::BindingFunction(Kind kind, std::vector<Ma2Component> components)
    : kind_(kind), components_(std::move(components)) {}

BindingFunction BindingFunction::ar1_acov1() { return {Kind::ar1_acov1, {}}; }

BindingFunction BindingFunction::ma2(std::vector<Ma2Component> components) {
    if (components.empty()) {
        throw std::invalid_argument("MA(2) binding needs at least one component");
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (std::size_t j = i + 1; j < components.size(); ++j) {
            if (components[i] == components[j]) {
                throw std::invalid_argument("MA(2) binding lists a component twice");
            }
        }
    }
    return {Kind::ma2, std::move(components)};
}

BindingFunction BindingFunction::ma2_acov(int max_lag) {
    if (max_lag < 0 || max_lag > 3) {
        throw std::invalid_argument("MA(2) autocovariance bindings cover lags 0..3");
    }
    std::vector<Ma2Component> c;
    for (int j = 0; j <= max_lag; ++j) c.push_back(static_cast<Ma2Component>(j));
    return ma2(std::move(c));
}

BindingFunction BindingFunction::ols_ar2_on_ma2() { return {Kind::ols_ar2_on_ma2, {}}; }

BindingFunction BindingFunction::for_statistics(Model model, const stats::StatisticSet& set) {
    using stats::StatKind;
    const auto& ds = set.descriptors();
    if (model == Model::ar1) {
        if (ds.size() == 1 && ds[0] == stats::StatisticDescriptor::autocov(1)) return ar1_acov1();
        throw DomainError("no analytic AR(1) binding for statistic set " + set.name());
    }
    if (model != Model::ma2) {
        throw DomainError("no analytic binding for model " + std::string(to_string(model)));
    }
    if (ds.size() == 1 && ds[0].kind == StatKind::ols_ar2) return ols_ar2_on_ma2();
    std::vector<Ma2Component> comps;
    for (const auto& d : ds) {
        switch (d.kind) {
        case StatKind::autocov:
            if (d.param > 3) throw DomainError("MA(2) bindings cover autocovariance lags 0..3");
            comps.push_back(static_cast<Ma2Component>(d.param));
            break;
        case StatKind::mean: comps.push_back(Ma2Component::mean); break;
        case StatKind::third_moment: comps.push_back(Ma2Component::third); break;
        default: throw DomainError("no analytic MA(2) binding for statistic " + d.name());
        }
    }
    return ma2(std::move(comps));
}

std::size_t BindingFunction::output_dimension() const noexcept {
    switch (kind_) {
    case Kind::ar1_acov1: return 1;
    case Kind::ma2: return components_.size();
    case Kind::ols_ar2_on_ma2: return 2;
    }
    return 0;
}

std::string BindingFunction::name() const {
    switch (kind_) {
    case Kind::ar1_acov1: return "ar1_acov1";
    case Kind::ols_ar2_on_ma2: return "ols_ar2_on_ma2";
    case Kind::ma2: {
        std::string s = "ma2(";
        for (std::size_t i = 0; i < components_.size(); ++i) {
            if (i) s += ',';
            s += to_string(components_[i]);
        }
        return s + ")";
    }
    }
    return "unknown";
}

std::vector<double> BindingFunction::formula(std::span<const double> theta) const {
    if (theta.size() != parameter_dimension()) {
        throw DimensionError("binding " + name() + " takes " + std::to_string(parameter_dimension()) + " parameters");
    }
    switch (kind_) {
    case Kind::ar1_acov1: return {theta[0] / (1.0 - theta[0] * theta[0])};
    case Kind::ma2: {
        std::vector<double> out;
        out.reserve(components_.size());
        for (auto c : components_) out.push_back(ma2_component(c, theta[0], theta[1]));
        return out;
    }
    case Kind::ols_ar2_on_ma2: {
        const auto b = ols_formula(theta[0], theta[1]);
        return {b[0], b[1]};
    }
    }
    return {};
}

std::vector<double> BindingFunction::operator()(std::span<const double> theta) const {
    if (theta.size() != parameter_dimension()) {
        throw DimensionError("binding " + name() + " takes " + std::to_string(parameter_dimension()) + " parameters");
    }
    switch (kind_) {
    case Kind::ar1_acov1: return {binding_ar1_acov1(theta[0])};
    case Kind::ma2: return binding_ma2({theta[0], theta[1]}, components_);
    case Kind::ols_ar2_on_ma2: {
        const auto b = binding_ols_ar2_on_ma2({theta[0], theta[1]});
        return {b[0], b[1]};
    }
    }
    return {};
}

Region Region::ar1(double bound) {
    if (!(bound > 0.0 && bound < 1.0)) {
        throw std::invalid_argument("AR(1) region bound must lie in (0, 1)");
    }
    return {Rule::ar1, {-bound}, {bound}};
}

Region Region::ma2_triangle() { return {Rule::ma2_triangle, {-2.0, -1.0}, {2.0, 1.0}}; }

Region Region::ma2_constraints(double theta2_max) {
    if (!(theta2_max > 1.0)) {
        throw std::invalid_argument("extended MA(2) region needs theta2_max > 1");
    }
    return {Rule::ma2_constraints, {-2.0, -1.0}, {2.0, theta2_max}};
}

Region Region::default_for(const BindingFunction& binding) {
    switch (binding.kind()) {
    case BindingFunction::Kind::ar1_acov1: return ar1();
    case BindingFunction::Kind::ols_ar2_on_ma2: return ma2_constraints();
    case BindingFunction::Kind::ma2: return ma2_triangle();
    }
    return ma2_triangle();
}

bool Region::in_box(std::span<const double> theta) const {
    if (theta.size() != lo.size()) return false;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        if (!(theta[k] > lo[k] && theta[k] < hi[k])) return false;
    }
    return true;
}

bool Region::feasible(std::span<const double> theta) const {
    if (theta.size() != lo.size()) return false;
    switch (rule) {
    case Rule::ar1: return in_box(theta);
    case Rule::ma2_triangle: return ma2_in_triangle(theta[0], theta[1]);
    case Rule::ma2_constraints: return ma2_satisfies_constraints(theta[0], theta[1]);
    }
    return false;
}

std::string Region::name() const {
    switch (rule) {
    case Rule::ar1: return "ar1";
    case Rule::ma2_triangle: return "ma2_triangle";
    case Rule::ma2_constraints: return "ma2_constraints";
    }
    return "unknown";
}

std::string_view to_string(PreimageResult::Method method) {
    return method == PreimageResult::Method::analytic_polynomial ? "analytic_polynomial" : "grid_refine";
}

std::optional<std::vector<double>> refine_root(const BindingFunction& binding, std::span<const double> target,
                                               std::vector<double> start, const PreimageOptions& options) {
    if (target.size() != binding.output_dimension() || start.size() != binding.parameter_dimension()) {
        throw DimensionError("refine_root: operand sizes do not match the binding");
    }
    auto out = gauss_newton(binding, target, std::move(start), options);
    if (out.status != RefineStatus::converged) return std::nullopt;
    return out.x;
}

PreimageResult solve_preimage(const BindingFunction& binding, std::span<const double> target, const Region& region,
                              const PreimageOptions& options) {
    if (target.size() != binding.output_dimension()) {
        throw DimensionError("preimage target has the wrong dimension for " + binding.name());
    }
    if (region.dimension() != binding.parameter_dimension()) {
        throw DimensionError("region dimension does not match the binding");
    }
    for (double v : target) {
        if (!std::isfinite(v)) throw std::invalid_argument("preimage target must be finite");
    }
    PreimageResult result;
    result.target.assign(target.begin(), target.end());

    std::vector<std::vector<double>> roots;
    std::vector<std::vector<double>> suspect;
    const bool analytic = !options.force_grid && binding.kind() != BindingFunction::Kind::ols_ar2_on_ma2;
    if (analytic && binding.kind() == BindingFunction::Kind::ar1_acov1) {
        const double b = target[0];
        if (b == 0.0) {
            roots.push_back({0.0});
        } else {
            // b t^2 + t - b = 0; the product of the roots is -1.
            const double q = -0.5 * (1.0 + std::copysign(std::sqrt(1.0 + 4.0 * b * b), b));
            roots.push_back({q / b});
            roots.push_back({-b / q});
        }
    } else if (analytic) {
        roots = ma2_analytic_roots(binding.components(), target);
    } else {
        roots = grid_roots(binding, target, region, options, suspect);
    }
    result.method = analytic ? PreimageResult::Method::analytic_polynomial : PreimageResult::Method::grid_refine;

    // Keep genuine roots only; an overdetermined target may admit none.
    std::erase_if(roots, [&](const auto& r) { return !(residual(binding, target, r) <= 1e-8); });
    dedupe(roots, options.dedupe);
    dedupe(suspect, options.dedupe);
    const Model model = region_model(region);
    for (auto& r : roots) {
        (region.feasible(r) ? result.solutions : result.infeasible_solutions).emplace_back(model, std::move(r));
    }
    for (auto& s : suspect) result.suspect.emplace_back(model, std::move(s));
    return result;
}

std::vector<ParameterVector> region_grid(const Region& region, std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("grid needs at least one point per dimension");
    }
    const std::size_t d = region.dimension();
    const Model model = region_model(region);
    std::vector<ParameterVector> pts;
    const std::size_t total = d == 1 ? n : n * n;
    for (std::size_t c = 0; c < total; ++c) {
        std::vector<double> x(d);
        const std::size_t idx[2] = {c % n, c / n};
        for (std::size_t k = 0; k < d; ++k) {
            const double h = (region.hi[k] - region.lo[k]) / static_cast<double>(n);
            x[k] = region.lo[k] + (static_cast<double>(idx[k]) + 0.5) * h;
        }
        if (region.feasible(x) && region.in_box(x)) pts.emplace_back(model, std::move(x));
    }
    return pts;
}

InjectivityVerdict check_injectivity_analytic(const BindingFunction& binding, const Region& region, double rho_min,
                                              double tau, const InjectivityOptions& options) {
    if (!(rho_min > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("injectivity check needs rho_min > 0 and tau > 0");
    }
    if (region.dimension() != binding.parameter_dimension()) {
        throw DimensionError("region dimension does not match the binding");
    }
    InjectivityVerdict verdict;
    verdict.rho_min = rho_min;
    verdict.tau = tau;
    const auto pts = region_grid(region, options.points_per_dimension);
    verdict.grid_points = pts.size();
    std::vector<std::vector<double>> vals(pts.size());
    parallel_for(pts.size(), options.workers, [&](std::size_t i) { vals[i] = binding.formula(pts[i].values); });

    // Bucket b-values on a tau lattice over at most two output coordinates;
    // any pair within tau sits in neighbouring buckets.
    const std::size_t hd = std::min<std::size_t>(2, binding.output_dimension());
    const auto key_of = [&](long a, long b) { return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint32_t>(b); };
    const auto cell = [&](double v) { return static_cast<long>(std::floor(v / tau)); };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!std::isfinite(vals[i][0]) || (hd == 2 && !std::isfinite(vals[i][1]))) continue;
        buckets[key_of(cell(vals[i][0]), hd == 2 ? cell(vals[i][1]) : 0)].push_back(i);
    }

    struct Candidate {
        std::size_t a, b;
        double bd;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!std::isfinite(vals[i][0]) || (hd == 2 && !std::isfinite(vals[i][1]))) continue;
        const long c0 = cell(vals[i][0]);
        const long c1 = hd == 2 ? cell(vals[i][1]) : 0;
        for (long d0 = -1; d0 <= 1; ++d0) {
            for (long d1 = (hd == 2 ? -1 : 0); d1 <= (hd == 2 ? 1 : 0); ++d1) {
                const auto it = buckets.find(key_of(c0 + d0, c1 + d1));
                if (it == buckets.end()) continue;
                for (std::size_t j : it->second) {
                    if (j <= i) continue;
                    if (distance(pts[i], pts[j]) < rho_min) continue;
                    const double bd = norm_diff(vals[i], vals[j]);
                    if (bd <= tau) candidates.push_back({i, j, bd});
                }
            }
        }
    }
    verdict.candidate_pairs = candidates.size();
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        return x.bd < y.bd || (x.bd == y.bd && (x.a < y.a || (x.a == y.a && x.b < y.b)));
    });

    const auto accept_partner = [&](const ParameterVector& a, const std::vector<double>& target,
                                    const std::vector<double>& partner) {
        if (!region.feasible(partner)) return false;
        if (norm_diff(a.values, partner) < rho_min) return false;
        return residual(binding, target, partner) <= 1e-8;
    };
    for (const auto& c : candidates) {
        const auto& a = pts[c.a];
        const auto target = binding.formula(a.values);
        std::optional<std::vector<double>> partner;
        if (auto r = refine_root(binding, target, pts[c.b].values); r && accept_partner(a, target, *r)) {
            partner = std::move(r);
        } else {
            const auto pre = solve_preimage(binding, target, region);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : pre.solutions) {
                if (!accept_partner(a, target, s.values)) continue;
                const double d = norm_diff(s.values, pts[c.b].values);
                if (d < best) {
                    best = d;
                    partner = s.values;
                }
            }
        }
        if (partner) {
            verdict.injective = false;
            ParameterVector b(a.model, *partner);
            verdict.witness = CollisionWitness{a, b, distance(a, b), norm_diff(target, binding.formula(b.values))};
            break;
        }
    }
    return verdict;
}

SimulatedBinding simulate_binding(const ModelSpec& model, const ParameterVector& theta, const stats::StatisticSet& set,
                                  std::size_t t_star, std::uint64_t seed, std::uint64_t stream) {
    if (model.model != Model::lv && t_star < 10000) {
        throw std::invalid_argument("simulate_binding needs t_star >= 10^4");
    }
    const std::uint64_t sub_seed = rng::derive_seed(seed, rng::Purpose::binding, stream);
    const TimeSeries z = model.simulate(theta, t_star, sub_seed, 0);

    SimulatedBinding out;
    out.summary = stats::evaluate_statistic_set(set, z);
    const std::size_t p = out.summary.values.size();
    out.std_error.assign(p, 0.0);
    if (model.deterministic()) {
        return out;
    }
    constexpr std::size_t batches = 50;
    const std::size_t len = z.length() / batches;
    if (len < set.min_length()) {
        throw std::invalid_argument("series too short for 50 batches of this statistic set");
    }
    std::vector<double> mean(p, 0.0);
    std::vector<double> sq(p, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto slice = [&](std::size_t j) {
            const auto c = z.coordinate(j);
            return std::vector<double>(c.begin() + static_cast<std::ptrdiff_t>(b * len),
                                       c.begin() + static_cast<std::ptrdiff_t>((b + 1) * len));
        };
        const TimeSeries piece = z.dimension() == 1 ? TimeSeries(slice(0)) : TimeSeries(slice(0), slice(1));
        const auto v = stats::evaluate_statistic_set(set, piece).values;
        for (std::size_t k = 0; k < p; ++k) {
            mean[k] += v[k];
            sq[k] += v[k] * v[k];
        }
    }
    const auto nb = static_cast<double>(batches);
    for (std::size_t k = 0; k < p; ++k) {
        const double m = mean[k] / nb;
        const double var = std::max(0.0, (sq[k] - nb * m * m) / (nb - 1.0));
        out.std_error[k] = std::sqrt(var / nb);
    }
    return out;
}

OneToOneVerdict verify_one_to_one(const ModelSpec& model, const stats::StatisticSet& set,
                                  std::span<const ParameterVector> points, std::size_t t_star, double tau,
                                  double rho_min, std::uint64_t seed, unsigned workers) {
    if (points.size() < 2) {
        throw std::invalid_argument("one-to-one verification needs at least two parameter points");
    }
    if (!(tau > 0.0) || !(rho_min > 0.0)) {
        throw std::invalid_argument("one-to-one verification needs tau > 0 and rho_min > 0");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (distance(points[i], points[j]) < rho_min) {
                throw std::invalid_argument("parameter points " + std::to_string(i) + " and " + std::to_string(j) +
                                            " are closer than rho_min");
            }
        }
    }
    OneToOneVerdict verdict;
    verdict.rho_min = rho_min;
    verdict.tau = tau;
    verdict.t_star = t_star;
    verdict.statistics.resize(points.size());
    parallel_for(points.size(), workers, [&](std::size_t k) {
        verdict.statistics[k] = simulate_binding(model, points[k], set, t_star, seed, k);
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& si = verdict.statistics[i];
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const auto& sj = verdict.statistics[j];
            double se2 = 0.0;
            for (std::size_t k = 0; k < si.std_error.size(); ++k) {
                se2 += si.std_error[k] * si.std_error[k] + sj.std_error[k] * sj.std_error[k];
            }
            const double threshold = std::max(tau, 3.0 * std::sqrt(se2));
            const double d = norm_diff(si.summary.values, sj.summary.values);
            if (d > threshold) continue;
            ++verdict.collisions;
            if (!verdict.witness || d < verdict.witness->statistic_distance) {
                verdict.witness = OneToOneWitness{i, j, points[i], points[j], d, threshold};
            }
        }
    }
    verdict.injective = verdict.collisions == 0;
    return verdict;
}

} // namespace abcid::binding
