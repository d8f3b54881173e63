#pragma once

#include "abcid/series_models.hpp"
#include "abcid/summaries.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace abcid::binding {

/// Large-sample limits available for the MA(2) model.
enum class Ma2Component { acov0, acov1, acov2, acov3, mean, third };

std::string_view to_string(Ma2Component c);

/// theta / (1 - theta^2); DomainError for |theta| >= 1.
double binding_ar1_acov1(double theta);

/// Requested components of (1+t1^2+t2^2, t1(1+t2), t2, 0, 0, 0), in the
/// order given. DomainError outside the invertibility triangle.
std::vector<double> binding_ma2(std::array<double, 2> theta, std::span<const Ma2Component> components);

/// Population AR(2) least-squares coefficients under an MA(2) law. Domain is
/// the MA(2) constraint set (unbounded in t2). DomainError when the design
/// is singular.
std::array<double, 2> binding_ols_ar2_on_ma2(std::array<double, 2> theta);

/// theta -> b(theta) for one of the supported examples.
class BindingFunction {
public:
    enum class Kind { ar1_acov1, ma2, ols_ar2_on_ma2 };

    static BindingFunction ar1_acov1();
    static BindingFunction ma2(std::vector<Ma2Component> components);
    /// acov0 .. acov<max_lag>.
    static BindingFunction ma2_acov(int max_lag);
    static BindingFunction ols_ar2_on_ma2();
    /// The binding whose value is the limit of `set` under `model`. Throws
    /// DomainError when no analytic limit is implemented.
    static BindingFunction for_statistics(Model model, const stats::StatisticSet& set);

    Kind kind() const noexcept { return kind_; }
    Model model() const noexcept { return kind_ == Kind::ar1_acov1 ? Model::ar1 : Model::ma2; }
    std::size_t parameter_dimension() const noexcept { return kind_ == Kind::ar1_acov1 ? 1 : 2; }
    std::size_t output_dimension() const noexcept;
    const std::vector<Ma2Component>& components() const noexcept { return components_; }
    std::string name() const;

    /// Checked evaluation: throws DomainError outside the binding's domain.
    std::vector<double> operator()(std::span<const double> theta) const;
    /// The same formula with no domain check, for root finding that may step
    /// outside the domain. Non-finite where the formula is singular.
    std::vector<double> formula(std::span<const double> theta) const;

private:
    BindingFunction(Kind kind, std::vector<Ma2Component> components);

    Kind kind_;
    std::vector<Ma2Component> components_;
};

/// A search box plus the model's feasibility rule.
struct Region {
    enum class Rule { ar1, ma2_triangle, ma2_constraints };

    Rule rule = Rule::ma2_triangle;
    std::vector<double> lo;
    std::vector<double> hi;

    /// (-bound, bound); feasible means inside that interval.
    static Region ar1(double bound = 0.99);
    /// Box (-2,2)x(-1,1); feasible means inside the triangle.
    static Region ma2_triangle();
    /// Box (-2,2)x(-1,theta2_max); feasible means the MA(2) constraints,
    /// which leave t2 unbounded above.
    static Region ma2_constraints(double theta2_max = 3.0);
    /// ar1 for ar1_acov1, the constraint set for ols_ar2_on_ma2, the triangle otherwise.
    static Region default_for(const BindingFunction& binding);

    std::size_t dimension() const noexcept { return lo.size(); }
    bool in_box(std::span<const double> theta) const;
    bool feasible(std::span<const double> theta) const;
    std::string name() const;
};

struct PreimageOptions {
    std::size_t grid = 400;
    /// Grid minima with residual above this are not refined.
    double coarse_threshold = 0.25;
    double tolerance = 1e-10;
    std::size_t max_iterations = 100;
    double dedupe = 1e-6;
    unsigned workers = 1;
    /// Use grid refinement even where a closed form exists.
    bool force_grid = false;
};

struct PreimageResult {
    enum class Method { analytic_polynomial, grid_refine };

    std::vector<double> target;
    std::vector<ParameterVector> solutions;
    std::vector<ParameterVector> infeasible_solutions;
    /// Grid candidates whose refinement hit the iteration cap.
    std::vector<ParameterVector> suspect;
    Method method = Method::analytic_polynomial;
};

std::string_view to_string(PreimageResult::Method method);

/// All solutions of b(theta) = target, split by feasibility in `region`.
/// Closed forms are used for ar1_acov1 (a quadratic) and for the MA(2)
/// autocovariance systems (a quartic in t1, or direct substitution when acov2
/// is present); other bindings use grid search with Gauss-Newton refinement
/// inside the region's box. Throws DomainError for an underdetermined
/// MA(2) system and std::invalid_argument for a non-finite target.
PreimageResult solve_preimage(const BindingFunction& binding, std::span<const double> target, const Region& region,
                              const PreimageOptions& options = {});

/// Gauss-Newton with finite-difference Jacobian from `start` toward `target`.
/// Returns the root when the residual drops to options.tolerance.
std::optional<std::vector<double>> refine_root(const BindingFunction& binding, std::span<const double> target,
                                               std::vector<double> start, const PreimageOptions& options = {});

struct CollisionWitness {
    ParameterVector theta_a;
    ParameterVector theta_b;
    double theta_distance = 0.0;
    double binding_distance = 0.0;
};

struct InjectivityVerdict {
    bool injective = true;
    std::optional<CollisionWitness> witness;
    std::size_t grid_points = 0;
    std::size_t candidate_pairs = 0;
    double rho_min = 0.0;
    double tau = 0.0;
};

struct InjectivityOptions {
    std::size_t points_per_dimension = 500;
    unsigned workers = 1;
};

/// Grid search for pairs at least rho_min apart whose b-values are within tau,
/// each polished into an exact collision or discarded. std::invalid_argument
/// unless rho_min, tau > 0.
InjectivityVerdict check_injectivity_analytic(const BindingFunction& binding, const Region& region, double rho_min,
                                              double tau, const InjectivityOptions& options = {});

struct SimulatedBinding {
    stats::SummaryVector summary;
    /// Batch-means standard error per component; zero for deterministic models.
    std::vector<double> std_error;
};

/// One long simulated series (length t_star >= 10^4, stream `stream` of
/// `seed`) summarised by `set`, with a 50-batch batch-means standard error.
SimulatedBinding simulate_binding(const ModelSpec& model, const ParameterVector& theta, const stats::StatisticSet& set,
                                  std::size_t t_star, std::uint64_t seed, std::uint64_t stream = 0);

struct OneToOneWitness {
    std::size_t index_a = 0;
    std::size_t index_b = 0;
    ParameterVector theta_a;
    ParameterVector theta_b;
    double statistic_distance = 0.0;
    double threshold = 0.0;
};

struct OneToOneVerdict {
    bool injective = true;
    /// The colliding pair with the smallest statistic distance.
    std::optional<OneToOneWitness> witness;
    std::size_t collisions = 0;
    std::vector<SimulatedBinding> statistics;
    double rho_min = 0.0;
    double tau = 0.0;
    std::size_t t_star = 0;
};

/// Simulation-based one-to-one check over K* >= 2 parameter points that are
/// pairwise at least rho_min apart (std::invalid_argument otherwise). A pair
/// collides when its statistic distance is <= max(tau, 3 x combined standard
/// error). Point k uses stream k of `seed`.
OneToOneVerdict verify_one_to_one(const ModelSpec& model, const stats::StatisticSet& set,
                                  std::span<const ParameterVector> points, std::size_t t_star, double tau,
                                  double rho_min, std::uint64_t seed, unsigned workers = 1);

/// Uniform grid of cell centres inside the region (feasible points only).
std::vector<ParameterVector> region_grid(const Region& region, std::size_t points_per_dimension);

} // namespace abcid::binding
