#include "presets.hpp"

#include <map>

namespace abcid::cli {

namespace {

const std::map<std::string, std::string, std::less<>>& presets() {
    static const std::map<std::string, std::string, std::less<>> table{
        {"ma2-figure1", R"(experiment = ma2-figure1
[model]
name = ma2
theta0 = 0.6, 0.2
[data]
sizes = 100, 200, 500, 1000, 5000
[statistics]
sets = eta1, eta2, eta6
[abc]
n_draws = 50000
quantile = 0.01
distance = euclidean
[sweep]
delta = 0.1
)"},
        {"gauss-kernel", R"(experiment = gauss-kernel
[model]
name = gauss_mean
theta0 = 1
[data]
length = 1000
[statistics]
set = sample_mean
[abc]
method = kernel
bandwidth = 0.01
n_draws = 100000
)"},
        {"figure2", R"(plan = figure2
[model]
name = ma2
theta0 = 0.6, 0.2
[data]
length = 5000
[statistics]
sets = eta1, eta2, eta3, eta4, eta5
[abc]
n_draws = 50000
quantile = 0.01
distance = euclidean
[jump]
threshold = 3.0
)"},
        {"figure4", R"(plan = figure4
[model]
name = ma2
theta0 = 0.6, 0.2
[data]
length = 5000
[statistics]
sets = eta1, eta6, eta7
[abc]
n_draws = 50000
quantile = 0.01
distance = euclidean
[jump]
threshold = 3.0
)"},
        {"figure5", R"(plan = figure5
[model]
name = ma2
theta0 = 0.6, 0.2
[data]
length = 5000
[statistics]
sets = eta1, eta6, eta7, eta8
[abc]
n_draws = 50000
quantile = 0.01
distance = euclidean
[jump]
threshold = 3.0
)"},
        {"injectivity", R"([model]
name = ma2
[statistics]
set = eta1
[injectivity]
mode = analytic
rho_min = 0.05
tau = 0.01
points = 500
t_star = 1000000
sim_points = 28
sim_tau = 0.001
)"},
        {"analytic-sweep", R"([sweep]
theta0 = 0
delta = 0.1
epsilon = 0.1, 0.03, 0.01, 0.003, 0.001
T = 100, 1000, 10000, 100000, 1000000
orders = eps_then_T, T_then_eps
simulate_eta = true
)"},
        {"deterministic", R"(experiment = lv-deterministic
[model]
name = lv
theta0 = 1, 1
n_points = 500
simulation = deterministic
[abc]
n_draws = 10000
quantile = 0.01
distance = lv_raw_path
)"},
        {"noise_matched", R"(experiment = lv-noise-matched
[model]
name = lv
theta0 = 1, 1
n_points = 2000
simulation = noise_matched
[statistics]
set = lv_ols
[abc]
n_draws = 10000
quantile = 0.01
distance = euclidean
)"},
    };
    return table;
}

} // namespace

std::optional<std::string> preset_text(std::string_view name) {
    const auto it = presets().find(name);
    if (it == presets().end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : presets()) out.push_back(k);
    return out;
}

} // namespace abcid::cli
