#pragma once

#include "config.hpp"
#include "output.hpp"

#include <cstdint>

namespace abcid::cli {

struct RunContext {
    Config config;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    OutputDirectory* out = nullptr;
};

void cmd_abc_run(const RunContext& ctx);
void cmd_diagnose_augment(const RunContext& ctx);
void cmd_diagnose_injectivity(const RunContext& ctx);
void cmd_analytic_sweep(const RunContext& ctx);
void cmd_lv_study(const RunContext& ctx);

} // namespace abcid::cli
