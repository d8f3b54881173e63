#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abcid::cli {

/// Built-in configuration text for a named experiment, if there is one.
std::optional<std::string> preset_text(std::string_view name);
std::vector<std::string> preset_names();

} // namespace abcid::cli
