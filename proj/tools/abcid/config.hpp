#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace abcid::cli {

/// Bad configuration: unparsable text, unknown key or malformed value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key/value configuration.
///
/// Text form: `key = value` lines, `[section]` headers prefixing the keys
/// that follow with `section.`, `#` comments. Lists are comma separated and
/// may be wrapped in brackets. A file whose first non-blank character is `{`
/// is read as JSON instead; nested objects flatten to dotted keys.
class Config {
public:
    struct Entry {
        std::string value;
        std::string origin;
        int line = 0;
    };

    static Config parse_text(std::string_view text, const std::string& origin);
    static Config parse_json(std::string_view text, const std::string& origin);
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value, const std::string& origin = "command line");
    /// Keys of `other` replace ours.
    void merge(const Config& other);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::string> get_strings(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback) const;

    /// ConfigError naming the first key not in `known`.
    void check_known(const std::set<std::string>& known) const;

    nlohmann::json echo() const;

    /// Throws ConfigError located at `key`'s origin.
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

private:
    const Entry& require(const std::string& key) const;

    std::map<std::string, Entry> entries_;
};

/// Comma-separated items, brackets and surrounding blanks removed.
std::vector<std::string> split_list(std::string_view value);

} // namespace abcid::cli
