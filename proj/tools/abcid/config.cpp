#include "config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace abcid::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_quotes(std::string_view s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        return std::string(s.substr(1, s.size() - 2));
    }
    return std::string(s);
}

std::optional<double> to_double(std::string_view s) {
    const std::string buf(trim(s));
    if (buf.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || errno == ERANGE) return std::nullopt;
    return v;
}

void flatten(const nlohmann::json& j, const std::string& prefix, Config& out, const std::string& origin) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            flatten(v, prefix.empty() ? k : prefix + "." + k, out, origin);
        }
        return;
    }
    const auto scalar = [](const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
        return v.dump();
    };
    if (j.is_array()) {
        std::string joined;
        for (const auto& v : j) {
            if (v.is_structured()) throw ConfigError(origin + ": field '" + prefix + "': nested arrays are not supported");
            if (!joined.empty()) joined += ", ";
            joined += scalar(v);
        }
        out.set(prefix, joined, origin);
        return;
    }
    out.set(prefix, scalar(j), origin);
}

} // namespace

std::vector<std::string> split_list(std::string_view value) {
    auto v = trim(value);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = trim(v.substr(1, v.size() - 2));
    std::vector<std::string> out;
    if (v.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = v.find(',', start);
        const auto item = trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        out.push_back(strip_quotes(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Config Config::parse_text(std::string_view text, const std::string& origin) {
    Config cfg;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": missing key before '='");
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (cfg.has(full)) throw ConfigError(where + ": field '" + full + "' set twice");
        cfg.entries_[full] = Entry{strip_quotes(trim(line.substr(eq + 1))), origin, line_no};
    }
    return cfg;
}

Config Config::parse_json(std::string_view text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": JSON configuration must be an object");
    Config cfg;
    flatten(j, "", cfg, origin);
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json(text, path.string());
    return parse_text(text, path.string());
}

void Config::set(const std::string& key, std::string value, const std::string& origin) {
    entries_[key] = Entry{std::move(value), origin, 0};
}

void Config::merge(const Config& other) {
    for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

void Config::fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    std::string where = "configuration";
    if (it != entries_.end()) {
        where = it->second.origin;
        if (it->second.line > 0) where += ":" + std::to_string(it->second.line);
    }
    throw ConfigError(where + ": field '" + key + "': " + what);
}

const Config::Entry& Config::require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, "required but not set");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return require(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const auto v = to_double(require(key).value);
    if (!v || !std::isfinite(*v)) fail(key, "expected a finite number, got '" + require(key).value + "'");
    return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const auto& s = require(key).value;
    long long v = 0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        // Accept integral values written in floating notation, e.g. 1e6.
        const auto d = to_double(s);
        if (!d || std::floor(*d) != *d || std::abs(*d) > 9.0e15) fail(key, "expected an integer, got '" + s + "'");
        return static_cast<long long>(*d);
    }
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& s = require(key).value;
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(key, "expected a boolean, got '" + s + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(require(key).value)) {
        const auto v = to_double(item);
        if (!v || !std::isfinite(*v)) fail(key, "expected a list of numbers, got item '" + item + "'");
        out.push_back(*v);
    }
    if (out.empty()) fail(key, "list is empty");
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? get_doubles(key) : fallback;
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
    auto out = split_list(require(key).value);
    if (out.empty()) fail(key, "list is empty");
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, std::vector<std::string> fallback) const {
    return has(key) ? get_strings(key) : fallback;
}

void Config::check_known(const std::set<std::string>& known) const {
    for (const auto& [k, e] : entries_) {
        if (!known.count(k)) fail(k, "unknown field for this command");
    }
}

nlohmann::json Config::echo() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, e] : entries_) j[k] = e.value;
    return j;
}

} // namespace abcid::cli
