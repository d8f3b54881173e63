#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace abcid::cli {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Collects the files of one run and writes the manifest last.
class OutputDirectory {
public:
    explicit OutputDirectory(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Renders `body` into `name` atomically and records its checksum.
    void write(const std::string& name, const std::function<void(std::ostream&)>& body);
    void write_json(const std::string& name, const nlohmann::json& value);

    /// manifest.json: command, config echo, version, checksums, runtime.
    void write_manifest(const std::string& command, const nlohmann::json& config, double runtime_seconds);

    const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

private:
    std::filesystem::path root_;
    std::vector<std::pair<std::string, std::string>> files_;
};

/// Writes `bytes` to a temporary sibling and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& bytes);

} // namespace abcid::cli
