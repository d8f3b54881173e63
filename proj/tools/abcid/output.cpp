#include "output.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef ABCID_VERSION
#define ABCID_VERSION "0.0.0"
#endif

namespace abcid::cli {

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
    return hex.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

OutputDirectory::OutputDirectory(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

void OutputDirectory::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream ss;
    body(ss);
    const std::string bytes = ss.str();
    write_atomically(root_ / name, bytes);
    files_.emplace_back(name, sha256_hex(bytes));
}

void OutputDirectory::write_json(const std::string& name, const nlohmann::json& value) {
    write(name, [&](std::ostream& out) { out << value.dump(2) << '\n'; });
}

void OutputDirectory::write_manifest(const std::string& command, const nlohmann::json& config, double runtime_seconds) {
    nlohmann::json m;
    m["command"] = command;
    m["version"] = ABCID_VERSION;
    m["config"] = config;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, sum] : files_) files.push_back({{"file", name}, {"sha256", sum}});
    m["outputs"] = files;
    m["runtime_seconds"] = runtime_seconds;
    write_atomically(root_ / "manifest.json", m.dump(2) + "\n");
}

} // namespace abcid::cli
