#include "cache.hpp"

#include <cstdlib>
#include <iostream>

#include "netpot/hash.hpp"
#include "netpot/serialize.hpp"

namespace netpot::cli {

namespace fs = std::filesystem;

ResultCache::ResultCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path ResultCache::default_dir() {
    if (const char* env = std::getenv("NETPOT_CACHE"); env && *env)
        return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
        return fs::path(xdg) / "netpot";
    if (const char* home = std::getenv("HOME"); home && *home)
        return fs::path(home) / ".cache" / "netpot";
    return fs::temp_directory_path() / "netpot-cache";
}

std::string ResultCache::key(const std::string& network_hash, const std::string& command,
                             const nlohmann::json& params) {
    const nlohmann::json k = {{"network", network_hash}, {"command", command}, {"params", params}};
    return sha256_hex(k.dump());
}

fs::path ResultCache::blob(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<Outputs> ResultCache::load(const std::string& key) const {
    const fs::path path = blob(key);
    std::error_code ec;
    if (!fs::exists(path, ec))
        return std::nullopt;
    try {
        const auto doc = nlohmann::json::parse(read_file(path));
        Outputs out = doc.at("outputs").get<Outputs>();
        if (doc.at("key").get<std::string>() != key ||
            doc.at("checksum").get<std::string>() != sha256_hex(nlohmann::json(out).dump()))
            throw std::runtime_error("checksum mismatch");
        return out;
    } catch (const std::exception& e) {
        std::cerr << "warning: corrupt cache entry " << path.string() << " (" << e.what()
                  << "); deleted and recomputing\n";
        fs::remove(path, ec);
        return std::nullopt;
    }
}

void ResultCache::store(const std::string& key, const Outputs& outputs) const {
    try {
        fs::create_directories(dir_);
        const nlohmann::json doc = {{"key", key},
                                    {"outputs", outputs},
                                    {"checksum", sha256_hex(nlohmann::json(outputs).dump())}};
        write_file_atomic(blob(key), doc.dump());
    } catch (const std::exception& e) {
        std::cerr << "warning: cannot write cache entry: " << e.what() << '\n';
    }
}

} // namespace netpot::cli
