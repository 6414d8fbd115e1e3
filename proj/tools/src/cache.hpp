#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace netpot::cli {

/// Named output documents of one command run.
using Outputs = std::map<std::string, std::string>;

/// Content-addressed store of command outputs. Each blob records its key and
/// a SHA-256 of the stored outputs; blobs that fail either check are deleted.
class ResultCache {
public:
    explicit ResultCache(std::filesystem::path dir);

    /// NETPOT_CACHE, else $XDG_CACHE_HOME/netpot, else ~/.cache/netpot.
    static std::filesystem::path default_dir();

    static std::string key(const std::string& network_hash, const std::string& command,
                           const nlohmann::json& params);

    std::optional<Outputs> load(const std::string& key) const;
    void store(const std::string& key, const Outputs& outputs) const;

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path blob(const std::string& key) const;
    std::filesystem::path dir_;
};

} // namespace netpot::cli
