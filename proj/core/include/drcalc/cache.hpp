#pragma once

// Disk result cache: one JSON file per entry, named by an FNV-1a digest of the
// content key (canonical graph encoding + method + parameter digest). Writes
// go through a temp file and rename, so concurrent writers of identical
// content are safe (last writer wins).

#include <cstdint>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace drcalc {

inline std::string resolve_cache_dir(const std::string& configured) {
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv("DRCALC_CACHE_DIR"); env && *env) return env;
    return ".drcalc-cache";
}

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

inline std::optional<std::string> cache_get(const std::string& dir, const std::string& key) {
    std::filesystem::path p = std::filesystem::path(dir) / (fnv1a_hex(key) + ".json");
    std::ifstream in(p);
    if (!in) return std::nullopt;
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

inline void cache_put(const std::string& dir, const std::string& key, const std::string& value) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) return; // cache is best-effort
    std::filesystem::path final_path = std::filesystem::path(dir) / (fnv1a_hex(key) + ".json");
    std::filesystem::path tmp = final_path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp);
        if (!out) return;
        out << value;
    }
    std::filesystem::rename(tmp, final_path, ec);
}

inline std::pair<long, long> cache_stats(const std::string& dir) {
    long files = 0, bytes = 0;
    std::error_code ec;
    for (auto it = std::filesystem::directory_iterator(dir, ec);
         !ec && it != std::filesystem::directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        ++files;
        bytes += (long)it->file_size();
    }
    return {files, bytes};
}

inline long cache_clear(const std::string& dir) {
    long removed = 0;
    std::error_code ec;
    for (auto it = std::filesystem::directory_iterator(dir, ec);
         !ec && it != std::filesystem::directory_iterator(); ++it) {
        if (it->path().extension() == ".json" && std::filesystem::remove(it->path())) ++removed;
    }
    return removed;
}

} // namespace drcalc
