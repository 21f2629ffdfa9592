#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace hopfspec::cli {

// FNV-1a 64-bit checksum of a file's bytes.
inline std::uint64_t fnv1a64(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return hash;
}

/// Reproducibility record written after a successful command: the full
/// parameter set, seeds, and the checksummed list of every output file.
class RunManifest {
public:
    RunManifest(std::string command, std::string version)
        : start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["version"] = std::move(version);
        doc_["parameters"] = nlohmann::json::object();
        doc_["seeds"] = nlohmann::json::array();
        doc_["outputs"] = nlohmann::json::array();
    }

    template <typename T>
    void parameter(const std::string& key, const T& value) {
        doc_["parameters"][key] = value;
    }

    void seed(std::uint64_t s) { doc_["seeds"].push_back(s); }

    void output(const std::filesystem::path& path) {
        nlohmann::json entry;
        entry["path"] = path.filename().string();
        entry["bytes"] = std::filesystem::file_size(path);
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(path)));
        entry["fnv1a64"] = hex;
        doc_["outputs"].push_back(entry);
    }

    // Atomic write: temp file in the same directory, then rename.
    void write(const std::filesystem::path& path) {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        doc_["duration_seconds"] = elapsed;
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << doc_.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path);
    }

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace hopfspec::cli
