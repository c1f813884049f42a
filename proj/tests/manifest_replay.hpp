#pragma once

// Reruns a CLI output directory from its manifest and compares the results.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "conic_spde/cli.hpp"
#include "conic_spde/config.hpp"

namespace conic::testing {

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int rc = dispatch(args, out, err);
    if (out_text) *out_text = out.str();
    return rc;
}

inline Json manifest_without_dir(const std::filesystem::path& dir) {
    Json j = Json::parse(slurp(dir / "manifest.json"));
    j["output"].erase("dir");
    return j;
}

/// Empty string on success, otherwise a description of the first mismatch.
inline std::string replay_matches(const std::filesystem::path& first, const std::filesystem::path& second) {
    const Json manifest = Json::parse(slurp(first / "manifest.json"));
    const std::string command = manifest.at("command").get<std::string>();
    if (run_cli({command, "--config", (first / "manifest.json").string(), "--out", second.string()}) != 0)
        return "replay of " + command + " failed";
    if (manifest_without_dir(first) != manifest_without_dir(second)) return "manifest differs";
    std::vector<std::string> names;
    for (const auto& e : std::filesystem::directory_iterator(first)) names.push_back(e.path().filename().string());
    for (const auto& e : std::filesystem::directory_iterator(second))
        if (!std::filesystem::exists(first / e.path().filename())) return "extra file " + e.path().filename().string();
    for (const auto& name : names) {
        if (name == "manifest.json") continue;
        if (!std::filesystem::exists(second / name)) return "missing " + name;
        if (slurp(first / name) != slurp(second / name)) return name + " differs";
    }
    return "";
}

}  // namespace conic::testing
