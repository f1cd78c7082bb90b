#pragma once

#include "orchard_duo/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orchard_duo {

std::string_view tool_version() noexcept;

struct RunManifest {
    std::string command;
    nlohmann::json resolved_config;
    std::optional<std::uint64_t> seed;
    std::string version;
    double wall_clock_seconds = 0.0;
    std::vector<std::string> outputs; ///< file names relative to the output directory

    nlohmann::json to_json() const;
};

struct DispatchOptions {
    /// Overrides ga.seed and sensitivity.seed.
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

/// Runs one of simulate, r0, sensitivity, optimize and writes its outputs and
/// manifest.json into `out_dir` (created if needed). Stochastic commands
/// refuse to run without a seed.
RunManifest dispatch(std::string_view command, RunConfig config, const std::filesystem::path& out_dir,
                     const DispatchOptions& options = {});

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);

/// Writes via a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// {"error": code, "message": ..., "field": ...}
nlohmann::json error_json(const std::exception& error);

} // namespace orchard_duo
