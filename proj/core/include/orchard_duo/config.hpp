#pragma once

#include "orchard_duo/analytics.hpp"
#include "orchard_duo/ga.hpp"
#include "orchard_duo/integrator.hpp"
#include "orchard_duo/model.hpp"
#include "orchard_duo/sensitivity.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace orchard_duo {

struct SensitivityConfig {
    std::vector<ParameterRange> ranges; ///< empty means default_ranges(strategy)
    std::size_t n_samples = 10000;
    std::size_t n_bins = 50;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const SensitivityConfig&, const SensitivityConfig&) = default;
};

/// Everything one JSON config describes. Sections: orchard1, orchard2,
/// coupling, controls, weights, integrator, ga, sensitivity and an optional
/// explicit initial state.
struct RunConfig {
    Scenario scenario;
    IntegratorOptions integrator;
    InitialSeeding seeding = InitialSeeding::AsWritten;
    /// True when the config lists the initial state; otherwise it is derived
    /// from the parameters and `seeding`.
    bool explicit_initial = false;
    CostWeights weights;
    /// ga.weights, ga.strategy and ga.integrator mirror the sections above.
    GaConfig ga;
    std::optional<std::uint64_t> ga_seed;
    SensitivityConfig sensitivity;

    std::vector<ParameterRange> resolved_ranges() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Builds a config from a JSON document. Missing fields take the baseline
/// defaults; unknown keys, wrong types and out-of-range values raise
/// ValidationError (or ControlOutOfRange / StrategyMismatch / ConfigInvalid)
/// naming the field path.
RunConfig config_from_json(const nlohmann::json& doc);

/// ParseError on unreadable files or malformed JSON.
RunConfig load_config(const std::filesystem::path& path);

/// Full document, including every defaulted field, such that
/// config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const RunConfig& config);

/// The scenario part of a config file.
Scenario load_scenario(const std::filesystem::path& path);

/// Gene names in chromosome order for a strategy ("m1","n1","m2","n2" or
/// "p1","q1","p2","q2").
std::array<std::string_view, 4> gene_names(StrategyKind strategy);

} // namespace orchard_duo
