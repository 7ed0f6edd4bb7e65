#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "msl/campaign.hpp"
#include "msl/json_io.hpp"
#include "msl/measure.hpp"

namespace msl::cli {

/// A parsed run configuration. Measures are validated on load; the
/// solvability hypothesis is not (that is what `check` reports).
struct RunConfig {
    std::shared_ptr<const Problem> problem;
    /// Same alpha and r with beta replaced by beta2.
    std::shared_ptr<const Problem> problem2;
    std::optional<IvpData> ivp;
    std::optional<IvpData> ivp2;

    std::size_t samples = 1000;
    AnalysisOptions analysis;

    CampaignMode mode = CampaignMode::separation;
    std::size_t n = 500;
    std::uint64_t seed = 42;
    CampaignOptions campaign;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Campaign-only settings; used by `verify` when no config file is given.
RunConfig default_config();

}  // namespace msl::cli
