#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "msl/analysis.hpp"
#include "msl/campaign.hpp"
#include "msl/measure.hpp"
#include "msl/theorems.hpp"

namespace msl {

/// Malformed configuration; field() is the JSON path of the offending value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// {"breakpoints": [...], "densities": [...], "atoms": [{"x": .., "w": ..}]}
nlohmann::json to_json(const PiecewiseMeasure& mu);
/// Inverse of to_json; field names the measure in diagnostics.
PiecewiseMeasure measure_from_json(const nlohmann::json& j, const Interval& interval,
                                   const std::string& field);

nlohmann::json to_json(const HypothesisReport& report);
nlohmann::json to_json(const SignChangePoint& point);
nlohmann::json to_json(const VerificationReport& report);

/// Run-config document reproducing the instance (interval, r, alpha, beta,
/// beta2, ivp, ivp2) plus its seed and target.
nlohmann::json to_json(const Instance& instance);
nlohmann::json to_json(const CampaignSummary& summary);

}  // namespace msl
