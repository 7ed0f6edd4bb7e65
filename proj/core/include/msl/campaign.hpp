#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "msl/analysis.hpp"
#include "msl/measure.hpp"

namespace msl {

enum class CampaignMode { isolation, separation, comparison, wronskian, oracle };

const char* to_string(CampaignMode mode);
/// Throws PreconditionError for an unknown name.
CampaignMode parse_campaign_mode(std::string_view name);

/// Bounds for random instances on (0, L).
struct InstanceConfig {
    double length_min = 4.0;
    double length_max = 8.0;
    std::size_t max_breakpoints = 4;
    /// Background atoms; targeted instances add up to two designed atoms.
    std::size_t max_atoms = 4;
    double alpha_density_min = 0.5;
    double alpha_density_max = 2.0;
    double beta_density_min = -4.0;
    double beta_density_max = 0.5;
    double alpha_atom_max = 1.5;
    double beta_atom_min = -4.0;
    double beta_atom_max = 2.0;
    /// Lower bound on |theta|, |omega| at atoms and on the relative size of
    /// every one-sided value that is not an exact zero.
    double margin = 1e-3;
    /// Fixed r; drawn from {0, 1/2, 1, uniform} when unset.
    std::optional<double> r;
    std::size_t max_attempts = 50;
};

struct IvpData {
    double x0 = 0.0;
    double u0 = 0.0;
    double v0 = 0.0;
};

struct Instance {
    std::uint64_t seed = 0;
    /// Clause (or endpoint design) the generator aimed for; empty if none.
    std::string target;
    std::shared_ptr<const Problem> problem;
    /// Second equation (beta_2) in comparison mode, otherwise null.
    std::shared_ptr<const Problem> problem2;
    IvpData u;
    IvpData v;
};

/// Targets cycled through by run_campaign for a mode (may be empty).
std::vector<std::string> instance_targets(CampaignMode mode);

/// Deterministic instance for (seed, config, mode, target). Targets are clause
/// ids ("I.1" ... "II.5", "I.4'") in separation and comparison mode and
/// "s:+0", "s:-0", "s:flip" in isolation mode; an empty target draws an
/// untargeted instance. Comparison instances are balanced with
/// d(beta_1 - beta_2) >= 0. Throws PreconditionError for an invalid config or
/// when no instance satisfying the margins is found.
Instance random_instance(std::uint64_t seed, const InstanceConfig& config, CampaignMode mode,
                         std::string_view target = {});

struct CampaignOptions {
    InstanceConfig instance;
    AnalysisOptions analysis;
    unsigned threads = 1;
    std::size_t onestep_steps = 10000;
    std::size_t picard_iterations = 30;
    std::size_t picard_mesh = 10000;
    double onestep_tolerance = 1e-6;
    double picard_tolerance = 1e-5;
    double constancy_tolerance = 1e-9;
    double relation_tolerance = 1e-12;
    double product_tolerance = 1e-10;
};

struct CampaignFailure {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string message;
    nlohmann::json instance;
};

struct CampaignSummary {
    CampaignMode mode = CampaignMode::separation;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    /// Applicable clauses verified, by id.
    std::map<std::string, std::size_t> clause_counts;
    /// Named invariant checks performed.
    std::map<std::string, std::size_t> checks;
    /// Largest observed error per named quantity.
    std::map<std::string, double> maxima;
    std::size_t inapplicable = 0;
    std::size_t warnings = 0;
    std::size_t target_misses = 0;
    std::vector<CampaignFailure> failures;

    bool pass() const { return failures.empty(); }
};

/// Per-instance seed derived from the campaign seed.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);

/// Runs n instances through the verifier for mode. Results are reduced in
/// index order, so the summary does not depend on the thread count.
CampaignSummary run_campaign(CampaignMode mode, std::size_t n, std::uint64_t seed,
                             const CampaignOptions& options = {});

}  // namespace msl
