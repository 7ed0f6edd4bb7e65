#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "msl/errors.hpp"

namespace {

using msl::cli::CommandResult;
using msl::cli::RunConfig;

struct Flags {
    std::string config;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<std::string> mode;
    std::string output;
    std::optional<double> tolerance;
};

RunConfig resolve(const Flags& f, bool config_required) {
    RunConfig cfg;
    if (!f.config.empty()) {
        cfg = msl::cli::load_config(f.config);
    } else if (config_required) {
        throw msl::ConfigError("--config", "required for this command");
    }
    if (f.samples) cfg.samples = *f.samples;
    if (f.seed) cfg.seed = *f.seed;
    if (f.n) cfg.n = *f.n;
    if (f.mode) {
        try {
            cfg.mode = msl::parse_campaign_mode(*f.mode);
        } catch (const std::exception& e) {
            throw msl::ConfigError("--mode", e.what());
        }
    }
    if (f.tolerance) {
        if (!(*f.tolerance >= 0.0)) throw msl::ConfigError("--tolerance", "must be non-negative");
        cfg.analysis.zero_tolerance = *f.tolerance;
    }
    cfg.campaign.analysis = cfg.analysis;
    return cfg;
}

int emit(const CommandResult& r, const std::string& output) {
    if (output.empty()) {
        std::cout << r.output;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) {
            std::cerr << "msl: cannot write " << output << "\n";
            return msl::cli::config_error;
        }
        out << r.output;
    }
    if (!r.diagnostic.empty()) std::cerr << "msl: " << r.diagnostic << "\n";
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver and theorem checker for measure Sturm-Liouville equations"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags flags;
    app.add_option("--config", flags.config, "JSON run configuration");
    app.add_option("--samples", flags.samples, "Uniform sample count for solve and wronskian");
    app.add_option("--seed", flags.seed, "Campaign seed");
    app.add_option("--n", flags.n, "Campaign size");
    app.add_option("--mode", flags.mode, "Campaign mode: isolation, separation, comparison, wronskian, oracle");
    app.add_option("--output", flags.output, "Write the result here instead of stdout");
    app.add_option("--tolerance", flags.tolerance, "Relative zero tolerance for sign analysis");

    using Command = std::function<CommandResult(const RunConfig&)>;
    const std::map<std::string, std::pair<Command, std::string>> commands{
        {"check", {msl::cli::cmd_check, "Check the solvability hypothesis (exit 2 on failure)"}},
        {"solve", {msl::cli::cmd_solve, "Sample the solution of ivp as CSV"}},
        {"zeros", {msl::cli::cmd_zeros, "Sign-changing points of the ivp solution as CSV"}},
        {"wronskian", {msl::cli::cmd_wronskian, "Wronskian of the ivp and ivp2 solutions as CSV"}},
        {"separation", {msl::cli::cmd_separation, "Verify separation clauses for ivp and ivp2"}},
        {"comparison", {msl::cli::cmd_comparison, "Verify comparison clauses for beta and beta2"}},
        {"verify", {msl::cli::cmd_verify, "Run a random campaign and print its summary"}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : msl::cli::config_error;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const RunConfig cfg = resolve(flags, name != "verify");
        return emit(commands.at(name).first(cfg), flags.output);
    } catch (const msl::ConfigError& e) {
        std::cerr << "msl: config error: " << e.what() << "\n";
        return msl::cli::config_error;
    } catch (const msl::HypothesisError& e) {
        std::cerr << "msl: hypothesis violated: " << e.what() << "\n";
        return msl::cli::hypothesis_failure;
    } catch (const msl::DomainError& e) {
        std::cerr << "msl: config error: " << e.what() << "\n";
        return msl::cli::config_error;
    } catch (const msl::PreconditionError& e) {
        std::cerr << "msl: config error: " << e.what() << "\n";
        return msl::cli::config_error;
    } catch (const msl::InvariantError& e) {
        std::cerr << "msl: verification failure: " << e.what() << "\n";
        return msl::cli::verification_failure;
    }
}
