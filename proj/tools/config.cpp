#include "config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace msl::cli {

using nlohmann::json;

namespace {

const json* member(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

double required_number(const json& obj, const char* key, const std::string& field) {
    const json* v = member(obj, key);
    if (!v) throw ConfigError(field + "." + key, "missing");
    return number(*v, field + "." + key);
}

std::uint64_t count(const json& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(field, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

void set_count(const json& obj, const char* key, const std::string& field, std::size_t& out) {
    if (const json* v = member(obj, key)) out = static_cast<std::size_t>(count(*v, field + "." + key));
}

void set_number(const json& obj, const char* key, const std::string& field, double& out) {
    if (const json* v = member(obj, key)) out = number(*v, field + "." + key);
}

void require_object(const json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
}

IvpData parse_ivp(const json& j, const std::string& field) {
    require_object(j, field);
    return {required_number(j, "x0", field), required_number(j, "u0", field), required_number(j, "v0", field)};
}

void parse_instance(const json& j, const std::string& field, InstanceConfig& cfg) {
    require_object(j, field);
    set_number(j, "length_min", field, cfg.length_min);
    set_number(j, "length_max", field, cfg.length_max);
    set_count(j, "max_breakpoints", field, cfg.max_breakpoints);
    set_count(j, "max_atoms", field, cfg.max_atoms);
    set_number(j, "alpha_density_min", field, cfg.alpha_density_min);
    set_number(j, "alpha_density_max", field, cfg.alpha_density_max);
    set_number(j, "beta_density_min", field, cfg.beta_density_min);
    set_number(j, "beta_density_max", field, cfg.beta_density_max);
    set_number(j, "alpha_atom_max", field, cfg.alpha_atom_max);
    set_number(j, "beta_atom_min", field, cfg.beta_atom_min);
    set_number(j, "beta_atom_max", field, cfg.beta_atom_max);
    set_number(j, "margin", field, cfg.margin);
    set_count(j, "max_attempts", field, cfg.max_attempts);
    if (const json* r = member(j, "r")) {
        const double v = number(*r, field + ".r");
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field + ".r", "must lie in [0, 1]");
        cfg.r = v;
    }
}

void parse_campaign(const json& j, RunConfig& cfg) {
    const std::string field = "campaign";
    require_object(j, field);
    if (const json* m = member(j, "mode")) {
        if (!m->is_string()) throw ConfigError(field + ".mode", "expected a string");
        try {
            cfg.mode = parse_campaign_mode(m->get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(field + ".mode", e.what());
        }
    }
    set_count(j, "n", field, cfg.n);
    if (const json* s = member(j, "seed")) cfg.seed = count(*s, field + ".seed");
    CampaignOptions& c = cfg.campaign;
    if (const json* t = member(j, "threads")) c.threads = static_cast<unsigned>(count(*t, field + ".threads"));
    set_count(j, "onestep_steps", field, c.onestep_steps);
    set_count(j, "picard_iterations", field, c.picard_iterations);
    set_count(j, "picard_mesh", field, c.picard_mesh);
    set_number(j, "onestep_tolerance", field, c.onestep_tolerance);
    set_number(j, "picard_tolerance", field, c.picard_tolerance);
    set_number(j, "constancy_tolerance", field, c.constancy_tolerance);
    set_number(j, "relation_tolerance", field, c.relation_tolerance);
    set_number(j, "product_tolerance", field, c.product_tolerance);
    if (const json* inst = member(j, "instance")) parse_instance(*inst, field + ".instance", c.instance);
}

}  // namespace

RunConfig default_config() { return {}; }

RunConfig parse_config(const json& doc) {
    require_object(doc, "<root>");
    RunConfig cfg;

    if (const json* opts = member(doc, "options")) {
        require_object(*opts, "options");
        set_count(*opts, "samples", "options", cfg.samples);
        set_number(*opts, "tolerance", "options", cfg.analysis.zero_tolerance);
    }
    if (const json* c = member(doc, "campaign")) parse_campaign(*c, cfg);
    cfg.campaign.analysis = cfg.analysis;

    // The equation itself is optional so that a campaign-only config is valid.
    if (!member(doc, "interval") && !member(doc, "alpha") && !member(doc, "beta")) {
        if (member(doc, "ivp") || member(doc, "ivp2") || member(doc, "beta2")) {
            throw ConfigError("interval", "missing");
        }
        return cfg;
    }

    const json* iv = member(doc, "interval");
    if (!iv) throw ConfigError("interval", "missing");
    require_object(*iv, "interval");
    const double a = required_number(*iv, "a", "interval");
    const double b = required_number(*iv, "b", "interval");
    if (!(a < b)) throw ConfigError("interval", "requires a < b");
    const Interval interval{a, b};

    const json* rj = member(doc, "r");
    if (!rj) throw ConfigError("r", "missing");
    const double r = number(*rj, "r");
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("r", "must lie in [0, 1]");

    const json* aj = member(doc, "alpha");
    if (!aj) throw ConfigError("alpha", "missing");
    const json* bj = member(doc, "beta");
    if (!bj) throw ConfigError("beta", "missing");
    PiecewiseMeasure alpha = measure_from_json(*aj, interval, "alpha");
    PiecewiseMeasure beta = measure_from_json(*bj, interval, "beta");
    if (const json* b2 = member(doc, "beta2")) {
        cfg.problem2 = std::make_shared<const Problem>(r, alpha, measure_from_json(*b2, interval, "beta2"));
    }
    cfg.problem = std::make_shared<const Problem>(r, std::move(alpha), std::move(beta));

    if (const json* j = member(doc, "ivp")) cfg.ivp = parse_ivp(*j, "ivp");
    if (const json* j = member(doc, "ivp2")) cfg.ivp2 = parse_ivp(*j, "ivp2");
    for (const auto& [name, ivp] : {std::pair{"ivp", cfg.ivp}, std::pair{"ivp2", cfg.ivp2}}) {
        if (ivp && !(a < ivp->x0 && ivp->x0 < b)) {
            throw ConfigError(std::string(name) + ".x0", "must lie in the open interval (a, b)");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace msl::cli
