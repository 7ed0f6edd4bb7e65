#include "msl/json_io.hpp"

#include <cmath>

#include "msl/errors.hpp"

namespace msl {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> number_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(field + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

json ivp_json(const IvpData& ivp) { return {{"x0", ivp.x0}, {"u0", ivp.u0}, {"v0", ivp.v0}}; }

}  // namespace

json to_json(const PiecewiseMeasure& mu) {
    json atoms = json::array();
    for (const Atom& a : mu.atoms()) atoms.push_back({{"x", a.position}, {"w", a.weight}});
    // Atom positions are stored as breakpoints; emit only the genuine ones.
    json breakpoints = json::array();
    json densities = json::array();
    const auto bps = mu.breakpoints();
    const auto dens = mu.densities();
    densities.push_back(dens[0]);
    for (std::size_t i = 0; i < bps.size(); ++i) {
        if (dens[i + 1] == densities.back() && mu.delta(bps[i]) != 0.0) continue;
        breakpoints.push_back(bps[i]);
        densities.push_back(dens[i + 1]);
    }
    return {{"breakpoints", breakpoints}, {"densities", densities}, {"atoms", atoms}};
}

PiecewiseMeasure measure_from_json(const json& j, const Interval& interval, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
    std::vector<double> breakpoints;
    if (j.contains("breakpoints")) breakpoints = number_array(j["breakpoints"], field + ".breakpoints");
    std::vector<double> densities{0.0};
    if (j.contains("densities")) {
        densities = number_array(j["densities"], field + ".densities");
    } else if (!breakpoints.empty()) {
        throw ConfigError(field + ".densities", "required when breakpoints are given");
    }
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        const json& ja = j["atoms"];
        if (!ja.is_array()) throw ConfigError(field + ".atoms", "expected an array");
        for (std::size_t i = 0; i < ja.size(); ++i) {
            const std::string f = field + ".atoms[" + std::to_string(i) + "]";
            if (!ja[i].is_object() || !ja[i].contains("x") || !ja[i].contains("w") ||
                !ja[i]["x"].is_number() || !ja[i]["w"].is_number()) {
                throw ConfigError(f, "expected {\"x\": number, \"w\": number}");
            }
            atoms.push_back({ja[i]["x"].get<double>(), ja[i]["w"].get<double>()});
        }
    }
    try {
        return PiecewiseMeasure(interval, std::move(breakpoints), std::move(densities), std::move(atoms));
    } catch (const std::exception& e) {
        throw ConfigError(field, e.what());
    }
}

json to_json(const HypothesisReport& report) {
    json atoms = json::array();
    for (const AtomDiagnostics& d : report.atoms) {
        atoms.push_back({{"x", d.position},
                         {"d_alpha", d.d_alpha},
                         {"d_beta", d.d_beta},
                         {"theta_r", d.theta_r},
                         {"theta_1mr", d.theta_1mr},
                         {"theta", number_or_null(d.theta)},
                         {"omega", d.omega},
                         {"pass", d.pass}});
    }
    return {{"pass", report.pass},
            {"alpha_increasing", report.alpha_increasing},
            {"atoms", atoms},
            {"messages", report.messages}};
}

json to_json(const SignChangePoint& p) {
    json criterion = {{"rule", to_string(p.criterion.rule)},
                      {"value", number_or_null(p.criterion.value)},
                      {"text", p.criterion.describe()}};
    if (p.criterion.rule == SignRule::FlipWindow) {
        criterion["window"] = {p.criterion.window_lo, p.criterion.window_hi};
        criterion["window_holds"] = p.criterion.window_holds;
    }
    return {{"x", p.position},
            {"kind", to_string(p.kind)},
            {"changes_sign", p.changes_sign},
            {"criterion", criterion},
            {"u_minus", p.left.u},
            {"u", p.mid.u},
            {"u_plus", p.right.u}};
}

json to_json(const VerificationReport& report) {
    json verdicts = json::array();
    for (const CaseVerdict& v : report.verdicts) {
        const TheoremCase& c = v.theorem_case;
        verdicts.push_back({{"id", c.id},
                            {"s", c.s},
                            {"t", c.t},
                            {"kind_s", to_string(c.kind_s)},
                            {"kind_t", to_string(c.kind_t)},
                            {"conclusion", c.conclusion.shape()},
                            {"hypotheses", c.hypotheses},
                            {"diagnostic", c.diagnostic},
                            {"pass", v.pass},
                            {"witness", v.witness ? json(*v.witness) : json(nullptr)},
                            {"detail", v.detail}});
    }
    json lemmas = json::array();
    for (const LemmaCheck& l : report.lemma_checks) {
        lemmas.push_back({{"lemma", l.lemma}, {"x", l.position}, {"value", l.value}, {"pass", l.pass}});
    }
    json inapplicable = json::array();
    for (const auto& [s, t] : report.inapplicable) inapplicable.push_back({s, t});
    return {{"theorem", report.theorem},
            {"zeros", report.zeros},
            {"verdicts", verdicts},
            {"lemma_checks", lemmas},
            {"inapplicable", inapplicable},
            {"failures", report.failures()},
            {"warnings", report.warnings()},
            {"pass", report.pass()}};
}

json to_json(const Instance& inst) {
    const Problem& p = *inst.problem;
    json j = {{"seed", inst.seed},
              {"target", inst.target},
              {"interval", {{"a", p.interval().a}, {"b", p.interval().b}}},
              {"r", p.r()},
              {"alpha", to_json(p.alpha())},
              {"beta", to_json(p.beta())},
              {"ivp", ivp_json(inst.u)},
              {"ivp2", ivp_json(inst.v)}};
    if (inst.problem2) j["beta2"] = to_json(inst.problem2->beta());
    return j;
}

json to_json(const CampaignSummary& s) {
    json failures = json::array();
    for (const CampaignFailure& f : s.failures) {
        failures.push_back(
            {{"index", f.index}, {"seed", f.seed}, {"message", f.message}, {"instance", f.instance}});
    }
    json maxima = json::object();
    for (const auto& [k, v] : s.maxima) maxima[k] = number_or_null(v);
    return {{"mode", to_string(s.mode)},
            {"n", s.n},
            {"seed", s.seed},
            {"clause_counts", s.clause_counts},
            {"checks", s.checks},
            {"maxima", maxima},
            {"inapplicable", s.inapplicable},
            {"warnings", s.warnings},
            {"target_misses", s.target_misses},
            {"failures", failures},
            {"pass", s.pass()}};
}

}  // namespace msl
