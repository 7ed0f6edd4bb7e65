#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "msl/analysis.hpp"
#include "msl/errors.hpp"
#include "msl/propagator.hpp"
#include "msl/theorems.hpp"

namespace msl::cli {

using nlohmann::json;

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const Problem& require_problem(const RunConfig& cfg) {
    if (!cfg.problem) throw ConfigError("interval", "the command needs an equation (interval, r, alpha, beta)");
    return *cfg.problem;
}

const IvpData& require_ivp(const std::optional<IvpData>& ivp, const char* field) {
    if (!ivp) throw ConfigError(field, "missing");
    return *ivp;
}

Solution solve(const std::shared_ptr<const Problem>& p, const IvpData& d) {
    return solve_ivp(p, d.x0, d.u0, d.v0);
}

// Uniform interior points plus every atom, sorted; samples landing on an atom
// are absorbed by the atom.
struct SamplePoint {
    double x;
    bool atom;
};

std::vector<SamplePoint> sample_points(const Problem& p, std::size_t samples) {
    const Interval& iv = p.interval();
    std::vector<SamplePoint> pts;
    for (std::size_t k = 1; k <= samples; ++k) {
        const double x = iv.a + iv.length() * static_cast<double>(k) / static_cast<double>(samples + 1);
        if (!p.jump_at(x)) pts.push_back({x, false});
    }
    for (const Jump& j : p.jumps()) pts.push_back({j.position, true});
    std::sort(pts.begin(), pts.end(), [](const SamplePoint& l, const SamplePoint& r) { return l.x < r.x; });
    return pts;
}

}  // namespace

CommandResult cmd_check(const RunConfig& cfg) {
    const Problem& p = require_problem(cfg);
    const HypothesisReport report = check_hypothesis(p);
    json doc = to_json(report);
    bool pass = report.pass;
    std::vector<std::string> messages = report.messages;
    if (cfg.problem2) {
        const HypothesisReport pair = check_comparison_hypothesis(p.alpha(), p.beta(), cfg.problem2->beta());
        doc = {{"equation", doc}, {"comparison", to_json(pair)}, {"pass", report.pass && pair.pass}};
        pass = pass && pair.pass;
        messages.insert(messages.end(), pair.messages.begin(), pair.messages.end());
    }
    CommandResult out{dump(doc), pass ? ok : hypothesis_failure, {}};
    if (!pass) {
        std::string diag = "hypothesis violated";
        for (const std::string& m : messages) diag += "; " + m;
        out.diagnostic = diag;
    }
    return out;
}

CommandResult cmd_solve(const RunConfig& cfg) {
    require_problem(cfg);
    const Solution u = solve(cfg.problem, require_ivp(cfg.ivp, "ivp"));
    std::ostringstream csv;
    csv << "x,side,u_minus,u,u_plus,v_minus,v,v_plus\n";
    auto row = [&](double x, const char* side, const State& at, const AtomRecord& rec) {
        csv << num(x) << ',' << side << ',' << num(rec.left.u) << ',' << num(at.u) << ',' << num(rec.right.u)
            << ',' << num(rec.left.v) << ',' << num(at.v) << ',' << num(rec.right.v) << '\n';
    };
    for (const SamplePoint& s : sample_points(*cfg.problem, cfg.samples)) {
        const AtomRecord rec = u.sides_at(s.x);
        if (!s.atom) {
            row(s.x, "sample", rec.mid, rec);
            continue;
        }
        row(s.x, "left", rec.left, rec);
        row(s.x, "mid", rec.mid, rec);
        row(s.x, "right", rec.right, rec);
    }
    return {csv.str(), ok, {}};
}

CommandResult cmd_zeros(const RunConfig& cfg) {
    require_problem(cfg);
    const Solution u = solve(cfg.problem, require_ivp(cfg.ivp, "ivp"));
    std::ostringstream csv;
    csv << "x,kind,changes_sign,rule,criterion_value,u_minus,u,u_plus\n";
    for (const SignChangePoint& z : find_sign_changes(u, cfg.analysis)) {
        csv << num(z.position) << ',' << to_string(z.kind) << ',' << (z.changes_sign ? "true" : "false") << ','
            << to_string(z.criterion.rule) << ',' << num(z.criterion.value) << ',' << num(z.left.u) << ','
            << num(z.mid.u) << ',' << num(z.right.u) << '\n';
    }
    return {csv.str(), ok, {}};
}

CommandResult cmd_wronskian(const RunConfig& cfg) {
    require_problem(cfg);
    const Solution u = solve(cfg.problem, require_ivp(cfg.ivp, "ivp"));
    const Solution v = solve(cfg.problem, require_ivp(cfg.ivp2, "ivp2"));
    const std::vector<SamplePoint> pts = sample_points(*cfg.problem, cfg.samples);
    std::ostringstream csv;
    csv << "x,W,W_minus,W_plus,relation_residual,product_residual\n";
    if (pts.empty()) return {csv.str(), ok, {}};
    // Product formula carried from the first row to every row.
    const double x0 = pts.front().x;
    for (const SamplePoint& s : pts) {
        const WronskianValues w = wronskian(u, v, s.x);
        double product_residual = 0.0;
        if (s.x > x0) {
            const double prod = wronskian_product(u, v, x0, s.x);
            product_residual = std::abs(prod - w.w_minus) / std::max(std::abs(w.w_minus), 1e-300);
        }
        csv << num(s.x) << ',' << num(w.w) << ',' << num(w.w_minus) << ',' << num(w.w_plus) << ','
            << num(w.relation_residual) << ',' << num(product_residual) << '\n';
    }
    return {csv.str(), ok, {}};
}

namespace {

CommandResult report_result(const VerificationReport& report) {
    CommandResult out{dump(to_json(report)), report.pass() ? ok : verification_failure, {}};
    if (!report.pass()) out.diagnostic = report.theorem + " verification failed: " + std::to_string(report.failures()) + " failure(s)";
    return out;
}

}  // namespace

CommandResult cmd_separation(const RunConfig& cfg) {
    require_problem(cfg);
    const Solution u = solve(cfg.problem, require_ivp(cfg.ivp, "ivp"));
    const Solution v = solve(cfg.problem, require_ivp(cfg.ivp2, "ivp2"));
    return report_result(verify_separation(u, v, cfg.analysis));
}

CommandResult cmd_comparison(const RunConfig& cfg) {
    require_problem(cfg);
    if (!cfg.problem2) throw ConfigError("beta2", "missing");
    const Solution u = solve(cfg.problem, require_ivp(cfg.ivp, "ivp"));
    const Solution v = solve(cfg.problem2, require_ivp(cfg.ivp2, "ivp2"));
    return report_result(verify_comparison(u, v, cfg.analysis));
}

CommandResult cmd_verify(const RunConfig& cfg) {
    CampaignOptions opts = cfg.campaign;
    opts.analysis = cfg.analysis;
    const CampaignSummary summary = run_campaign(cfg.mode, cfg.n, cfg.seed, opts);
    CommandResult out{dump(to_json(summary)), summary.pass() ? ok : verification_failure, {}};
    if (!summary.pass()) {
        const CampaignFailure& f = summary.failures.front();
        out.diagnostic = std::to_string(summary.failures.size()) + " failure(s); first at index " +
                         std::to_string(f.index) + ", reproduction seed " + std::to_string(f.seed) + ": " + f.message;
    }
    return out;
}

}  // namespace msl::cli
