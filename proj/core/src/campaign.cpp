#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "msl/campaign.hpp"
#include "msl/errors.hpp"
#include "msl/json_io.hpp"
#include "msl/oracle.hpp"
#include "msl/theorems.hpp"
#include "theorem_support.hpp"

namespace msl {

namespace {

using detail::End;

struct Outcome {
    std::map<std::string, std::size_t> clause_counts;
    std::map<std::string, std::size_t> checks;
    std::map<std::string, double> maxima;
    std::size_t inapplicable = 0;
    std::size_t warnings = 0;
    std::size_t target_misses = 0;
    std::vector<std::string> failures;
    std::uint64_t seed = 0;
    nlohmann::json instance;

    void check(const std::string& name, bool ok, const std::string& message) {
        ++checks[name];
        if (!ok) failures.push_back(name + ": " + message);
    }
    void record_max(const std::string& name, double value) {
        auto [it, inserted] = maxima.emplace(name, value);
        if (!inserted) it->second = std::max(it->second, value);
    }
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : x < 0.0 ? -1.0 : 0.0; }

Solution solve(const std::shared_ptr<const Problem>& p, const IvpData& ivp) {
    return solve_ivp(p, ivp.x0, ivp.u0, ivp.v0);
}

// Isolation of Z(u), the sign-change rules at each point, and the intermediate
// and mean value properties between consecutive points.
void run_isolation(const Instance& inst, const CampaignOptions& opt, Outcome& out) {
    const Problem& p = *inst.problem;
    const Solution u = solve(inst.problem, inst.u);
    const auto points = find_sign_changes(u, opt.analysis);
    const double r = p.r();

    bool all_theta_positive = true;
    for (const Jump& j : p.jumps()) {
        all_theta_positive = all_theta_positive && theta(p, r, j.position) > 0.0 &&
                             theta(p, 1.0 - r, j.position) > 0.0;
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        const SignChangePoint& pt = points[i];
        const double x = pt.position;
        if (i > 0) {
            out.check("isolation", x > points[i - 1].position, "non-positive gap at " + detail::fmt(x));
        }
        switch (pt.kind) {
            case ZeroKind::ContinuousZero:
                out.check("continuous-zero", pt.changes_sign, "continuous zero without sign change at " + detail::fmt(x));
                break;
            case ZeroKind::LeftZero: {
                // u leaves zero to the left with slope sign(v^-); compare with u^+.
                const bool actual = -sign_of(pt.left.v) != sign_of(pt.right.u);
                const bool predicted = theta(p, 1.0 - r, x) > 0.0;
                out.check("left-zero", pt.changes_sign == predicted && actual == predicted,
                          "left zero verdict mismatch at " + detail::fmt(x));
                break;
            }
            case ZeroKind::RightZero: {
                const bool actual = sign_of(pt.left.u) != sign_of(pt.right.v);
                const bool predicted = theta(p, r, x) > 0.0;
                out.check("right-zero", pt.changes_sign == predicted && actual == predicted,
                          "right zero verdict mismatch at " + detail::fmt(x));
                break;
            }
            case ZeroKind::StrictFlip:
                out.check("strict-flip", pt.changes_sign && pt.criterion.window_holds,
                          "flip window violated at " + detail::fmt(x) + ": " + pt.criterion.describe());
                break;
        }
        if (all_theta_positive) {
            out.check("positive-theta", pt.changes_sign, "sign change expected at " + detail::fmt(x));
        }
    }

    // Intermediate value theorem: one strict sign of u^- and u^+ on each gap.
    const Interval& iv = p.interval();
    std::vector<double> edges{iv.a};
    for (const SignChangePoint& pt : points) edges.push_back(pt.position);
    edges.push_back(iv.b);
    for (std::size_t g = 0; g + 1 < edges.size(); ++g) {
        const double lo = edges[g];
        const double hi = edges[g + 1];
        std::vector<double> xs;
        constexpr int kSamples = 32;
        for (int k = 1; k < kSamples; ++k) xs.push_back(lo + (hi - lo) * k / kSamples);
        for (double n : p.nodes()) {
            if (n > lo && n < hi) xs.push_back(n);
        }
        double sign = 0.0;
        bool ok = true;
        for (double x : xs) {
            const AtomRecord rec = u.sides_at(x);
            for (double w : {rec.left.u, rec.right.u}) {
                const double sw = sign_of(w);
                if (sw == 0.0 || (sign != 0.0 && sw != sign)) ok = false;
                sign = sw;
            }
        }
        out.check("ivt", ok, "sign of u not constant on (" + detail::fmt(lo) + ", " + detail::fmt(hi) + ")");
    }

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double s = points[i].position;
        const double t = points[i + 1].position;
        const double w = mean_value_witness(u, s, t, opt.analysis);
        const AtomRecord rec = u.sides_at(w);
        const double big = std::max({1.0, std::abs(rec.left.v), std::abs(rec.right.v)});
        const bool ok = w >= s && w <= t &&
                        (rec.left.v * rec.right.v <= 0.0 ||
                         std::min(std::abs(rec.left.v), std::abs(rec.right.v)) <= 1e-9 * big);
        out.check("mvt", ok, "no quasi-derivative sign change at witness " + detail::fmt(w));
    }
}

/// Independent re-evaluation of a clause's endpoint hypotheses from raw
/// one-sided values and the hypothesis table.
bool endpoints_sound(const Solution& u, const TheoremCase& c, const AnalysisOptions& opt) {
    std::string id = c.id;
    if (!id.empty() && (id.back() == 'e' || id.back() == '\'')) id.pop_back();
    const auto it = std::find_if(detail::kClauses.begin(), detail::kClauses.end(),
                                 [&](const detail::ClauseShape& cs) { return id == cs.id; });
    if (it == detail::kClauses.end()) return false;
    auto holds = [&](End e, double x) {
        const AtomRecord rec = u.sides_at(x);
        const double bound = opt.zero_tolerance * local_scale(u, x);
        switch (e) {
            case End::plus_zero: return std::abs(rec.right.u) <= bound;
            case End::minus_zero: return std::abs(rec.left.u) <= bound;
            case End::flip: return rec.left.u * rec.right.u < 0.0;
        }
        return false;
    };
    return holds(it->at_s, c.s) && holds(it->at_t, c.t);
}

void record_report(const Solution& u, const VerificationReport& report, const AnalysisOptions& opt,
                   Outcome& out) {
    out.inapplicable += report.inapplicable.size();
    for (const CaseVerdict& v : report.verdicts) {
        const TheoremCase& c = v.theorem_case;
        ++out.clause_counts[c.id];
        out.check("soundness", endpoints_sound(u, c, opt), "clause " + c.id + " endpoint hypotheses");
        if (c.diagnostic) {
            if (!v.pass) ++out.warnings;
            continue;
        }
        out.check("clause", v.pass,
                  c.id + " on (" + detail::fmt(c.s) + ", " + detail::fmt(c.t) + "): " + v.detail);
    }
    for (const LemmaCheck& l : report.lemma_checks) {
        out.check(l.lemma, l.pass, "value " + detail::fmt(l.value) + " at " + detail::fmt(l.position));
    }
}

void run_separation(const Instance& inst, const CampaignOptions& opt, Outcome& out) {
    const Solution u = solve(inst.problem, inst.u);
    const Solution v = solve(inst.problem, inst.v);
    record_report(u, verify_separation(u, v, opt.analysis), opt.analysis, out);
}

void run_comparison(const Instance& inst, const CampaignOptions& opt, Outcome& out) {
    const Solution u = solve(inst.problem, inst.u);
    const Solution v = solve(inst.problem2, inst.v);
    const PiecewiseMeasure diff = inst.problem->beta() - inst.problem2->beta();
    const Interval& iv = diff.interval();
    out.check("difference", diff.is_nonnegative_on(iv.a, iv.b, false, false),
              "d(beta1-beta2) has a negative part");
    record_report(u, verify_comparison(u, v, opt.analysis), opt.analysis, out);
}

void run_wronskian(const Instance& inst, const CampaignOptions& opt, Outcome& out) {
    const Problem& p = *inst.problem;
    const Solution u = solve(inst.problem, inst.u);
    const Solution v = solve(inst.problem, inst.v);
    const Interval& iv = p.interval();
    const double r = p.r();

    std::vector<double> xs;
    constexpr int kSamples = 64;
    for (int k = 1; k < kSamples; ++k) xs.push_back(iv.a + iv.length() * k / kSamples);
    for (const Jump& j : p.jumps()) xs.push_back(j.position);
    std::sort(xs.begin(), xs.end());

    for (const Jump& j : p.jumps()) {
        const double res = wronskian(u, v, j.position).relation_residual;
        out.record_max("relation", res);
        out.check("relation", res <= opt.relation_tolerance,
                  "W relation residual " + detail::fmt(res) + " at " + detail::fmt(j.position));
    }

    const PiecewiseMeasure gamma = wronskian_jump_measure(p);
    for (const Jump& j : p.jumps()) {
        const double lhs = 1.0 + delta(gamma, j.position);
        const double rhs = theta_ratio(p, j.position);
        out.check("gamma", std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)),
                  "1 + dgamma != theta at " + detail::fmt(j.position));
    }

    if (r == 0.5) {
        const double w0 = wronskian(u, v, inst.u.x0).w_minus;
        double worst = 0.0;
        for (double x : xs) {
            // At an atom the product of balanced values is W^-/theta_{1/2};
            // the one-sided limits carry the constancy there.
            const WronskianValues w = wronskian(u, v, x);
            worst = std::max({worst, std::abs(w.w_minus - w0), std::abs(w.w_plus - w0)});
            if (!p.jump_at(x)) worst = std::max(worst, std::abs(w.w - w0));
        }
        const double rel = worst / std::abs(w0);
        out.record_max("constancy", rel);
        out.check("constancy", rel <= opt.constancy_tolerance, "balanced Wronskian varies by " + detail::fmt(rel));
    }

    // Product and series formulas from the first sample to every later point.
    const double x = xs.front();
    const double wx = wronskian(u, v, x).w_minus;
    for (double y : xs) {
        if (!(y > x)) continue;
        const double direct = wronskian(u, v, y).w_minus;
        const double scale = std::abs(direct);
        const double prod = wronskian_product(u, v, x, y);
        const double series = wx * wronskian_series(p, x, y);
        const double e1 = std::abs(prod - direct) / scale;
        const double e2 = std::abs(series - direct) / scale;
        out.record_max("product", e1);
        out.record_max("series", e2);
        out.check("product", e1 <= opt.product_tolerance, "product formula error " + detail::fmt(e1));
        out.check("series", e2 <= opt.product_tolerance, "series formula error " + detail::fmt(e2));
    }

    // W vanishes at one point iff everywhere iff the pair is dependent.
    const Solution dep = solve_ivp(inst.problem, inst.u.x0, -2.5 * inst.u.u0, -2.5 * inst.u.v0);
    bool dep_ok = true;
    bool indep_ok = true;
    for (double y : xs) {
        const AtomRecord a = u.sides_at(y);
        const AtomRecord b = dep.sides_at(y);
        const double scale_ab = (a.mid.max_norm() + a.left.max_norm() + a.right.max_norm()) *
                                (b.mid.max_norm() + b.left.max_norm() + b.right.max_norm());
        const WronskianValues wd = wronskian(u, dep, y);
        dep_ok = dep_ok && std::max({std::abs(wd.w), std::abs(wd.w_minus), std::abs(wd.w_plus)}) <=
                               1e-12 * scale_ab;
        const WronskianValues wi = wronskian(u, v, y);
        indep_ok = indep_ok && wi.w != 0.0 && wi.w_minus != 0.0 && wi.w_plus != 0.0;
    }
    out.check("equivalence", dep_ok && indep_ok, "Wronskian zero set inconsistent with dependence");
}

void run_oracle(const Instance& inst, const CampaignOptions& opt, Outcome& out) {
    const Problem& p = *inst.problem;
    const Solution u = solve(inst.problem, inst.u);
    const OracleSamples one =
        onestep_solve(p, inst.u.x0, inst.u.u0, inst.u.v0, opt.onestep_steps, opt.onestep_steps / 8);
    const double d1 = sample_deviation(one, u);
    out.record_max("onestep", d1);
    out.check("onestep", d1 <= opt.onestep_tolerance, "one-step deviation " + detail::fmt(d1));

    const Interval& iv = p.interval();
    const double lo = iv.a + 0.25 * iv.length();
    const double hi = iv.b - 0.25 * iv.length();
    const PicardResult pic =
        picard_solve(p, inst.u.x0, inst.u.u0, inst.u.v0, opt.picard_iterations, opt.picard_mesh, lo, hi);
    const double d2 = sample_deviation(pic.samples, u);
    out.record_max("picard", d2);
    out.check("picard", d2 <= opt.picard_tolerance, "Picard deviation " + detail::fmt(d2));
}

Outcome run_one(CampaignMode mode, std::size_t index, std::uint64_t seed, const CampaignOptions& opt) {
    Outcome out;
    out.seed = instance_seed(seed, index);
    const auto targets = instance_targets(mode);
    const std::string target = targets.empty() ? std::string() : targets[index % targets.size()];
    InstanceConfig cfg = opt.instance;
    if (mode == CampaignMode::wronskian && index % 2 == 0) cfg.r = 0.5;
    try {
        const Instance inst = random_instance(out.seed, cfg, mode, target);
        out.instance = to_json(inst);
        if (inst.target != target) ++out.target_misses;
        switch (mode) {
            case CampaignMode::isolation: run_isolation(inst, opt, out); break;
            case CampaignMode::separation: run_separation(inst, opt, out); break;
            case CampaignMode::comparison: run_comparison(inst, opt, out); break;
            case CampaignMode::wronskian: run_wronskian(inst, opt, out); break;
            case CampaignMode::oracle: run_oracle(inst, opt, out); break;
        }
    } catch (const std::exception& e) {
        out.failures.push_back(std::string("exception: ") + e.what());
    }
    return out;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

CampaignSummary run_campaign(CampaignMode mode, std::size_t n, std::uint64_t seed,
                             const CampaignOptions& options) {
    std::vector<Outcome> outcomes(n);
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) outcomes[i] = run_one(mode, i, seed, options);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) outcomes[i] = run_one(mode, i, seed, options);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    CampaignSummary summary;
    summary.mode = mode;
    summary.n = n;
    summary.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        Outcome& o = outcomes[i];
        for (const auto& [k, v] : o.clause_counts) summary.clause_counts[k] += v;
        for (const auto& [k, v] : o.checks) summary.checks[k] += v;
        for (const auto& [k, v] : o.maxima) {
            auto [it, inserted] = summary.maxima.emplace(k, v);
            if (!inserted) it->second = std::max(it->second, v);
        }
        summary.inapplicable += o.inapplicable;
        summary.warnings += o.warnings;
        summary.target_misses += o.target_misses;
        for (const std::string& msg : o.failures) {
            summary.failures.push_back({i, o.seed, msg, o.instance});
        }
    }
    return summary;
}

}  // namespace msl
