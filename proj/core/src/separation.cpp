#include <algorithm>
#include <cmath>
#include <cstdio>

#include "msl/errors.hpp"
#include "msl/theorems.hpp"
#include "theorem_support.hpp"

namespace msl {

namespace detail {

std::vector<End> readings_at_s(ZeroKind kind) {
    switch (kind) {
        case ZeroKind::ContinuousZero: return {End::plus_zero, End::minus_zero};
        case ZeroKind::RightZero: return {End::plus_zero};
        case ZeroKind::LeftZero: return {End::minus_zero};
        case ZeroKind::StrictFlip: return {End::flip};
    }
    return {};
}

std::vector<End> readings_at_t(ZeroKind kind) {
    switch (kind) {
        case ZeroKind::ContinuousZero: return {End::minus_zero, End::plus_zero};
        case ZeroKind::LeftZero: return {End::minus_zero};
        case ZeroKind::RightZero: return {End::plus_zero};
        case ZeroKind::StrictFlip: return {End::flip};
    }
    return {};
}

const ClauseShape& clause_for(End at_s, End at_t) {
    for (const ClauseShape& c : kClauses) {
        if (c.at_s == at_s && c.at_t == at_t) return c;
    }
    throw InvariantError("clause table is incomplete");
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string end_condition(End e, const char* point) {
    const std::string p = point;
    switch (e) {
        case End::plus_zero: return "u^+(" + p + ")=0";
        case End::minus_zero: return "u^-(" + p + ")=0";
        case End::flip: return "u^-(" + p + ")u^+(" + p + ")<0";
    }
    return {};
}

std::array<SignChangePoint, 2> consecutive_pair(const Solution& u, double s, double t,
                                                const AnalysisOptions& options) {
    if (!(s < t)) throw PreconditionError("consecutive points require s < t");
    const auto points = find_sign_changes(u, s, t, options);
    auto near = [](double x, double y) {
        return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y));
    };
    if (points.size() != 2 || !near(points[0].position, s) || !near(points[1].position, t)) {
        throw PreconditionError("s=" + fmt(s) + " and t=" + fmt(t) +
                                " are not consecutive points of Z(u)");
    }
    return {points[0], points[1]};
}

TheoremCase make_case(const ClauseShape& shape, const SignChangePoint& s, const SignChangePoint& t) {
    TheoremCase c;
    c.id = shape.id;
    c.s = s.position;
    c.t = t.position;
    c.kind_s = s.kind;
    c.kind_t = t.kind;
    c.conclusion = {s.position, t.position, closed_at_s(shape.at_s), closed_at_t(shape.at_t)};
    c.hypotheses = {end_condition(shape.at_s, "s"), end_condition(shape.at_t, "t")};
    return c;
}

bool changes_sign_here(const Solution& v, double x, const AnalysisOptions& options) {
    if (!zero_kind_at(v, x, options)) return false;
    return changes_sign_at(v, x, options).changes_sign;
}

CaseVerdict check_conclusion(const Solution& v, const TheoremCase& c,
                             const AnalysisOptions& options) {
    CaseVerdict out{c, false, std::nullopt, {}};
    const ConclusionInterval& ci = c.conclusion;
    if (ci.include_lo && changes_sign_here(v, ci.lo, options)) {
        out.witness = ci.lo;
    }
    if (!out.witness) {
        for (const SignChangePoint& p : find_sign_changes(v, ci.lo, ci.hi, options)) {
            if (p.position > ci.lo && p.position < ci.hi && p.changes_sign) {
                out.witness = p.position;
                break;
            }
        }
    }
    if (!out.witness && ci.include_hi && changes_sign_here(v, ci.hi, options)) {
        out.witness = ci.hi;
    }
    out.pass = out.witness.has_value();
    out.detail = out.pass ? "v changes sign at " + fmt(*out.witness)
                          : "no sign change of v in " + ci.shape();
    return out;
}

}  // namespace detail

std::string ConclusionInterval::shape() const {
    return std::string(include_lo ? "[" : "(") + "s,t" + (include_hi ? "]" : ")");
}

std::size_t VerificationReport::failures() const {
    std::size_t n = 0;
    for (const CaseVerdict& v : verdicts) n += (!v.pass && !v.theorem_case.diagnostic) ? 1 : 0;
    for (const LemmaCheck& l : lemma_checks) n += l.pass ? 0 : 1;
    return n;
}

std::size_t VerificationReport::warnings() const {
    std::size_t n = 0;
    for (const CaseVerdict& v : verdicts) n += (!v.pass && v.theorem_case.diagnostic) ? 1 : 0;
    return n;
}

namespace {

using detail::End;

std::vector<SeparationCase> classify_pair(const Solution& u, const SignChangePoint& s,
                                          const SignChangePoint& t) {
    const Problem& p = u.problem();
    const double r = p.r();

    // theta = 1 off atoms, so only atoms strictly inside (s, t) matter.
    std::size_t negative = 0;
    double min_theta = 1.0;
    for (const Jump& j : p.jumps()) {
        if (j.position <= s.position || j.position >= t.position) continue;
        const double th = theta_ratio(p, j.position);
        min_theta = std::min(min_theta, th);
        if (th <= 0.0) ++negative;
    }
    const bool theta_positive = negative == 0;
    const bool even_diagnostic = !theta_positive && negative % 2 == 0;
    if (!theta_positive && !even_diagnostic) return {};

    const double theta_r_s = theta(p, r, s.position);
    const double theta_1mr_t = theta(p, 1.0 - r, t.position);

    for (End at_s : detail::readings_at_s(s.kind)) {
        for (End at_t : detail::readings_at_t(t.kind)) {
            const detail::ClauseShape& shape = detail::clause_for(at_s, at_t);
            const bool first_theorem = shape.id[1] == '.';
            if (even_diagnostic && !first_theorem) continue;
            double product = 1.0;
            if (at_s != End::plus_zero) product *= theta_r_s;
            if (at_t != End::minus_zero) product *= theta_1mr_t;
            if (!(product > 0.0)) continue;

            TheoremCase c = detail::make_case(shape, s, t);
            c.hypotheses.push_back(theta_positive ? "theta>0 on (s,t)"
                                                  : "theta<0 at " + std::to_string(negative) +
                                                        " atoms of (s,t)");
            c.hypotheses.push_back("min theta on (s,t)=" + detail::fmt(min_theta));
            if (at_s != End::plus_zero) c.hypotheses.push_back("theta_r(s)=" + detail::fmt(theta_r_s));
            if (at_t != End::minus_zero) {
                c.hypotheses.push_back("theta_{1-r}(t)=" + detail::fmt(theta_1mr_t));
            }
            if (even_diagnostic) {
                c.id += "e";
                c.diagnostic = true;
            }
            return {c};
        }
    }
    return {};
}

void require_independent(const Solution& u, const Solution& v, double x) {
    const State U = u.evaluate(x);
    const State V = v.evaluate(x);
    const double w = U.u * V.v - V.u * U.v;
    const double scale = std::abs(U.u * V.v) + std::abs(V.u * U.v);
    if (std::abs(w) <= 1e-12 * scale || scale == 0.0) {
        throw PreconditionError("u and v are linearly dependent (W=" + detail::fmt(w) + ")");
    }
}

}  // namespace

std::vector<SeparationCase> classify_separation(const Solution& u, double s, double t,
                                                const AnalysisOptions& options) {
    const auto pair = detail::consecutive_pair(u, s, t, options);
    return classify_pair(u, pair[0], pair[1]);
}

VerificationReport verify_separation(const Solution& u, const Solution& v,
                                     const AnalysisOptions& options) {
    if (!u.same_problem(v)) {
        throw PreconditionError("separation requires two solutions of the same equation");
    }
    if (u.trivial() || v.trivial()) throw PreconditionError("separation requires nontrivial solutions");
    require_independent(u, v, u.x0());

    VerificationReport report;
    report.theorem = "separation";
    const auto points = find_sign_changes(u, options);
    for (const SignChangePoint& p : points) report.zeros.push_back(p.position);

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto cases = classify_pair(u, points[i], points[i + 1]);
        if (cases.empty()) report.inapplicable.emplace_back(points[i].position, points[i + 1].position);
        for (const SeparationCase& c : cases) {
            report.verdicts.push_back(detail::check_conclusion(v, c, options));
        }
    }
    for (const SignChangePoint& p : points) {
        if (p.kind != ZeroKind::StrictFlip) continue;
        if (detail::changes_sign_here(v, p.position, options)) continue;
        const State V = v.evaluate(p.position);
        const double e = V.u * p.mid.v * wronskian(u, v, p.position).w;
        report.lemma_checks.push_back({"flip-wronskian", p.position, e, e < 0.0});
    }
    return report;
}

}  // namespace msl
