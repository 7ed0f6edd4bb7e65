#include <cmath>

#include "msl/errors.hpp"
#include "msl/theorems.hpp"
#include "theorem_support.hpp"

namespace msl {

namespace {

using detail::End;

void require_comparison_pair(const Solution& u, const Solution& v) {
    if (u.problem().r() != 0.5 || v.problem().r() != 0.5) {
        throw PreconditionError("comparison requires balanced solutions (r = 1/2)");
    }
    if (!(u.problem().alpha() == v.problem().alpha())) {
        throw PreconditionError("comparison requires both equations to share alpha");
    }
    if (u.trivial() || v.trivial()) throw PreconditionError("comparison requires nontrivial solutions");
}

std::vector<ComparisonCase> classify_pair(const Solution& u, const Solution& v,
                                          const SignChangePoint& s, const SignChangePoint& t) {
    const PiecewiseMeasure& alpha = u.problem().alpha();
    const PiecewiseMeasure& beta1 = u.problem().beta();
    const PiecewiseMeasure diff = beta1 - v.problem().beta();
    const double w1_s = omega(alpha, beta1, s.position);
    const double w1_t = omega(alpha, beta1, t.position);

    for (End at_s : detail::readings_at_s(s.kind)) {
        for (End at_t : detail::readings_at_t(t.kind)) {
            const detail::ClauseShape& shape = detail::clause_for(at_s, at_t);
            const bool inc_s = detail::closed_at_s(at_s);
            const bool inc_t = detail::closed_at_t(at_t);
            const bool positive = diff.is_nonnegative_on(s.position, t.position, inc_s, inc_t);
            const bool w_s_ok = !inc_s || w1_s > 0.0;
            const bool w_t_ok = !inc_t || w1_t > 0.0;

            bool holds = positive && w_s_ok && w_t_ok;
            std::string measure_note = "d(beta1-beta2)>=0 on " +
                                       ConclusionInterval{0, 0, inc_s, inc_t}.shape();
            if (holds && !inc_s && !inc_t) {
                const double mass = diff.measure_of(s.position, t.position, false, false);
                holds = mass > 0.0;
                measure_note = "d(beta1-beta2) nontrivial positive on (s,t), mass=" + detail::fmt(mass);
            }
            if (holds) {
                TheoremCase c = detail::make_case(shape, s, t);
                c.hypotheses.push_back(measure_note);
                if (inc_s) c.hypotheses.push_back("omega_1(s)=" + detail::fmt(w1_s));
                if (inc_t) c.hypotheses.push_back("omega_1(t)=" + detail::fmt(w1_t));
                return {c};
            }
            // Remark after the first comparison theorem: clause 4 with both
            // omega_1 negative and the difference measure reversed.
            if (at_s == End::minus_zero && at_t == End::plus_zero && w1_s < 0.0 && w1_t < 0.0) {
                const PiecewiseMeasure reversed = v.problem().beta() - beta1;
                if (reversed.is_nonnegative_on(s.position, t.position, true, true)) {
                    TheoremCase c = detail::make_case(shape, s, t);
                    c.id = "I.4'";
                    c.hypotheses.push_back("d(beta2-beta1)>=0 on [s,t]");
                    c.hypotheses.push_back("omega_1(s)=" + detail::fmt(w1_s));
                    c.hypotheses.push_back("omega_1(t)=" + detail::fmt(w1_t));
                    return {c};
                }
            }
        }
    }
    return {};
}

State side_state(const Solution& sol, double x, Side side) { return sol.evaluate(x, side); }

}  // namespace

std::vector<ComparisonCase> classify_comparison(const Solution& u, const Solution& v, double s,
                                                double t, const AnalysisOptions& options) {
    require_comparison_pair(u, v);
    const auto pair = detail::consecutive_pair(u, s, t, options);
    return classify_pair(u, v, pair[0], pair[1]);
}

VerificationReport verify_comparison(const Solution& u, const Solution& v,
                                     const AnalysisOptions& options) {
    require_comparison_pair(u, v);
    const PiecewiseMeasure& alpha = u.problem().alpha();
    const PiecewiseMeasure& beta1 = u.problem().beta();
    const PiecewiseMeasure& beta2 = v.problem().beta();
    const HypothesisReport hyp = check_comparison_hypothesis(alpha, beta1, beta2);
    if (!hyp.pass) {
        for (const AtomDiagnostics& d : hyp.atoms) {
            if (!d.pass) throw HypothesisError(hyp.messages.front(), d.position);
        }
        throw HypothesisError(hyp.messages.front());
    }

    VerificationReport report;
    report.theorem = "comparison";
    const auto points = find_sign_changes(u, options);
    for (const SignChangePoint& p : points) report.zeros.push_back(p.position);

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto cases = classify_pair(u, v, points[i], points[i + 1]);
        if (cases.empty()) report.inapplicable.emplace_back(points[i].position, points[i + 1].position);
        for (const ComparisonCase& c : cases) {
            report.verdicts.push_back(detail::check_conclusion(v, c, options));
        }
    }
    for (const SignChangePoint& p : points) {
        if (p.kind != ZeroKind::StrictFlip) continue;
        if (detail::changes_sign_here(v, p.position, options)) continue;
        const double x = p.position;
        const double vu = side_state(v, x, Side::mid).u * p.mid.v;
        const double e = vu * modified_wronskian(v, u, x, Side::mid);
        report.lemma_checks.push_back({"flip-modified", x, e, e > 0.0});
        if (omega(alpha, beta1, x) > 0.0 && delta(beta1, x) >= delta(beta2, x)) {
            const double em = vu * modified_wronskian(v, u, x, Side::left);
            const double ep = vu * modified_wronskian(v, u, x, Side::right);
            report.lemma_checks.push_back({"flip-modified-left", x, em, em > 0.0});
            report.lemma_checks.push_back({"flip-modified-right", x, ep, ep > 0.0});
        }
    }
    return report;
}

}  // namespace msl
