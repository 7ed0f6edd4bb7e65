#include "msl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "msl/errors.hpp"

namespace msl {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double max_abs(double a, double b, double c) {
    return std::max({std::abs(a), std::abs(b), std::abs(c)});
}

double local_alpha_length(const Solution& sol, double x) {
    const Problem& p = sol.problem();
    double ell = 0.0;
    if (const Jump* j = p.jump_at(x)) ell = std::abs(j->d_alpha);
    const std::size_t idx = p.piece_index(x);
    const auto pieces = p.pieces();
    auto mass = [](const Piece& piece) { return piece.alpha_density * (piece.x_hi - piece.x_lo); };
    ell = std::max(ell, mass(pieces[idx]));
    if (x == p.nodes()[idx] && idx > 0) ell = std::max(ell, mass(pieces[idx - 1]));
    return ell;
}

/// Zeros in the open range (0, y_max) of f(y) = f0 c(y) + g s(y), where (c, s)
/// is the fundamental pair for q.
struct ComponentRoots {
    std::vector<double> roots;
    bool identically_zero = false;
};

double polish_root(double q, double f0, double g, double y) {
    for (int it = 0; it < 4; ++it) {
        const FundamentalPair fp = fundamental_pair(q, y);
        const double f = f0 * fp.c + g * fp.s;
        const double df = f0 * q * fp.s + g * fp.c;
        if (f == 0.0 || df == 0.0) break;
        const double step = f / df;
        y -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(y))) break;
    }
    return y;
}

ComponentRoots component_roots(double q, double f0, double g, double y_max) {
    ComponentRoots out;
    if (f0 == 0.0 && g == 0.0) {
        out.identically_zero = true;
        return out;
    }
    std::vector<double> candidates;
    if (std::abs(q) * y_max * y_max < 1e-12) {
        if (g != 0.0) candidates.push_back(-f0 / g);
    } else if (q < 0.0) {
        const double k = std::sqrt(-q);
        const double phase = std::atan2(f0, g / k);
        const double pi = std::numbers::pi;
        const auto n_lo = static_cast<long long>(std::floor(phase / pi));
        const auto n_hi = static_cast<long long>(std::ceil((k * y_max + phase) / pi));
        for (long long n = n_lo; n <= n_hi; ++n) {
            candidates.push_back((static_cast<double>(n) * pi - phase) / k);
        }
    } else if (g != 0.0) {
        const double k = std::sqrt(q);
        const double rho = -f0 * k / g;
        if (std::abs(rho) < 1.0) candidates.push_back(std::atanh(rho) / k);
    }
    for (double y : candidates) {
        if (!(y > -0.5 * y_max && y < 1.5 * y_max)) continue;
        y = polish_root(q, f0, g, y);
        // A genuine crossing: the derivative of the closed form is nonzero.
        const FundamentalPair fp = fundamental_pair(q, y);
        const double df = f0 * q * fp.s + g * fp.c;
        if (y > 0.0 && y < y_max && df != 0.0) out.roots.push_back(y);
    }
    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
    return out;
}

void require_range(const Solution& sol, double lo, double hi) {
    const Interval& iv = sol.problem().interval();
    if (!(iv.a < lo && lo <= hi && hi < iv.b)) {
        throw DomainError("range [" + fmt(lo) + ", " + fmt(hi) + "] must lie inside (a, b)");
    }
}

SignVerdict verdict_for(double r, const AtomRecord& rec, ZeroKind kind) {
    SignVerdict out;
    const double p = rec.d_alpha * rec.d_beta;
    switch (kind) {
        case ZeroKind::ContinuousZero:
            out.changes_sign = true;
            out.criterion.rule = SignRule::BalancedValueZero;
            out.criterion.value = rec.mid.u;
            break;
        case ZeroKind::LeftZero: {
            const double th = 1.0 - (1.0 - r) * (1.0 - r) * p;
            out.changes_sign = th > 0.0;
            out.criterion.rule = SignRule::ThetaOneMinusR;
            out.criterion.value = th;
            break;
        }
        case ZeroKind::RightZero: {
            const double th = 1.0 - r * r * p;
            out.changes_sign = th > 0.0;
            out.criterion.rule = SignRule::ThetaR;
            out.criterion.value = th;
            break;
        }
        case ZeroKind::StrictFlip: {
            out.changes_sign = true;
            out.criterion.rule = SignRule::FlipWindow;
            out.criterion.value = rec.mid.u / rec.mid.v;
            out.criterion.window_lo = -r * rec.d_alpha;
            out.criterion.window_hi = (1.0 - r) * rec.d_alpha;
            out.criterion.window_holds = out.criterion.window_lo < out.criterion.value &&
                                         out.criterion.value < out.criterion.window_hi;
            break;
        }
    }
    return out;
}

SignChangePoint make_point(const Solution& sol, const AtomRecord& rec, ZeroKind kind) {
    const SignVerdict verdict = verdict_for(sol.problem().r(), rec, kind);
    return {rec.position, kind, verdict.changes_sign, verdict.criterion, rec.left, rec.mid, rec.right};
}

std::optional<ZeroKind> classify(const AtomRecord& rec, double scale, double tol) {
    const double bound = tol * scale;
    const bool left_zero = std::abs(rec.left.u) <= bound;
    const bool right_zero = std::abs(rec.right.u) <= bound;
    if (left_zero && right_zero) return ZeroKind::ContinuousZero;
    if (left_zero) return ZeroKind::LeftZero;
    if (right_zero) return ZeroKind::RightZero;
    if (rec.left.u * rec.right.u < 0.0) return ZeroKind::StrictFlip;
    return std::nullopt;
}

std::vector<SignChangePoint> scan_sign_changes(const Solution& sol, double lo, double hi,
                                               const AnalysisOptions& options) {
    if (sol.trivial()) {
        throw PreconditionError("the trivial solution vanishes everywhere; Z(u) is not discrete");
    }
    const Problem& p = sol.problem();
    const auto nodes = p.nodes();
    const auto segments = sol.segments();

    std::vector<SignChangePoint> points;
    std::vector<bool> node_in_zero_set(nodes.size(), false);
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const double x = nodes[i];
        if (x < lo || x > hi) continue;
        const AtomRecord rec = sol.sides_at(x);
        if (auto kind = classify(rec, local_scale(sol, x), options.zero_tolerance)) {
            points.push_back(make_point(sol, rec, *kind));
            node_in_zero_set[i] = true;
        }
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& seg = segments[i];
        if (seg.x_hi < lo || seg.x_lo > hi) continue;
        const double len = seg.x_hi - seg.x_lo;
        const ComponentRoots roots =
            component_roots(seg.alpha_density * seg.beta_density, seg.state_at_lo.u,
                            seg.alpha_density * seg.state_at_lo.v, len);
        const double merge = 1e-10 * std::max(1.0, len);
        for (double y : roots.roots) {
            const double x = seg.x_lo + y;
            if (!(x > seg.x_lo && x < seg.x_hi) || x < lo || x > hi) continue;
            if (node_in_zero_set[i] && x - seg.x_lo < merge) continue;
            if (node_in_zero_set[i + 1] && seg.x_hi - x < merge) continue;
            const State s = seg.at(x);
            points.push_back(make_point(sol, {x, 0.0, 0.0, s, s, s}, ZeroKind::ContinuousZero));
        }
    }
    std::sort(points.begin(), points.end(),
              [](const SignChangePoint& l, const SignChangePoint& r) { return l.position < r.position; });
    return points;
}

}  // namespace

const char* to_string(ZeroKind kind) {
    switch (kind) {
        case ZeroKind::ContinuousZero: return "ContinuousZero";
        case ZeroKind::LeftZero: return "LeftZero";
        case ZeroKind::RightZero: return "RightZero";
        case ZeroKind::StrictFlip: return "StrictFlip";
    }
    return "ContinuousZero";
}

const char* to_string(SignRule rule) {
    switch (rule) {
        case SignRule::BalancedValueZero: return "balanced-value-zero";
        case SignRule::ThetaOneMinusR: return "theta_1-r";
        case SignRule::ThetaR: return "theta_r";
        case SignRule::FlipWindow: return "flip-window";
    }
    return "balanced-value-zero";
}

std::string SignCriterion::describe() const {
    switch (rule) {
        case SignRule::BalancedValueZero: return "u(s)=0";
        case SignRule::ThetaOneMinusR: return "theta_{1-r}(s)=" + fmt(value);
        case SignRule::ThetaR: return "theta_r(s)=" + fmt(value);
        case SignRule::FlipWindow:
            return fmt(window_lo) + " < u/v=" + fmt(value) + " < " + fmt(window_hi) +
                   (window_holds ? "" : " (window violated)");
    }
    return {};
}

double local_scale(const Solution& sol, double x) {
    const AtomRecord rec = sol.sides_at(x);
    const double ell = local_alpha_length(sol, x);
    return std::max(max_abs(rec.left.u, rec.mid.u, rec.right.u),
                    ell * max_abs(rec.left.v, rec.mid.v, rec.right.v));
}

std::optional<ZeroKind> zero_kind_at(const Solution& sol, double x, const AnalysisOptions& options) {
    if (!sol.problem().interval().contains(x)) {
        throw DomainError("point " + fmt(x) + " is outside the open interval");
    }
    return classify(sol.sides_at(x), local_scale(sol, x), options.zero_tolerance);
}

std::vector<SignChangePoint> find_sign_changes(const Solution& sol, double lo, double hi,
                                               const AnalysisOptions& options) {
    require_range(sol, lo, hi);
    return scan_sign_changes(sol, lo, hi, options);
}

std::vector<SignChangePoint> find_sign_changes(const Solution& sol, const AnalysisOptions& options) {
    const Interval& iv = sol.problem().interval();
    return scan_sign_changes(sol, iv.a, iv.b, options);
}

SignVerdict changes_sign_at(const Solution& sol, double s, const AnalysisOptions& options) {
    const auto kind = zero_kind_at(sol, s, options);
    if (!kind) throw PreconditionError("point " + fmt(s) + " is not in Z(u)");
    return verdict_for(sol.problem().r(), sol.sides_at(s), *kind);
}

std::vector<double> quasi_derivative_zeros(const Solution& sol, double lo, double hi,
                                           const AnalysisOptions& options) {
    require_range(sol, lo, hi);
    const Problem& p = sol.problem();
    const auto nodes = p.nodes();
    const auto segments = sol.segments();

    std::vector<double> points;
    std::vector<bool> node_in_zero_set(nodes.size(), false);
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const double x = nodes[i];
        if (x < lo || x > hi) continue;
        const AtomRecord rec = sol.sides_at(x);
        const double ell = local_alpha_length(sol, x);
        const double scale = std::max(max_abs(rec.left.v, rec.mid.v, rec.right.v),
                                      max_abs(rec.left.u, rec.mid.u, rec.right.u) / ell);
        const double bound = options.zero_tolerance * scale;
        const bool left_zero = std::abs(rec.left.v) <= bound;
        const bool right_zero = std::abs(rec.right.v) <= bound;
        if (left_zero || right_zero || rec.left.v * rec.right.v < 0.0) {
            points.push_back(x);
            node_in_zero_set[i] = true;
        }
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& seg = segments[i];
        if (seg.x_hi < lo || seg.x_lo > hi) continue;
        const double len = seg.x_hi - seg.x_lo;
        const ComponentRoots roots =
            component_roots(seg.alpha_density * seg.beta_density, seg.state_at_lo.v,
                            seg.beta_density * seg.state_at_lo.u, len);
        if (roots.identically_zero) {
            points.push_back(std::max(seg.x_lo, lo));
            continue;
        }
        const double merge = 1e-10 * std::max(1.0, len);
        for (double y : roots.roots) {
            const double x = seg.x_lo + y;
            if (!(x > seg.x_lo && x < seg.x_hi) || x < lo || x > hi) continue;
            if (node_in_zero_set[i] && x - seg.x_lo < merge) continue;
            if (node_in_zero_set[i + 1] && seg.x_hi - x < merge) continue;
            points.push_back(x);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

double mean_value_witness(const Solution& sol, double s, double t, const AnalysisOptions& options) {
    if (!(s < t)) throw PreconditionError("mean_value_witness requires s < t");
    if (!zero_kind_at(sol, s, options) || !zero_kind_at(sol, t, options)) {
        throw PreconditionError("mean_value_witness requires s and t in Z(u)");
    }
    const std::vector<double> zeros = quasi_derivative_zeros(sol, s, t, options);
    if (zeros.empty()) {
        throw InvariantError("no sign-changing point of du/dalpha in [" + fmt(s) + ", " + fmt(t) + "]");
    }
    return zeros.front();
}

WronskianValues wronskian(const Solution& u, const Solution& v, double x) {
    if (!u.same_problem(v)) throw PreconditionError("wronskian requires solutions of the same problem");
    const AtomRecord U = u.sides_at(x);
    const AtomRecord V = v.sides_at(x);
    auto w = [](State a, State b) { return a.u * b.v - b.u * a.v; };
    WronskianValues out{w(U.mid, V.mid), w(U.left, V.left), w(U.right, V.right), 0.0};
    if (const Jump* j = u.problem().jump_at(x)) {
        const double r = u.problem().r();
        const double p = j->d_alpha * j->d_beta;
        const double theta_r = 1.0 - r * r * p;
        const double theta_1mr = 1.0 - (1.0 - r) * (1.0 - r) * p;
        const double dev = std::max(std::abs(out.w_minus / theta_1mr - out.w),
                                    std::abs(out.w_plus / theta_r - out.w));
        // Each W is a difference of products, so rounding is relative to their size.
        auto size = [](State a, State b) { return std::abs(a.u * b.v) + std::abs(b.u * a.v); };
        const double scale = std::max({std::abs(out.w), size(U.mid, V.mid),
                                       size(U.left, V.left) / std::abs(theta_1mr),
                                       size(U.right, V.right) / std::abs(theta_r)});
        out.relation_residual = dev == 0.0 ? 0.0 : dev / scale;
    }
    return out;
}

PiecewiseMeasure wronskian_jump_measure(const Problem& problem) {
    const double r = problem.r();
    std::vector<Atom> atoms;
    for (const Jump& j : problem.jumps()) {
        const double theta_1mr = 1.0 - (1.0 - r) * (1.0 - r) * j.d_alpha * j.d_beta;
        if (theta_1mr == 0.0) {
            throw HypothesisError("theta_{1-r} vanishes at x=" + fmt(j.position), j.position);
        }
        atoms.push_back({j.position, (1.0 - 2.0 * r) * j.d_alpha * j.d_beta / theta_1mr});
    }
    return PiecewiseMeasure(problem.interval(), {}, {0.0}, std::move(atoms));
}

double wronskian_product(const Solution& u, const Solution& v, double x, double y) {
    const Interval& iv = u.problem().interval();
    if (!(iv.contains(x) && iv.contains(y) && x < y)) {
        throw DomainError("wronskian_product requires a < x < y < b");
    }
    double value = wronskian(u, v, x).w_minus;
    for (const Jump& j : u.problem().jumps()) {
        if (j.position < x) continue;
        if (j.position >= y) break;
        value *= theta_ratio(u.problem(), j.position);
    }
    return value;
}

double modified_wronskian(const Solution& v, const Solution& u, double x, Side side) {
    if (v.problem().r() != 0.5 || u.problem().r() != 0.5) {
        throw PreconditionError("the modified Wronskian is defined for balanced solutions (r = 1/2)");
    }
    if (!(v.problem().alpha() == u.problem().alpha())) {
        throw PreconditionError("the modified Wronskian requires a shared alpha");
    }
    const State V = v.evaluate(x, side);
    const State U = u.evaluate(x, side);
    return V.u * U.v - U.u * V.v;
}

}  // namespace msl
