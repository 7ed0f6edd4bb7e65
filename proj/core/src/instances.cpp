#include <algorithm>
#include <cmath>
#include <random>

#include "msl/campaign.hpp"
#include "msl/errors.hpp"
#include "msl/theorems.hpp"
#include "theorem_support.hpp"

namespace msl {

namespace {

using detail::End;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Hand-rolled so the stream does not depend on the standard library's
    // distribution implementations.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }
    bool coin(double p = 0.5) { return uniform() < p; }
    double sign() { return coin() ? 1.0 : -1.0; }

private:
    std::mt19937_64 gen_;
};

enum class Want { any, positive, negative };

struct AtomSpec {
    double x = 0.0;
    double da = 0.0;
    double db = 0.0;
    double dd = 0.0;  ///< weight of beta_1 - beta_2 at x
};

struct Draft {
    double r = 0.5;
    double length = 1.0;
    std::vector<double> breakpoints;
    std::vector<double> alpha_density;
    std::vector<double> beta_density;
    std::vector<double> diff_density;
    std::vector<AtomSpec> atoms;

    std::shared_ptr<const Problem> build(bool second) const {
        const Interval iv{0.0, length};
        std::vector<Atom> a_atoms, b_atoms;
        for (const AtomSpec& s : atoms) {
            a_atoms.push_back({s.x, s.da});
            b_atoms.push_back({s.x, second ? s.db - s.dd : s.db});
        }
        std::vector<double> beta = beta_density;
        if (second) {
            for (std::size_t i = 0; i < beta.size(); ++i) beta[i] -= diff_density[i];
        }
        return std::make_shared<const Problem>(r, PiecewiseMeasure(iv, breakpoints, alpha_density, a_atoms),
                                               PiecewiseMeasure(iv, breakpoints, beta, b_atoms));
    }

    double distance_to_nodes(double x) const {
        double d = std::min(x, length - x);
        for (double b : breakpoints) d = std::min(d, std::abs(x - b));
        for (const AtomSpec& a : atoms) d = std::min(d, std::abs(x - a.x));
        return d;
    }

    std::size_t background_piece(double x) const {
        return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                        breakpoints.begin());
    }
};

double theta_of(double z, double da, double db) { return 1.0 - z * z * da * db; }

bool satisfies(Want want, double value, double margin) {
    switch (want) {
        case Want::any: return std::abs(value) >= margin;
        case Want::positive: return value >= margin;
        case Want::negative: return value <= -margin;
    }
    return false;
}

class Generator {
public:
    Generator(std::uint64_t seed, const InstanceConfig& config, CampaignMode mode)
        : rng_(seed), cfg_(config), mode_(mode) {}

    bool comparison() const { return mode_ == CampaignMode::comparison; }

    double draw_r() {
        if (comparison()) return 0.5;
        if (cfg_.r) return *cfg_.r;
        switch (rng_.index(4)) {
            case 0: return 0.0;
            case 1: return 1.0;
            case 2: return 0.5;
            default: return rng_.uniform(0.05, 0.95);
        }
    }

    /// Both thetas (and both omegas in comparison mode) at least margin away
    /// from zero.
    bool nonvanishing(const Draft& d, double da, double db, double dd) const {
        const double m = cfg_.margin;
        if (std::abs(theta_of(d.r, da, db)) < m || std::abs(theta_of(1.0 - d.r, da, db)) < m) return false;
        if (comparison() && std::abs(theta_of(0.5, da, db - dd)) < m) return false;
        return true;
    }

    double draw_dd(const Draft& d, double da, double db) {
        if (!comparison()) return 0.0;
        for (int i = 0; i < 8; ++i) {
            const double dd = rng_.coin(0.5) ? rng_.uniform(0.0, 1.0) : 0.0;
            if (nonvanishing(d, da, db, dd)) return dd;
        }
        return 0.0;
    }

    void background(Draft& d, bool positive_theta) {
        d.r = draw_r();
        d.length = rng_.uniform(cfg_.length_min, cfg_.length_max);
        const double L = d.length;
        const std::size_t nb = rng_.index(cfg_.max_breakpoints + 1);
        for (std::size_t i = 0; i < nb; ++i) {
            const double x = rng_.uniform(0.05 * L, 0.95 * L);
            if (d.distance_to_nodes(x) >= 1e-2 * L) d.breakpoints.push_back(x);
        }
        std::sort(d.breakpoints.begin(), d.breakpoints.end());
        for (std::size_t i = 0; i <= d.breakpoints.size(); ++i) {
            d.alpha_density.push_back(rng_.uniform(cfg_.alpha_density_min, cfg_.alpha_density_max));
            d.beta_density.push_back(rng_.uniform(cfg_.beta_density_min, cfg_.beta_density_max));
            d.diff_density.push_back(comparison() && rng_.coin(0.7) ? rng_.uniform(0.1, 1.5) : 0.0);
        }
        const std::size_t na = rng_.index(cfg_.max_atoms + 1);
        for (std::size_t i = 0; i < na; ++i) {
            const double x = rng_.uniform(0.05 * L, 0.95 * L);
            if (d.distance_to_nodes(x) < 1e-2 * L) continue;
            const double da = rng_.coin(0.5) ? 0.0 : rng_.uniform(0.1, cfg_.alpha_atom_max);
            const double db = rng_.coin(0.15) ? 0.0 : rng_.uniform(cfg_.beta_atom_min, cfg_.beta_atom_max);
            if (da == 0.0 && db == 0.0) continue;
            if (!nonvanishing(d, da, db, 0.0)) continue;
            if (positive_theta && (theta_of(d.r, da, db) < cfg_.margin ||
                                   theta_of(1.0 - d.r, da, db) < cfg_.margin)) {
                continue;
            }
            d.atoms.push_back({x, da, db, draw_dd(d, da, db)});
        }
    }

    /// Atom with Delta_alpha > 0 whose theta_z meets want.
    std::optional<AtomSpec> draw_atom(const Draft& d, double x, double z, Want want) {
        for (int i = 0; i < 100; ++i) {
            const double da = rng_.uniform(0.2, std::max(0.3, cfg_.alpha_atom_max));
            double db = rng_.uniform(cfg_.beta_atom_min, cfg_.beta_atom_max);
            if (want == Want::negative) {
                if (z == 0.0) return std::nullopt;
                db = (1.0 + rng_.uniform(0.1, 2.0)) / (z * z * da);
            }
            if (!nonvanishing(d, da, db, 0.0) || !satisfies(want, theta_of(z, da, db), cfg_.margin)) continue;
            return AtomSpec{x, da, db, draw_dd(d, da, db)};
        }
        return std::nullopt;
    }

    double magnitude() { return rng_.sign() * rng_.uniform(0.5, 2.0); }

    /// Point in [lo, hi] at least 1e-3 L away from every node.
    std::optional<double> free_point(const Draft& d, double lo, double hi) {
        for (int i = 0; i < 20; ++i) {
            const double x = rng_.uniform(lo, hi);
            if (d.distance_to_nodes(x) >= 1e-3 * d.length) return x;
        }
        return std::nullopt;
    }

    IvpData random_ivp(const Draft& d) {
        const double L = d.length;
        const double x0 = free_point(d, 0.25 * L, 0.75 * L).value_or(0.5 * L);
        const double phi = rng_.uniform(0.0, 2.0 * 3.141592653589793);
        const double mag = rng_.uniform(0.5, 2.0);
        return {x0, mag * std::cos(phi), mag * std::sin(phi)};
    }

    /// Balanced state at s realizing the requested behavior; may add an atom.
    /// want constrains theta_z(s) at a designed atom.
    std::optional<State> design_s(Draft& d, double s, End at_s, double z, Want want) {
        const double r = d.r;
        const double mag = magnitude();
        switch (at_s) {
            case End::plus_zero: {
                if (rng_.coin(0.3)) return State{0.0, mag};
                const auto atom = draw_atom(d, s, z, want);
                if (!atom) return std::nullopt;
                d.atoms.push_back(*atom);
                return cross_atom_leftward(r, atom->da, atom->db, {0.0, mag}).mid;
            }
            case End::minus_zero: {
                const auto atom = draw_atom(d, s, z, want);
                if (!atom) return std::nullopt;
                d.atoms.push_back(*atom);
                return cross_atom(r, atom->da, atom->db, {0.0, mag}).mid;
            }
            case End::flip: {
                const auto atom = draw_atom(d, s, z, want);
                if (!atom) return std::nullopt;
                d.atoms.push_back(*atom);
                const double lo = -r * atom->da;
                const double hi = (1.0 - r) * atom->da;
                const double rho = rng_.uniform(lo + 0.05 * atom->da, hi - 0.05 * atom->da);
                return State{mag * rho, mag};
            }
        }
        return std::nullopt;
    }

    /// Atom at t (left state `left`, u^-(t) != 0) producing u^+(t) = 0.
    std::optional<AtomSpec> plus_zero_atom(const Draft& d, double t, State left, Want want,
                                           bool negative_omega) {
        const double r = d.r;
        const double ul = left.u;
        const double vl = left.v;
        for (int i = 0; i < 50; ++i) {
            double da = 0.0;
            double db = 0.0;
            if (negative_omega) {
                // omega_1(t) = 2 + da vl / ul at r = 1/2.
                if (ul * vl >= 0.0) return std::nullopt;
                da = (2.0 + rng_.uniform(0.1, 2.0)) * std::abs(ul / vl);
            } else if (r == 0.0 || r == 1.0) {
                da = -ul / vl;
            } else {
                da = rng_.uniform(0.2, std::max(0.3, cfg_.alpha_atom_max));
            }
            if (!(da >= 0.05 && da <= 6.0)) return std::nullopt;
            if (r == 0.0 || r == 1.0) {
                db = rng_.uniform(cfg_.beta_atom_min, cfg_.beta_atom_max);
            } else {
                db = -(ul + da * vl) / (r * (1.0 - r) * da * ul);
            }
            if (std::abs(db) > 40.0 || !nonvanishing(d, da, db, 0.0)) continue;
            if (!satisfies(want, theta_of(1.0 - r, da, db), cfg_.margin)) continue;
            return AtomSpec{t, da, db, draw_dd(d, da, db)};
        }
        return std::nullopt;
    }

    /// Atom at t with u^-(t) u^+(t) < 0.
    std::optional<AtomSpec> flip_atom(const Draft& d, double t, State left, Want want) {
        const double r = d.r;
        for (int i = 0; i < 200; ++i) {
            const double da = rng_.uniform(0.2, 2.5);
            const double db = rng_.uniform(-10.0, 3.0);
            if (!nonvanishing(d, da, db, 0.0)) continue;
            if (!satisfies(want, theta_of(1.0 - r, da, db), cfg_.margin)) continue;
            const State right = cross_atom(r, da, db, left).right;
            if (left.u * right.u < 0.0 && std::abs(right.u) >= 1e-2 * std::abs(left.u)) {
                return AtomSpec{t, da, db, draw_dd(d, da, db)};
            }
        }
        return std::nullopt;
    }

    void finalize_difference(Draft& d, double s, double t, bool reversed_clause) {
        if (!comparison()) return;
        if (reversed_clause) {
            // d(beta_2 - beta_1) >= 0 on [s, t] with d(beta_1 - beta_2) >= 0
            // everywhere forces the difference to vanish there.
            for (std::size_t i = d.background_piece(s); i <= d.background_piece(t); ++i) {
                d.diff_density[i] = 0.0;
            }
            for (AtomSpec& a : d.atoms) {
                if (a.x >= s && a.x <= t) a.dd = 0.0;
            }
            return;
        }
        bool inside = false;
        for (std::size_t i = d.background_piece(s); i <= d.background_piece(t); ++i) {
            inside = inside || d.diff_density[i] > 0.0;
        }
        if (!inside) d.diff_density[d.background_piece(0.5 * (s + t))] = rng_.uniform(0.2, 1.0);
    }

    Rng& rng() { return rng_; }
    const InstanceConfig& config() const { return cfg_; }

private:
    Rng rng_;
    InstanceConfig cfg_;
    CampaignMode mode_;
};

bool is_node(const Problem& p, double x) {
    const auto nodes = p.nodes();
    return std::binary_search(nodes.begin(), nodes.end(), x);
}

/// Every one-sided value at a node is an exact zero (to the detection
/// tolerance) or at least margin times the local scale, and every point of
/// Z(u) keeps a distance from the nodes and from its neighbours.
bool margins_ok(const Solution& sol, double margin, const AnalysisOptions& opts) {
    const Problem& p = sol.problem();
    const double L = p.interval().length();
    const auto nodes = p.nodes();
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const AtomRecord rec = sol.sides_at(nodes[i]);
        const double scale = local_scale(sol, nodes[i]);
        for (double w : {rec.left.u, rec.right.u}) {
            const double a = std::abs(w);
            if (a > opts.zero_tolerance * scale && a < margin * scale) return false;
        }
    }
    const auto points = find_sign_changes(sol, opts);
    if (points.size() > 1000) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i].position;
        if (i > 0 && x - points[i - 1].position < 1e-6 * L) return false;
        if (is_node(p, x)) continue;
        for (double n : nodes) {
            if (std::abs(x - n) < 1e-6 * L) return false;
        }
    }
    return true;
}

bool hypothesis_margins_ok(const Problem& p, double margin) {
    for (const Jump& j : p.jumps()) {
        if (std::abs(theta(p, p.r(), j.position)) < margin ||
            std::abs(theta(p, 1.0 - p.r(), j.position)) < margin) {
            return false;
        }
    }
    return check_hypothesis(p).pass;
}

bool independent(const Solution& u, const Solution& v) {
    const State U = u.evaluate(u.x0());
    const State V = v.evaluate(u.x0());
    const double w = U.u * V.v - V.u * U.v;
    return std::abs(w) >= 1e-3 * (std::abs(U.u * V.v) + std::abs(V.u * U.v));
}

std::optional<Instance> untargeted(Generator& g, std::uint64_t seed, CampaignMode mode,
                                   const AnalysisOptions& opts) {
    Draft d;
    g.background(d, false);
    Instance inst;
    inst.seed = seed;
    inst.problem = d.build(false);
    if (mode == CampaignMode::comparison) inst.problem2 = d.build(true);
    const Problem& p2 = inst.problem2 ? *inst.problem2 : *inst.problem;
    if (!hypothesis_margins_ok(*inst.problem, g.config().margin) ||
        !hypothesis_margins_ok(p2, g.config().margin)) {
        return std::nullopt;
    }
    inst.u = g.random_ivp(d);
    inst.v = g.random_ivp(d);
    const Solution u = solve_ivp(inst.problem, inst.u.x0, inst.u.u0, inst.u.v0);
    const Solution v = solve_ivp(inst.problem2 ? inst.problem2 : inst.problem, inst.v.x0, inst.v.u0, inst.v.v0);
    if (!margins_ok(u, g.config().margin, opts) || !margins_ok(v, g.config().margin, opts)) {
        return std::nullopt;
    }
    if (!inst.problem2 && !independent(u, v)) return std::nullopt;
    return inst;
}

std::optional<Instance> targeted(Generator& g, std::uint64_t seed, CampaignMode mode,
                                 std::string_view target, const AnalysisOptions& opts) {
    const InstanceConfig& cfg = g.config();
    const bool isolation = mode == CampaignMode::isolation;
    const bool reversed = target == "I.4'";

    End at_s = End::plus_zero;
    End at_t = End::minus_zero;
    if (isolation) {
        at_s = target == "s:-0" ? End::minus_zero : target == "s:flip" ? End::flip : End::plus_zero;
    } else {
        const std::string id = reversed ? "I.4" : std::string(target);
        const auto it = std::find_if(detail::kClauses.begin(), detail::kClauses.end(),
                                     [&](const detail::ClauseShape& c) { return id == c.id; });
        if (it == detail::kClauses.end()) throw PreconditionError("unknown target clause " + id);
        at_s = it->at_s;
        at_t = it->at_t;
    }

    Draft d;
    g.background(d, !isolation);
    const double L = d.length;
    const auto s_pos = g.free_point(d, 0.1 * L, 0.5 * L);
    if (!s_pos) return std::nullopt;
    const double s = *s_pos;

    Want want_s = Want::any;
    // theta_r(s) enters every clause closed at s; in isolation mode the
    // deciding theta of the one-sided zero is drawn with either sign.
    double z = d.r;
    if (isolation) {
        want_s = g.rng().coin() ? Want::positive : Want::negative;
        if (at_s == End::minus_zero) z = 1.0 - d.r;
        if (z == 0.0 || at_s == End::flip) want_s = Want::any;
    } else if (reversed) {
        want_s = Want::negative;
    } else if (detail::closed_at_s(at_s)) {
        want_s = Want::positive;
    }
    const auto mid = g.design_s(d, s, at_s, z, want_s);
    if (!mid) return std::nullopt;

    Instance inst;
    inst.seed = seed;
    inst.target = std::string(target);
    inst.u = {s, mid->u, mid->v};

    if (!isolation) {
        const auto problem0 = d.build(false);
        if (!hypothesis_margins_ok(*problem0, cfg.margin)) return std::nullopt;
        const Solution u0 = solve_ivp(problem0, s, mid->u, mid->v);
        const auto points = find_sign_changes(u0, opts);
        auto it = std::find_if(points.begin(), points.end(), [&](const SignChangePoint& p) {
            return std::abs(p.position - s) <= 1e-9 * L;
        });
        if (it == points.end() || it + 1 == points.end()) return std::nullopt;
        const SignChangePoint& next = *(it + 1);
        const double z1 = next.position;
        if (z1 - s < 1e-2 * L) return std::nullopt;

        const Want want_t = reversed ? Want::negative
                            : detail::closed_at_t(at_t) ? Want::positive
                                                        : Want::any;
        double t = z1;
        if (at_t == End::minus_zero) {
            if (is_node(*problem0, z1)) {
                if (next.kind != ZeroKind::LeftZero) return std::nullopt;
            } else if (d.distance_to_nodes(z1) < 1e-3 * L) {
                return std::nullopt;
            } else if (g.rng().coin()) {
                const auto atom = g.draw_atom(d, z1, 1.0 - d.r, Want::any);
                if (!atom) return std::nullopt;
                d.atoms.push_back(*atom);
            }
        } else {
            const auto t_pos = g.free_point(d, s + 0.15 * (z1 - s), s + 0.85 * (z1 - s));
            if (!t_pos) return std::nullopt;
            t = *t_pos;
            const State left = u0.evaluate(t);
            const auto atom = at_t == End::plus_zero ? g.plus_zero_atom(d, t, left, want_t, reversed)
                                                     : g.flip_atom(d, t, left, want_t);
            if (!atom) return std::nullopt;
            d.atoms.push_back(*atom);
        }
        g.finalize_difference(d, s, t, reversed);
    }

    inst.problem = d.build(false);
    if (mode == CampaignMode::comparison) inst.problem2 = d.build(true);
    if (!hypothesis_margins_ok(*inst.problem, cfg.margin)) return std::nullopt;
    if (inst.problem2 && !hypothesis_margins_ok(*inst.problem2, cfg.margin)) return std::nullopt;
    inst.v = g.random_ivp(d);

    const Solution u = solve_ivp(inst.problem, inst.u.x0, inst.u.u0, inst.u.v0);
    const Solution v = solve_ivp(inst.problem2 ? inst.problem2 : inst.problem, inst.v.x0, inst.v.u0,
                                 inst.v.v0);
    if (!margins_ok(u, cfg.margin, opts) || !margins_ok(v, cfg.margin, opts)) return std::nullopt;
    if (!inst.problem2 && !independent(u, v)) return std::nullopt;

    const auto points = find_sign_changes(u, opts);
    auto it = std::find_if(points.begin(), points.end(), [&](const SignChangePoint& p) {
        return std::abs(p.position - s) <= 1e-9 * L;
    });
    if (it == points.end()) return std::nullopt;
    if (isolation) return inst;
    if (it + 1 == points.end()) return std::nullopt;

    const double sp = it->position;
    const double tp = (it + 1)->position;
    for (const SignChangePoint& p : find_sign_changes(v, opts)) {
        for (double e : {sp, tp}) {
            if (p.position != e && std::abs(p.position - e) < 1e-6 * L) return std::nullopt;
        }
    }
    const auto cases = inst.problem2 ? classify_comparison(u, v, sp, tp, opts)
                                     : classify_separation(u, sp, tp, opts);
    if (cases.size() != 1 || cases.front().id != target) return std::nullopt;
    return inst;
}

void validate(const InstanceConfig& c) {
    auto bad = [](const char* what) { throw PreconditionError(std::string("invalid instance config: ") + what); };
    if (!(c.length_min > 0.0 && c.length_min <= c.length_max)) bad("length range");
    if (!(c.alpha_density_min > 0.0 && c.alpha_density_min <= c.alpha_density_max)) bad("alpha density range");
    if (!(c.beta_density_min <= c.beta_density_max)) bad("beta density range");
    if (!(c.beta_atom_min <= c.beta_atom_max)) bad("beta atom range");
    if (!(c.alpha_atom_max >= 0.0)) bad("alpha atom bound");
    if (!(c.margin > 0.0 && c.margin < 0.5)) bad("margin");
    if (c.r && !(*c.r >= 0.0 && *c.r <= 1.0)) bad("r");
    if (c.max_attempts == 0) bad("max_attempts");
}

}  // namespace

const char* to_string(CampaignMode mode) {
    switch (mode) {
        case CampaignMode::isolation: return "isolation";
        case CampaignMode::separation: return "separation";
        case CampaignMode::comparison: return "comparison";
        case CampaignMode::wronskian: return "wronskian";
        case CampaignMode::oracle: return "oracle";
    }
    return "separation";
}

CampaignMode parse_campaign_mode(std::string_view name) {
    for (CampaignMode m : {CampaignMode::isolation, CampaignMode::separation, CampaignMode::comparison,
                           CampaignMode::wronskian, CampaignMode::oracle}) {
        if (name == to_string(m)) return m;
    }
    throw PreconditionError("unknown campaign mode '" + std::string(name) + "'");
}

std::vector<std::string> instance_targets(CampaignMode mode) {
    switch (mode) {
        case CampaignMode::isolation: return {"s:+0", "s:-0", "s:flip", ""};
        case CampaignMode::separation:
            return {"I.1", "I.2", "I.3", "I.4", "II.1", "II.2", "II.3", "II.4", "II.5"};
        case CampaignMode::comparison:
            return {"I.1", "I.2", "I.3", "I.4", "I.4'", "II.1", "II.2", "II.3", "II.4", "II.5"};
        default: return {};
    }
}

Instance random_instance(std::uint64_t seed, const InstanceConfig& config, CampaignMode mode,
                         std::string_view target) {
    validate(config);
    InstanceConfig cfg = config;
    if (mode == CampaignMode::comparison) cfg.r = 0.5;
    Generator g(seed, cfg, mode);
    const AnalysisOptions opts;
    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        if (!target.empty()) {
            if (auto inst = targeted(g, seed, mode, target, opts)) return *inst;
        } else if (auto inst = untargeted(g, seed, mode, opts)) {
            return *inst;
        }
    }
    if (!target.empty()) {
        // Fall back to an untargeted draw; the summary records the miss.
        for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
            if (auto inst = untargeted(g, seed, mode, opts)) return *inst;
        }
    }
    throw PreconditionError("no instance satisfying the margins found for seed " + std::to_string(seed));
}

}  // namespace msl
