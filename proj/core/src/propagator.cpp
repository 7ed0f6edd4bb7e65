#include "msl/propagator.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "msl/errors.hpp"

namespace msl {

namespace {

// Below this |k dx| the trig/hyperbolic pair is replaced by its Taylor
// polynomial to avoid cancellation in sinh(k dx) / k.
constexpr double kTaylorThreshold = 1e-6;

std::string position_suffix(double position) {
    if (std::isnan(position)) return {};
    char buf[48];
    std::snprintf(buf, sizeof buf, " at x=%.17g", position);
    return buf;
}

}  // namespace

const char* to_string(Side side) {
    switch (side) {
        case Side::left: return "left";
        case Side::mid: return "mid";
        case Side::right: return "right";
    }
    return "mid";
}

FundamentalPair fundamental_pair(double q, double dx) {
    const double z = q * dx * dx;
    if (std::abs(z) < kTaylorThreshold * kTaylorThreshold) {
        return {1.0 + z / 2.0 + z * z / 24.0, dx * (1.0 + z / 6.0 + z * z / 120.0)};
    }
    if (q > 0.0) {
        const double k = std::sqrt(q);
        return {std::cosh(k * dx), std::sinh(k * dx) / k};
    }
    const double k = std::sqrt(-q);
    return {std::cos(k * dx), std::sin(k * dx) / k};
}

State ac_flow(double A, double B, double dx, State s) {
    if (!(A > 0.0) || !std::isfinite(A)) {
        throw InvariantError("alpha density must be positive and finite");
    }
    const FundamentalPair f = fundamental_pair(A * B, dx);
    return {f.c * s.u + A * f.s * s.v, f.c * s.v + B * f.s * s.u};
}

State jump_right(double r, double da, double db, State mid) {
    return {mid.u + r * da * mid.v, mid.v + r * db * mid.u};
}

State jump_left(double r, double da, double db, State mid) {
    const double w = 1.0 - r;
    return {mid.u - w * da * mid.v, mid.v - w * db * mid.u};
}

AtomCrossing cross_atom(double r, double da, double db, State left, double position) {
    const double w = 1.0 - r;
    const double det = 1.0 - w * w * da * db;
    if (det == 0.0) {
        throw HypothesisError("theta_{1-r} vanishes" + position_suffix(position), position);
    }
    const State mid{(left.u + w * da * left.v) / det, (left.v + w * db * left.u) / det};
    return {mid, jump_right(r, da, db, mid)};
}

AtomCrossingLeftward cross_atom_leftward(double r, double da, double db, State right,
                                         double position) {
    const double det = 1.0 - r * r * da * db;
    if (det == 0.0) {
        throw HypothesisError("theta_r vanishes" + position_suffix(position), position);
    }
    const State mid{(right.u - r * da * right.v) / det, (right.v - r * db * right.u) / det};
    return {mid, jump_left(r, da, db, mid)};
}

Solution::Solution(std::shared_ptr<const Problem> problem, std::vector<Segment> segments,
                   std::vector<AtomRecord> atoms, double x0, State initial)
    : problem_(std::move(problem)),
      segments_(std::move(segments)),
      atoms_(std::move(atoms)),
      x0_(x0),
      initial_(initial) {}

const AtomRecord* Solution::atom_at(double x) const noexcept {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const AtomRecord& rec, double v) { return rec.position < v; });
    if (it != atoms_.end() && it->position == x) return &*it;
    return nullptr;
}

const Segment& Solution::segment_at(double x) const { return segments_[problem_->piece_index(x)]; }

State Solution::evaluate(double x, Side side) const {
    if (!problem_->interval().contains(x)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "point %.17g is outside the open interval", x);
        throw DomainError(buf);
    }
    if (const AtomRecord* rec = atom_at(x)) return rec->at(side);
    return segment_at(x).at(x);
}

AtomRecord Solution::sides_at(double x) const {
    if (const AtomRecord* rec = atom_at(x)) return *rec;
    const State s = evaluate(x);
    return {x, 0.0, 0.0, s, s, s};
}

State evaluate(const Solution& sol, double x, Side side) { return sol.evaluate(x, side); }

Solution solve_ivp(std::shared_ptr<const Problem> problem_ptr, double x0, double u0, double v0) {
    const Problem& problem = *problem_ptr;
    if (!problem.interval().contains(x0)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "x0=%.17g is outside the open interval", x0);
        throw DomainError(buf);
    }
    const HypothesisReport report = check_hypothesis(problem);
    if (!report.pass) {
        for (const AtomDiagnostics& d : report.atoms) {
            if (!d.pass) throw HypothesisError(report.messages.front(), d.position);
        }
        throw HypothesisError(report.messages.front());
    }

    const double r = problem.r();
    const auto pieces = problem.pieces();
    const auto nodes = problem.nodes();
    const auto jumps = problem.jumps();
    const std::size_t m = pieces.size();

    std::vector<Segment> segments(m);
    for (std::size_t i = 0; i < m; ++i) {
        segments[i] = {pieces[i].x_lo, pieces[i].x_hi, pieces[i].alpha_density,
                       pieces[i].beta_density, {}};
    }
    std::vector<AtomRecord> atoms(jumps.size());
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        atoms[i].position = jumps[i].position;
        atoms[i].d_alpha = jumps[i].d_alpha;
        atoms[i].d_beta = jumps[i].d_beta;
    }
    auto atom_index = [&](double x) -> std::ptrdiff_t {
        auto it = std::lower_bound(jumps.begin(), jumps.end(), x,
                                   [](const Jump& j, double v) { return j.position < v; });
        if (it != jumps.end() && it->position == x) return it - jumps.begin();
        return -1;
    };

    // Segments k+1.. from the known right limit at the left edge of segment k.
    auto propagate_right = [&](std::size_t k) {
        for (std::size_t i = k; i + 1 < m; ++i) {
            const State left = segments[i].at(nodes[i + 1]);
            State right = left;
            if (const auto idx = atom_index(nodes[i + 1]); idx >= 0) {
                AtomRecord& rec = atoms[static_cast<std::size_t>(idx)];
                const AtomCrossing c = cross_atom(r, rec.d_alpha, rec.d_beta, left, rec.position);
                rec.left = left;
                rec.mid = c.mid;
                rec.right = c.right;
                right = c.right;
            }
            segments[i + 1].state_at_lo = right;
        }
    };
    // Segments k-1, ..., 0 from the left limit at node k.
    auto propagate_left = [&](std::size_t k, State left_at_node) {
        for (std::size_t i = k; i-- > 0;) {
            const Segment& seg = segments[i];
            segments[i].state_at_lo =
                ac_flow(seg.alpha_density, seg.beta_density, nodes[i] - nodes[i + 1], left_at_node);
            if (i == 0) break;
            const State right = segments[i].state_at_lo;
            left_at_node = right;
            if (const auto idx = atom_index(nodes[i]); idx >= 0) {
                AtomRecord& rec = atoms[static_cast<std::size_t>(idx)];
                const AtomCrossingLeftward c =
                    cross_atom_leftward(r, rec.d_alpha, rec.d_beta, right, rec.position);
                rec.right = right;
                rec.mid = c.mid;
                rec.left = c.left;
                left_at_node = c.left;
            }
        }
    };

    const State mid0{u0, v0};
    const std::size_t k = problem.piece_index(x0);
    if (x0 == nodes[k]) {
        State left0 = mid0;
        State right0 = mid0;
        if (const auto idx = atom_index(x0); idx >= 0) {
            AtomRecord& rec = atoms[static_cast<std::size_t>(idx)];
            left0 = jump_left(r, rec.d_alpha, rec.d_beta, mid0);
            right0 = jump_right(r, rec.d_alpha, rec.d_beta, mid0);
            rec.left = left0;
            rec.mid = mid0;
            rec.right = right0;
        }
        segments[k].state_at_lo = right0;
        propagate_right(k);
        propagate_left(k, left0);
    } else {
        const Segment& seg = segments[k];
        segments[k].state_at_lo = ac_flow(seg.alpha_density, seg.beta_density, nodes[k] - x0, mid0);
        propagate_right(k);
        if (k > 0) {
            const State right = segments[k].state_at_lo;
            State left = right;
            if (const auto idx = atom_index(nodes[k]); idx >= 0) {
                AtomRecord& rec = atoms[static_cast<std::size_t>(idx)];
                const AtomCrossingLeftward c =
                    cross_atom_leftward(r, rec.d_alpha, rec.d_beta, right, rec.position);
                rec.right = right;
                rec.mid = c.mid;
                rec.left = c.left;
                left = c.left;
            }
            propagate_left(k, left);
        }
    }

    return Solution(std::move(problem_ptr), std::move(segments), std::move(atoms), x0, mid0);
}

Solution solve_ivp(const Problem& problem, double x0, double u0, double v0) {
    return solve_ivp(std::make_shared<const Problem>(problem), x0, u0, v0);
}

}  // namespace msl
