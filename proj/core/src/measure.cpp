#include "msl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>

#include "msl/errors.hpp"

namespace msl {

namespace {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void require_interval(const Interval& interval) {
    if (!std::isfinite(interval.a) || !std::isfinite(interval.b) || !(interval.a < interval.b)) {
        throw InvariantError("interval must satisfy a < b with both endpoints finite");
    }
}

std::vector<double> merged_breakpoints(std::span<const double> lhs, std::span<const double> rhs) {
    std::vector<double> out;
    out.reserve(lhs.size() + rhs.size());
    std::set_union(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

PiecewiseMeasure::PiecewiseMeasure(Interval interval, std::vector<double> breakpoints,
                                   std::vector<double> densities, std::vector<Atom> atoms)
    : interval_(interval), breakpoints_(std::move(breakpoints)), densities_(std::move(densities)) {
    require_interval(interval_);
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (!interval_.contains(breakpoints_[i])) {
            throw InvariantError("breakpoint " + format_number(breakpoints_[i]) +
                                 " lies outside the open interval");
        }
        if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i])) {
            throw InvariantError("breakpoints must be strictly increasing");
        }
    }
    if (densities_.size() != breakpoints_.size() + 1) {
        throw InvariantError("expected one density per piece (breakpoints + 1)");
    }
    for (double d : densities_) {
        if (!std::isfinite(d)) throw InvariantError("densities must be finite");
    }

    std::erase_if(atoms, [](const Atom& atom) { return atom.weight == 0.0; });
    for (const Atom& atom : atoms) {
        if (!interval_.contains(atom.position)) {
            throw InvariantError("atom at " + format_number(atom.position) +
                                 " lies outside the open interval");
        }
        if (!std::isfinite(atom.weight)) throw InvariantError("atom weights must be finite");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.position < y.position; });
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (atoms[i - 1].position == atoms[i].position) {
            throw InvariantError("two atoms share position " + format_number(atoms[i].position));
        }
    }
    atoms_ = std::move(atoms);

    // Split pieces so that every atom sits on a breakpoint.
    for (const Atom& atom : atoms_) {
        auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), atom.position);
        if (it != breakpoints_.end() && *it == atom.position) continue;
        const auto piece = static_cast<std::size_t>(it - breakpoints_.begin());
        const double density = densities_[piece];
        breakpoints_.insert(it, atom.position);
        densities_.insert(densities_.begin() + static_cast<std::ptrdiff_t>(piece), density);
    }
}

PiecewiseMeasure PiecewiseMeasure::uniform(Interval interval, double density) {
    return PiecewiseMeasure(interval, {}, {density}, {});
}

std::size_t PiecewiseMeasure::piece_index(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
}

double PiecewiseMeasure::delta(double s) const {
    if (!interval_.contains(s)) {
        throw DomainError("point " + format_number(s) + " is outside the open interval");
    }
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), s,
                               [](const Atom& atom, double x) { return atom.position < x; });
    if (it != atoms_.end() && it->position == s) return it->weight;
    return 0.0;
}

double PiecewiseMeasure::measure_of(double lo, double hi, bool include_lo, bool include_hi) const {
    if (!(interval_.a <= lo && lo <= hi && hi <= interval_.b)) {
        throw DomainError("measure_of requires a <= lo <= hi <= b");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < densities_.size(); ++i) {
        const double piece_lo = i == 0 ? interval_.a : breakpoints_[i - 1];
        const double piece_hi = i == breakpoints_.size() ? interval_.b : breakpoints_[i];
        const double overlap = std::min(hi, piece_hi) - std::max(lo, piece_lo);
        if (overlap > 0.0) total += densities_[i] * overlap;
    }
    for (const Atom& atom : atoms_) {
        const double p = atom.position;
        const bool inside = (lo < p && p < hi) || (p == lo && include_lo && (lo < hi || include_hi)) ||
                            (p == hi && include_hi && lo < hi);
        if (inside) total += atom.weight;
    }
    return total;
}

bool PiecewiseMeasure::is_nonnegative_on(double lo, double hi, bool include_lo,
                                         bool include_hi) const {
    if (!(interval_.a <= lo && lo <= hi && hi <= interval_.b)) {
        throw DomainError("is_nonnegative_on requires a <= lo <= hi <= b");
    }
    for (std::size_t i = 0; i < densities_.size(); ++i) {
        const double piece_lo = i == 0 ? interval_.a : breakpoints_[i - 1];
        const double piece_hi = i == breakpoints_.size() ? interval_.b : breakpoints_[i];
        if (std::min(hi, piece_hi) - std::max(lo, piece_lo) > 0.0 && densities_[i] < 0.0) {
            return false;
        }
    }
    for (const Atom& atom : atoms_) {
        const double p = atom.position;
        const bool inside = (lo < p && p < hi) || (p == lo && include_lo) || (p == hi && include_hi);
        if (inside && atom.weight < 0.0) return false;
    }
    return true;
}

PiecewiseMeasure combine(double c1, const PiecewiseMeasure& mu, double c2,
                         const PiecewiseMeasure& nu) {
    if (!(mu.interval() == nu.interval())) {
        throw InvariantError("cannot combine measures on different intervals");
    }
    const Interval interval = mu.interval();
    std::vector<double> breakpoints = merged_breakpoints(mu.breakpoints(), nu.breakpoints());
    std::vector<double> densities;
    densities.reserve(breakpoints.size() + 1);
    for (std::size_t i = 0; i <= breakpoints.size(); ++i) {
        const double lo = i == 0 ? interval.a : breakpoints[i - 1];
        const double hi = i == breakpoints.size() ? interval.b : breakpoints[i];
        const double mid = 0.5 * (lo + hi);
        densities.push_back(c1 * mu.density_at(mid) + c2 * nu.density_at(mid));
    }
    std::vector<Atom> atoms;
    for (const Atom& atom : mu.atoms()) {
        atoms.push_back({atom.position, c1 * atom.weight + c2 * nu.delta(atom.position)});
    }
    for (const Atom& atom : nu.atoms()) {
        if (mu.delta(atom.position) == 0.0) atoms.push_back({atom.position, c2 * atom.weight});
    }
    return PiecewiseMeasure(interval, std::move(breakpoints), std::move(densities), std::move(atoms));
}

double delta(const PiecewiseMeasure& mu, double s) { return mu.delta(s); }

double measure_of(const PiecewiseMeasure& mu, double lo, double hi, bool include_lo,
                  bool include_hi) {
    return mu.measure_of(lo, hi, include_lo, include_hi);
}

Problem::Problem(double r, PiecewiseMeasure alpha, PiecewiseMeasure beta)
    : r_(r), alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (!(r_ >= 0.0 && r_ <= 1.0)) throw InvariantError("r must lie in [0, 1]");
    if (!(alpha_.interval() == beta_.interval())) {
        throw InvariantError("alpha and beta must share the same interval");
    }
    const Interval& iv = alpha_.interval();
    nodes_.push_back(iv.a);
    for (double x : merged_breakpoints(alpha_.breakpoints(), beta_.breakpoints())) nodes_.push_back(x);
    nodes_.push_back(iv.b);

    pieces_.reserve(nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        const double mid = 0.5 * (nodes_[i] + nodes_[i + 1]);
        pieces_.push_back({nodes_[i], nodes_[i + 1], alpha_.density_at(mid), beta_.density_at(mid)});
    }

    auto a_it = alpha_.atoms().begin();
    auto b_it = beta_.atoms().begin();
    const auto a_end = alpha_.atoms().end();
    const auto b_end = beta_.atoms().end();
    while (a_it != a_end || b_it != b_end) {
        if (b_it == b_end || (a_it != a_end && a_it->position < b_it->position)) {
            jumps_.push_back({a_it->position, a_it->weight, 0.0});
            ++a_it;
        } else if (a_it == a_end || b_it->position < a_it->position) {
            jumps_.push_back({b_it->position, 0.0, b_it->weight});
            ++b_it;
        } else {
            jumps_.push_back({a_it->position, a_it->weight, b_it->weight});
            ++a_it;
            ++b_it;
        }
    }
}

const Jump* Problem::jump_at(double x) const noexcept {
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), x,
                               [](const Jump& j, double v) { return j.position < v; });
    if (it != jumps_.end() && it->position == x) return &*it;
    return nullptr;
}

std::size_t Problem::piece_index(double x) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::ptrdiff_t idx = (it - nodes_.begin()) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(pieces_.size()) - 1);
    return static_cast<std::size_t>(idx);
}

double theta(const Problem& problem, double z, double s) {
    if (!problem.interval().contains(s)) {
        throw DomainError("point " + format_number(s) + " is outside the open interval");
    }
    const Jump* j = problem.jump_at(s);
    if (j == nullptr) return 1.0;
    return 1.0 - z * z * j->d_alpha * j->d_beta;
}

double theta_ratio(const Problem& problem, double s) {
    return theta(problem, problem.r(), s) / theta(problem, 1.0 - problem.r(), s);
}

double omega(const PiecewiseMeasure& alpha, const PiecewiseMeasure& beta_j, double s) {
    if (!(alpha.interval() == beta_j.interval())) {
        throw InvariantError("alpha and beta_j must share the same interval");
    }
    return 1.0 - alpha.delta(s) * beta_j.delta(s) / 4.0;
}

namespace {

void check_alpha(const PiecewiseMeasure& alpha, HypothesisReport& report) {
    for (std::size_t i = 0; i < alpha.piece_count(); ++i) {
        if (!(alpha.densities()[i] > 0.0)) {
            report.alpha_increasing = false;
            report.messages.push_back("alpha density " + format_number(alpha.densities()[i]) +
                                      " on piece " + std::to_string(i) + " is not positive");
        }
    }
    for (const Atom& atom : alpha.atoms()) {
        if (!(atom.weight > 0.0)) {
            report.alpha_increasing = false;
            report.messages.push_back("alpha atom at x=" + format_number(atom.position) +
                                      " has non-positive weight " + format_number(atom.weight));
        }
    }
    report.pass = report.alpha_increasing;
}

}  // namespace

HypothesisReport check_hypothesis(const Problem& problem) {
    HypothesisReport report;
    check_alpha(problem.alpha(), report);
    const double r = problem.r();
    for (const Jump& j : problem.jumps()) {
        AtomDiagnostics d;
        d.position = j.position;
        d.d_alpha = j.d_alpha;
        d.d_beta = j.d_beta;
        const double p = j.d_alpha * j.d_beta;
        d.theta_r = 1.0 - r * r * p;
        d.theta_1mr = 1.0 - (1.0 - r) * (1.0 - r) * p;
        d.theta = d.theta_1mr != 0.0 ? d.theta_r / d.theta_1mr : std::nan("");
        d.omega = 1.0 - p / 4.0;
        d.pass = d.theta_r != 0.0 && d.theta_1mr != 0.0;
        if (d.theta_r == 0.0) {
            report.messages.push_back("theta_r vanishes at atom x=" + format_number(j.position));
        }
        if (d.theta_1mr == 0.0) {
            report.messages.push_back("theta_{1-r} vanishes at atom x=" + format_number(j.position));
        }
        report.pass = report.pass && d.pass;
        report.atoms.push_back(d);
    }
    return report;
}

HypothesisReport check_comparison_hypothesis(const PiecewiseMeasure& alpha,
                                             const PiecewiseMeasure& beta1,
                                             const PiecewiseMeasure& beta2) {
    if (!(alpha.interval() == beta1.interval()) || !(alpha.interval() == beta2.interval())) {
        throw InvariantError("alpha, beta1 and beta2 must share the same interval");
    }
    HypothesisReport report;
    check_alpha(alpha, report);
    // Positions where any of the three measures jumps.
    std::vector<double> positions;
    for (const Atom& atom : alpha.atoms()) positions.push_back(atom.position);
    for (const Atom& atom : beta1.atoms()) positions.push_back(atom.position);
    for (const Atom& atom : beta2.atoms()) positions.push_back(atom.position);
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    for (double s : positions) {
        const double w1 = omega(alpha, beta1, s);
        const double w2 = omega(alpha, beta2, s);
        AtomDiagnostics d;
        d.position = s;
        d.d_alpha = alpha.delta(s);
        d.d_beta = beta1.delta(s);
        d.theta_r = d.theta_1mr = d.omega = w1;
        d.theta = 1.0;
        d.pass = w1 != 0.0 && w2 != 0.0;
        if (w1 == 0.0) report.messages.push_back("omega_1 vanishes at atom x=" + format_number(s));
        if (w2 == 0.0) report.messages.push_back("omega_2 vanishes at atom x=" + format_number(s));
        report.pass = report.pass && d.pass;
        report.atoms.push_back(d);
    }
    return report;
}

}  // namespace msl
