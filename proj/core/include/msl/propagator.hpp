#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "msl/measure.hpp"

namespace msl {

/// (u, du/dalpha) at a point.
struct State {
    double u = 0.0;
    double v = 0.0;

    friend State operator+(State x, State y) { return {x.u + y.u, x.v + y.v}; }
    friend State operator-(State x, State y) { return {x.u - y.u, x.v - y.v}; }
    friend State operator*(double c, State x) { return {c * x.u, c * x.v}; }
    friend bool operator==(const State&, const State&) = default;

    double max_norm() const noexcept { return std::max(std::abs(u), std::abs(v)); }
};

enum class Side { left, mid, right };

const char* to_string(Side side);

/// Fundamental pair of u' = A v, v' = B u with q = A*B: the flow over dx is
/// u -> c*u + A*s*v, v -> c*v + B*s*u.
struct FundamentalPair {
    double c = 1.0;
    double s = 0.0;
};

FundamentalPair fundamental_pair(double q, double dx);

/// Exact flow of u' = A v, v' = B u over a signed distance dx. Requires A > 0.
State ac_flow(double A, double B, double dx, State s);

/// Right limit from the r-balanced value at an atom.
State jump_right(double r, double da, double db, State mid);
/// Left limit from the r-balanced value at an atom.
State jump_left(double r, double da, double db, State mid);

struct AtomCrossing {
    State mid;
    State right;
};

struct AtomCrossingLeftward {
    State mid;
    State left;
};

/// Left limit -> (balanced value, right limit). Throws HypothesisError when
/// theta_{1-r} = 1 - (1-r)^2 da db vanishes.
AtomCrossing cross_atom(double r, double da, double db, State left,
                        double position = std::numeric_limits<double>::quiet_NaN());
/// Right limit -> (balanced value, left limit). Throws HypothesisError when
/// theta_r vanishes.
AtomCrossingLeftward cross_atom_leftward(double r, double da, double db, State right,
                                         double position = std::numeric_limits<double>::quiet_NaN());

/// One-sided and balanced states at an atom.
struct AtomRecord {
    double position = 0.0;
    double d_alpha = 0.0;
    double d_beta = 0.0;
    State left;
    State mid;
    State right;

    const State& at(Side side) const noexcept {
        return side == Side::left ? left : side == Side::right ? right : mid;
    }
};

/// A piece with constant densities, holding the right limit at its left edge.
struct Segment {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double alpha_density = 1.0;
    double beta_density = 0.0;
    State state_at_lo;

    State at(double x) const { return ac_flow(alpha_density, beta_density, x - x_lo, state_at_lo); }
};

/// Exact r-balanced solution of an initial value problem.
///
/// Immutable once built; evaluation is an O(log n) piece lookup followed by a
/// closed-form flow from the piece's left edge.
class Solution {
public:
    Solution(std::shared_ptr<const Problem> problem, std::vector<Segment> segments,
             std::vector<AtomRecord> atoms, double x0, State initial);

    const Problem& problem() const noexcept { return *problem_; }
    const std::shared_ptr<const Problem>& problem_ptr() const noexcept { return problem_; }
    std::span<const Segment> segments() const noexcept { return segments_; }
    std::span<const AtomRecord> atom_records() const noexcept { return atoms_; }
    double x0() const noexcept { return x0_; }
    State initial() const noexcept { return initial_; }
    bool trivial() const noexcept { return initial_.u == 0.0 && initial_.v == 0.0; }

    /// Atom record at x, or nullptr.
    const AtomRecord* atom_at(double x) const noexcept;
    /// Segment containing x (a node belongs to the segment on its right).
    const Segment& segment_at(double x) const;

    State evaluate(double x, Side side = Side::mid) const;
    /// left, mid and right values at x; the three coincide off atoms.
    AtomRecord sides_at(double x) const;

    /// True when both solutions belong to the same equation.
    bool same_problem(const Solution& other) const noexcept {
        return problem_ == other.problem_ || *problem_ == *other.problem_;
    }

private:
    std::shared_ptr<const Problem> problem_;
    std::vector<Segment> segments_;
    std::vector<AtomRecord> atoms_;
    double x0_;
    State initial_;
};

/// Solves -d(du/dalpha) + u dbeta = 0 with u(x0) = u0, du/dalpha(x0) = v0.
///
/// When x0 is an atom the initial data are the r-balanced values there; the
/// one-sided limits follow from the jump equations. Throws HypothesisError
/// when check_hypothesis() fails and DomainError when x0 is outside (a, b).
Solution solve_ivp(std::shared_ptr<const Problem> problem, double x0, double u0, double v0);
Solution solve_ivp(const Problem& problem, double x0, double u0, double v0);

State evaluate(const Solution& sol, double x, Side side = Side::mid);

}  // namespace msl
