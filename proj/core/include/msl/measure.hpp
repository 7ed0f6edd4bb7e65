#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace msl {

/// Finite open interval (a, b).
struct Interval {
    double a = 0.0;
    double b = 1.0;

    bool contains(double x) const noexcept { return a < x && x < b; }
    bool contains_closed(double x) const noexcept { return a <= x && x <= b; }
    double length() const noexcept { return b - a; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Point mass: the measure of the singleton {position}.
struct Atom {
    double position = 0.0;
    double weight = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Locally finite signed measure on an open interval: a constant density on
/// each piece between consecutive breakpoints plus finitely many atoms.
///
/// The constructor normalizes its input: zero-weight atoms are dropped, atoms
/// are sorted, and every atom position is inserted as a breakpoint (the piece
/// it falls in is split with the same density on both sides). Positions are
/// compared exactly; nearby atoms are never merged.
class PiecewiseMeasure {
public:
    PiecewiseMeasure(Interval interval, std::vector<double> breakpoints,
                     std::vector<double> densities, std::vector<Atom> atoms = {});

    /// density * Lebesgue measure on the interval.
    static PiecewiseMeasure uniform(Interval interval, double density);
    static PiecewiseMeasure zero(Interval interval) { return uniform(interval, 0.0); }

    const Interval& interval() const noexcept { return interval_; }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    std::span<const double> densities() const noexcept { return densities_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t piece_count() const noexcept { return densities_.size(); }

    /// Index of the piece containing x; a breakpoint belongs to the piece on
    /// its right.
    std::size_t piece_index(double x) const;
    double density_at(double x) const { return densities_[piece_index(x)]; }

    /// Weight of the atom at s, or 0. Throws DomainError unless s in (a, b).
    double delta(double s) const;

    /// Mass of the interval between lo and hi with the requested endpoint
    /// inclusion. Requires a <= lo <= hi <= b.
    double measure_of(double lo, double hi, bool include_lo, bool include_hi) const;

    /// True when every density and every atom weight meeting the interval is
    /// >= 0. Pieces are only counted when they overlap it in positive length.
    bool is_nonnegative_on(double lo, double hi, bool include_lo, bool include_hi) const;

    friend bool operator==(const PiecewiseMeasure&, const PiecewiseMeasure&) = default;

private:
    Interval interval_;
    std::vector<double> breakpoints_;
    std::vector<double> densities_;
    std::vector<Atom> atoms_;
};

/// c1*mu + c2*nu on the common refinement of both breakpoint sets.
PiecewiseMeasure combine(double c1, const PiecewiseMeasure& mu, double c2,
                         const PiecewiseMeasure& nu);

inline PiecewiseMeasure operator-(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu) {
    return combine(1.0, mu, -1.0, nu);
}
inline PiecewiseMeasure operator+(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu) {
    return combine(1.0, mu, 1.0, nu);
}

double delta(const PiecewiseMeasure& mu, double s);
double measure_of(const PiecewiseMeasure& mu, double lo, double hi, bool include_lo,
                  bool include_hi);

/// Piece of the common refinement of alpha and beta: both densities are
/// constant on (x_lo, x_hi).
struct Piece {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double alpha_density = 0.0;
    double beta_density = 0.0;
};

/// Joint jump data at a point where alpha or beta has an atom.
struct Jump {
    double position = 0.0;
    double d_alpha = 0.0;
    double d_beta = 0.0;
};

/// The homogeneous equation -d(du/dalpha) + u dbeta = 0 together with the
/// balancing parameter r in [0, 1].
///
/// Construction checks only structure (r range, shared interval). Whether the
/// solvability hypothesis holds is reported by check_hypothesis().
class Problem {
public:
    Problem(double r, PiecewiseMeasure alpha, PiecewiseMeasure beta);

    double r() const noexcept { return r_; }
    const PiecewiseMeasure& alpha() const noexcept { return alpha_; }
    const PiecewiseMeasure& beta() const noexcept { return beta_; }
    const Interval& interval() const noexcept { return alpha_.interval(); }

    /// a, every breakpoint of alpha or beta, b; strictly increasing.
    std::span<const double> nodes() const noexcept { return nodes_; }
    /// One entry per consecutive pair of nodes.
    std::span<const Piece> pieces() const noexcept { return pieces_; }
    /// Union of atom positions of alpha and beta, sorted.
    std::span<const Jump> jumps() const noexcept { return jumps_; }

    /// Jump data at x, or nullptr when neither measure has an atom there.
    const Jump* jump_at(double x) const noexcept;
    /// Index of the piece containing x (nodes belong to the piece on their right,
    /// except b which belongs to the last piece).
    std::size_t piece_index(double x) const;

    friend bool operator==(const Problem& lhs, const Problem& rhs) {
        return lhs.r_ == rhs.r_ && lhs.alpha_ == rhs.alpha_ && lhs.beta_ == rhs.beta_;
    }

private:
    double r_;
    PiecewiseMeasure alpha_;
    PiecewiseMeasure beta_;
    std::vector<double> nodes_;
    std::vector<Piece> pieces_;
    std::vector<Jump> jumps_;
};

/// theta_z(s) = 1 - z^2 * Delta_alpha(s) * Delta_beta(s).
double theta(const Problem& problem, double z, double s);
/// theta_r(s) / theta_{1-r}(s); equals 1 off atoms.
double theta_ratio(const Problem& problem, double s);
/// omega_j(s) = 1 - Delta_alpha(s) * Delta_beta_j(s) / 4.
double omega(const PiecewiseMeasure& alpha, const PiecewiseMeasure& beta_j, double s);

struct AtomDiagnostics {
    double position = 0.0;
    double d_alpha = 0.0;
    double d_beta = 0.0;
    double theta_r = 1.0;
    double theta_1mr = 1.0;
    double theta = 1.0;  ///< theta_r / theta_{1-r}; NaN when theta_{1-r} = 0
    double omega = 1.0;
    bool pass = true;
};

struct HypothesisReport {
    bool pass = true;
    bool alpha_increasing = true;
    std::vector<AtomDiagnostics> atoms;
    std::vector<std::string> messages;  ///< one line per failed check
};

/// Checks that alpha is strictly increasing and theta_r, theta_{1-r} do not
/// vanish at any atom. Failures are reported, never thrown.
HypothesisReport check_hypothesis(const Problem& problem);

/// Hypothesis for a pair of equations sharing alpha: alpha strictly
/// increasing and omega_1, omega_2 nonzero at every atom.
HypothesisReport check_comparison_hypothesis(const PiecewiseMeasure& alpha,
                                             const PiecewiseMeasure& beta1,
                                             const PiecewiseMeasure& beta2);

}  // namespace msl
