#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msl/measure.hpp"
#include "msl/propagator.hpp"

namespace msl {

struct AnalysisOptions {
    /// A one-sided value w counts as zero when |w| <= zero_tolerance * scale,
    /// scale being the local solution scale (see local_scale()).
    double zero_tolerance = 1e-11;
};

enum class ZeroKind {
    ContinuousZero,  ///< u^- = u^+ = 0
    LeftZero,        ///< u^- = 0, u^+ != 0
    RightZero,       ///< u^+ = 0, u^- != 0
    StrictFlip,      ///< u^- u^+ < 0
};

const char* to_string(ZeroKind kind);

/// Which rule decided whether u changes sign at a point of Z(u).
enum class SignRule {
    BalancedValueZero,  ///< u(s) = 0 forces a sign change
    ThetaOneMinusR,     ///< u^-(s) = 0: changes sign iff theta_{1-r}(s) > 0
    ThetaR,             ///< u^+(s) = 0: changes sign iff theta_r(s) > 0
    FlipWindow,         ///< u^- u^+ < 0: sign change by definition
};

const char* to_string(SignRule rule);

struct SignCriterion {
    SignRule rule = SignRule::BalancedValueZero;
    /// theta value for the theta rules, u(s)/(du/dalpha)(s) for FlipWindow.
    double value = 0.0;
    /// (-r Delta_alpha, (1-r) Delta_alpha); only meaningful for FlipWindow.
    double window_lo = 0.0;
    double window_hi = 0.0;
    /// Cross-check of the flip window; always true for the other rules.
    bool window_holds = true;

    std::string describe() const;
};

struct SignChangePoint {
    double position = 0.0;
    ZeroKind kind = ZeroKind::ContinuousZero;
    bool changes_sign = true;
    SignCriterion criterion;
    State left;
    State mid;
    State right;
};

struct SignVerdict {
    bool changes_sign = true;
    SignCriterion criterion;
};

/// max(|u^-|, |u|, |u^+|, l * max|v^{-,mid,+}|) with l the local alpha length:
/// the largest of Delta_alpha(x) and the alpha mass of the adjacent pieces.
double local_scale(const Solution& sol, double x);

/// Kind of x as a member of Z(u), or nullopt when u^-(x) u^+(x) > 0.
std::optional<ZeroKind> zero_kind_at(const Solution& sol, double x,
                                     const AnalysisOptions& options = {});

/// All points of Z(u) in [lo, hi], sorted. Requires [lo, hi] inside (a, b) and a
/// nontrivial solution. Interior zeros of each piece come from the closed form.
std::vector<SignChangePoint> find_sign_changes(const Solution& sol, double lo, double hi,
                                               const AnalysisOptions& options = {});
/// All points of Z(u) in the open interval (a, b).
std::vector<SignChangePoint> find_sign_changes(const Solution& sol,
                                               const AnalysisOptions& options = {});

/// Decides whether u changes sign at s in Z(u). Throws PreconditionError when
/// s is not in Z(u).
SignVerdict changes_sign_at(const Solution& sol, double s, const AnalysisOptions& options = {});

/// Points of Z(du/dalpha) in [lo, hi]. A piece on which du/dalpha vanishes
/// identically contributes its first point inside [lo, hi].
std::vector<double> quasi_derivative_zeros(const Solution& sol, double lo, double hi,
                                           const AnalysisOptions& options = {});

/// Some x in [s, t] with (du/dalpha)^-(x) (du/dalpha)^+(x) <= 0, for s < t in Z(u).
double mean_value_witness(const Solution& sol, double s, double t,
                          const AnalysisOptions& options = {});

struct WronskianValues {
    double w = 0.0;
    double w_minus = 0.0;
    double w_plus = 0.0;
    /// max(|W^-/theta_{1-r} - W|, |W^+/theta_r - W|) relative to the size of
    /// the products forming W (at least |W|); zero off atoms.
    double relation_residual = 0.0;
};

/// W[u, v] = u dv/dalpha - v du/dalpha from balanced and one-sided values.
WronskianValues wronskian(const Solution& u, const Solution& v, double x);

/// The purely atomic measure d(gamma) with weights (1-2r) Delta_alpha Delta_beta / theta_{1-r}.
PiecewiseMeasure wronskian_jump_measure(const Problem& problem);

/// W^-(x) * prod_{t in [x, y)} theta(t); equals W^-(y).
double wronskian_product(const Solution& u, const Solution& v, double x, double y);

/// v du/dalpha - u dv/dalpha from the requested side; both solutions balanced
/// and sharing alpha.
double modified_wronskian(const Solution& v, const Solution& u, double x, Side side = Side::mid);

}  // namespace msl
