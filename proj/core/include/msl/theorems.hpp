#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msl/analysis.hpp"

namespace msl {

/// Subinterval of (s, t) with chosen endpoint membership.
struct ConclusionInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool include_lo = false;
    bool include_hi = false;

    bool contains(double x) const noexcept {
        return (include_lo ? x >= lo : x > lo) && (include_hi ? x <= hi : x < hi);
    }
    /// "(s,t)", "[s,t)", "(s,t]" or "[s,t]".
    std::string shape() const;
};

/// One clause of a separation or comparison theorem whose hypotheses hold for
/// a consecutive pair s < t of Z(u).
struct TheoremCase {
    std::string id;
    double s = 0.0;
    double t = 0.0;
    ZeroKind kind_s = ZeroKind::ContinuousZero;
    ZeroKind kind_t = ZeroKind::ContinuousZero;
    ConclusionInterval conclusion;
    /// Checked conditions with their values, e.g. "theta_r(s)=0.75".
    std::vector<std::string> hypotheses;
    /// Diagnostic clause: a failed conclusion is a warning, not an error.
    bool diagnostic = false;
};

using SeparationCase = TheoremCase;
using ComparisonCase = TheoremCase;

/// Strongest separation clause whose hypotheses hold for the consecutive pair
/// s < t of Z(u). Empty when theta <= 0 at an atom of (s, t) or the endpoint
/// conditions fail; when theta < 0 at an even number of atoms of (s, t) the
/// first-theorem clauses are returned as diagnostics with an "e" suffix.
/// Throws PreconditionError unless s and t are consecutive points of Z(u).
std::vector<SeparationCase> classify_separation(const Solution& u, double s, double t,
                                                const AnalysisOptions& options = {});

/// Strongest comparison clause (including I.4') for the consecutive pair
/// s < t of Z(u), with u solving the beta_1 equation and beta_2 taken from v.
std::vector<ComparisonCase> classify_comparison(const Solution& u, const Solution& v, double s,
                                                double t, const AnalysisOptions& options = {});

struct CaseVerdict {
    TheoremCase theorem_case;
    bool pass = false;
    /// Sign-change point of v inside the conclusion interval.
    std::optional<double> witness;
    std::string detail;
};

struct LemmaCheck {
    std::string lemma;  ///< "flip-wronskian", "flip-modified", or "flip-modified-left" / "-right"
    double position = 0.0;
    double value = 0.0;
    bool pass = true;
};

struct VerificationReport {
    std::string theorem;  ///< "separation" or "comparison"
    std::vector<double> zeros;
    std::vector<CaseVerdict> verdicts;
    std::vector<LemmaCheck> lemma_checks;
    /// Consecutive pairs for which no clause applies, as (s, t).
    std::vector<std::pair<double, double>> inapplicable;

    std::size_t failures() const;
    std::size_t warnings() const;
    bool pass() const { return failures() == 0; }
};

/// Checks every applicable separation clause on every consecutive pair of
/// Z(u), plus the flip lemma at each strict flip of u where v keeps its sign.
/// Throws PreconditionError for dependent or mismatched solutions.
VerificationReport verify_separation(const Solution& u, const Solution& v,
                                     const AnalysisOptions& options = {});

/// As verify_separation for u solving the beta_1 equation and v the beta_2
/// equation; both balanced with a shared alpha. Throws HypothesisError when
/// omega_1 or omega_2 vanishes at an atom.
VerificationReport verify_comparison(const Solution& u, const Solution& v,
                                     const AnalysisOptions& options = {});

}  // namespace msl
