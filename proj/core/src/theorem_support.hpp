#pragma once

#include <array>
#include <string>
#include <vector>

#include "msl/theorems.hpp"

namespace msl::detail {

/// Boundary behavior named in the clause tables: u^+ = 0, u^- = 0, or a flip.
enum class End { plus_zero, minus_zero, flip };

struct ClauseShape {
    const char* id;
    End at_s;
    End at_t;
};

// Conclusion endpoints are closed exactly where the clause does not use the
// open-side zero (u^+(s) = 0 opens s, u^-(t) = 0 opens t).
inline constexpr std::array<ClauseShape, 9> kClauses{{
    {"I.1", End::plus_zero, End::minus_zero},
    {"I.2", End::minus_zero, End::minus_zero},
    {"I.3", End::plus_zero, End::plus_zero},
    {"I.4", End::minus_zero, End::plus_zero},
    {"II.1", End::flip, End::minus_zero},
    {"II.2", End::plus_zero, End::flip},
    {"II.3", End::flip, End::plus_zero},
    {"II.4", End::minus_zero, End::flip},
    {"II.5", End::flip, End::flip},
}};

inline bool closed_at_s(End e) { return e != End::plus_zero; }
inline bool closed_at_t(End e) { return e != End::minus_zero; }

/// Readings of a kind at s, strongest conclusion first.
std::vector<End> readings_at_s(ZeroKind kind);
/// Readings of a kind at t, strongest conclusion first.
std::vector<End> readings_at_t(ZeroKind kind);

const ClauseShape& clause_for(End at_s, End at_t);

std::string fmt(double x);
std::string end_condition(End e, const char* point);

/// Z(u) points at s and t, verified to be consecutive.
std::array<SignChangePoint, 2> consecutive_pair(const Solution& u, double s, double t,
                                                const AnalysisOptions& options);

TheoremCase make_case(const ClauseShape& shape, const SignChangePoint& s,
                      const SignChangePoint& t);

/// True when v changes sign at x (x in Z(v) and the sign rule agrees).
bool changes_sign_here(const Solution& v, double x, const AnalysisOptions& options);

/// Looks for a sign change of v inside the conclusion interval.
CaseVerdict check_conclusion(const Solution& v, const TheoremCase& c,
                             const AnalysisOptions& options);

}  // namespace msl::detail
