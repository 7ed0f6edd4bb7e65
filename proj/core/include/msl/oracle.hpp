#pragma once

#include <cstddef>
#include <vector>

#include "msl/measure.hpp"
#include "msl/propagator.hpp"

namespace msl {

/// States sampled by an oracle. Off atoms left, mid and right coincide.
struct OracleSamples {
    std::vector<double> x;
    std::vector<State> left;
    std::vector<State> mid;
    std::vector<State> right;
};

/// Classical fourth-order Runge-Kutta on every piece with step
/// h = piece_length / steps_per_piece, crossing atoms with the jump algebra.
/// Samples every node plus every sample_stride-th interior step (0: nodes only).
OracleSamples onestep_solve(const Problem& problem, double x0, double u0, double v0,
                            std::size_t steps_per_piece, std::size_t sample_stride = 0);

struct PicardResult {
    OracleSamples samples;
    /// max |Y_k - Y_{k-1}| over the mesh (all panels) for each iteration k.
    std::vector<double> residuals;
};

/// Picard iteration of the integral form of the system on [lo, hi] (which must
/// contain x0 and lie in (a, b)): absolutely continuous parts by the composite
/// trapezoid rule on a uniform mesh refined by the breakpoints, atoms by the
/// exact jump applied to the previous iterate. The iteration count applies to
/// each panel of a partition of [lo, hi] on which |M| * length <= 1, where M
/// is the coefficient matrix of the absolutely continuous part.
PicardResult picard_solve(const Problem& problem, double x0, double u0, double v0,
                          std::size_t iterations, std::size_t mesh, double lo, double hi);

/// Finite series 1 + sum e_k(dgamma) over the atoms of [x, y); throws
/// InvariantError if it disagrees with the product of theta beyond 1e-12
/// relative and DomainError unless x < y.
double wronskian_series(const Problem& problem, double x, double y);

/// max |a - b| / max(1, max |b|) over the samples, all sides included.
double sample_deviation(const OracleSamples& samples, const Solution& exact);

}  // namespace msl
