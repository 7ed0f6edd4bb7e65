#include "msl/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "msl/errors.hpp"

namespace msl {

namespace {

struct Mat2 {
    double a11, a12, a21, a22;
    State operator*(State s) const { return {a11 * s.u + a12 * s.v, a21 * s.u + a22 * s.v}; }
};

void require_solvable(const Problem& problem, double x0) {
    if (!problem.interval().contains(x0)) throw DomainError("x0 is outside the open interval");
    const HypothesisReport report = check_hypothesis(problem);
    if (!report.pass) throw HypothesisError(report.messages.front());
}

State rk4_step(double A, double B, double h, State y) {
    auto f = [A, B](State s) { return State{A * s.v, B * s.u}; };
    const State k1 = f(y);
    const State k2 = f(y + (h / 2.0) * k1);
    const State k3 = f(y + (h / 2.0) * k2);
    const State k4 = f(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Sample {
    double x;
    State left, mid, right;
};

/// Integrates from x_from to x_to inside one piece, sampling every stride steps.
State integrate_piece(const Piece& piece, double x_from, double x_to, State y, std::size_t steps,
                      std::size_t stride, std::vector<Sample>& out) {
    const double len = piece.x_hi - piece.x_lo;
    const double dist = x_to - x_from;
    if (dist == 0.0) return y;
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(steps) * std::abs(dist) / len)));
    const double h = dist / static_cast<double>(n);
    for (std::size_t i = 1; i <= n; ++i) {
        y = rk4_step(piece.alpha_density, piece.beta_density, h, y);
        if (stride > 0 && i % stride == 0 && i < n) {
            const double x = x_from + h * static_cast<double>(i);
            out.push_back({x, y, y, y});
        }
    }
    return y;
}

void finish(std::vector<Sample>& samples, OracleSamples& out) {
    std::sort(samples.begin(), samples.end(),
              [](const Sample& l, const Sample& r) { return l.x < r.x; });
    for (const Sample& s : samples) {
        out.x.push_back(s.x);
        out.left.push_back(s.left);
        out.mid.push_back(s.mid);
        out.right.push_back(s.right);
    }
}

Mat2 transfer_right(double r, const Jump& j) {
    const State c1 = cross_atom(r, j.d_alpha, j.d_beta, {1.0, 0.0}, j.position).right;
    const State c2 = cross_atom(r, j.d_alpha, j.d_beta, {0.0, 1.0}, j.position).right;
    return {c1.u, c2.u, c1.v, c2.v};
}

Mat2 transfer_left(double r, const Jump& j) {
    const State c1 = cross_atom_leftward(r, j.d_alpha, j.d_beta, {1.0, 0.0}, j.position).left;
    const State c2 = cross_atom_leftward(r, j.d_alpha, j.d_beta, {0.0, 1.0}, j.position).left;
    return {c1.u, c2.u, c1.v, c2.v};
}

}  // namespace

OracleSamples onestep_solve(const Problem& problem, double x0, double u0, double v0,
                            std::size_t steps_per_piece, std::size_t sample_stride) {
    if (steps_per_piece == 0) throw PreconditionError("steps_per_piece must be at least 1");
    require_solvable(problem, x0);
    const double r = problem.r();
    const auto nodes = problem.nodes();
    const auto pieces = problem.pieces();
    const std::size_t m = pieces.size();
    const std::size_t k = problem.piece_index(x0);

    std::vector<Sample> samples;
    const State mid0{u0, v0};
    State start_right = mid0;
    State start_left = mid0;
    if (const Jump* j = problem.jump_at(x0)) {
        start_left = jump_left(r, j->d_alpha, j->d_beta, mid0);
        start_right = jump_right(r, j->d_alpha, j->d_beta, mid0);
    }
    samples.push_back({x0, start_left, mid0, start_right});

    // Rightward through pieces k, k+1, ...
    State y = start_right;
    double x = x0;
    for (std::size_t i = k; i < m; ++i) {
        y = integrate_piece(pieces[i], x, nodes[i + 1], y, steps_per_piece, sample_stride, samples);
        x = nodes[i + 1];
        if (i + 1 == m) break;
        Sample s{x, y, y, y};
        if (const Jump* j = problem.jump_at(x)) {
            const AtomCrossing c = cross_atom(r, j->d_alpha, j->d_beta, y, x);
            s.mid = c.mid;
            s.right = c.right;
            y = c.right;
        }
        samples.push_back(s);
    }

    // Leftward through pieces k, k-1, ... (x0 on a node starts one piece lower).
    y = start_left;
    x = x0;
    std::size_t i = (x0 == nodes[k]) ? k : k + 1;
    while (i-- > 0) {
        y = integrate_piece(pieces[i], x, nodes[i], y, steps_per_piece, sample_stride, samples);
        x = nodes[i];
        if (i == 0) break;
        Sample s{x, y, y, y};
        if (const Jump* j = problem.jump_at(x)) {
            const AtomCrossingLeftward c = cross_atom_leftward(r, j->d_alpha, j->d_beta, y, x);
            s.mid = c.mid;
            s.left = c.left;
            y = c.left;
        }
        samples.push_back(s);
    }

    OracleSamples out;
    finish(samples, out);
    return out;
}

PicardResult picard_solve(const Problem& problem, double x0, double u0, double v0,
                          std::size_t iterations, std::size_t mesh, double lo, double hi) {
    if (iterations == 0 || mesh == 0) throw PreconditionError("iterations and mesh must be at least 1");
    require_solvable(problem, x0);
    const Interval& iv = problem.interval();
    if (!(iv.a < lo && lo <= x0 && x0 <= hi && hi < iv.b)) {
        throw DomainError("picard_solve requires a < lo <= x0 <= hi < b");
    }
    const double r = problem.r();

    std::vector<double> pts;
    pts.reserve(mesh + 2);
    for (std::size_t j = 0; j <= mesh; ++j) {
        pts.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(mesh));
    }
    pts.back() = hi;
    for (double node : problem.nodes()) {
        if (node > lo && node < hi) pts.push_back(node);
    }
    pts.push_back(x0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    const auto i0 = static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), x0) - pts.begin());

    // Jump increments: Y^+ - Y^- = J Y^- rightward, Y^- - Y^+ = K Y^+ leftward.
    std::vector<const Jump*> jumps(n, nullptr);
    std::vector<Mat2> J(n), K(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (const Jump* j = problem.jump_at(pts[i])) {
            jumps[i] = j;
            const Mat2 t = transfer_right(r, *j);
            J[i] = {t.a11 - 1.0, t.a12, t.a21, t.a22 - 1.0};
            const Mat2 ti = transfer_left(r, *j);
            K[i] = {ti.a11 - 1.0, ti.a12, ti.a21, ti.a22 - 1.0};
        }
    }
    std::vector<Mat2> M(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Piece& p = problem.pieces()[problem.piece_index(0.5 * (pts[i] + pts[i + 1]))];
        M[i] = {0.0, p.alpha_density, p.beta_density, 0.0};
    }

    const State mid0{u0, v0};
    State left0 = mid0;
    State right0 = mid0;
    if (jumps[i0]) {
        left0 = jump_left(r, jumps[i0]->d_alpha, jumps[i0]->d_beta, mid0);
        right0 = jump_right(r, jumps[i0]->d_alpha, jumps[i0]->d_beta, mid0);
    }

    // Global Picard on [lo, hi] contracts only like (|M| d)^k / k!, so the map is
    // iterated on consecutive panels with |M| * length <= 1, each seeded by the
    // converged values at its starting node.
    double m_norm = 1e-300;
    for (const Mat2& m : M) m_norm = std::max({m_norm, std::abs(m.a12), std::abs(m.a21)});
    const double panel = 1.0 / m_norm;

    std::vector<State> old_left(n, mid0), old_right(n, mid0);
    std::vector<State> new_left(n), new_right(n);
    old_left[i0] = new_left[i0] = left0;
    old_right[i0] = new_right[i0] = right0;
    PicardResult result;
    result.residuals.assign(iterations, 0.0);

    auto iterate_panel = [&](std::size_t from, std::size_t to, bool rightward) {
        const std::size_t first = rightward ? from : to;
        const std::size_t last = rightward ? to : from;
        for (std::size_t i = first; i <= last; ++i) {
            if (i == from) continue;
            old_left[i] = rightward ? old_right[from] : old_left[from];
            old_right[i] = old_left[i];
        }
        for (std::size_t it = 0; it < iterations; ++it) {
            if (rightward) {
                for (std::size_t i = from + 1; i <= to; ++i) {
                    const double h = pts[i] - pts[i - 1];
                    const State integral = (h / 2.0) * (M[i - 1] * old_right[i - 1] + M[i - 1] * old_left[i]);
                    new_left[i] = new_right[i - 1] + integral;
                    new_right[i] = jumps[i] ? new_left[i] + J[i] * old_left[i] : new_left[i];
                }
            } else {
                for (std::size_t i = from; i-- > to;) {
                    const double h = pts[i + 1] - pts[i];
                    const State integral = (h / 2.0) * (M[i] * old_right[i] + M[i] * old_left[i + 1]);
                    new_right[i] = new_left[i + 1] - integral;
                    new_left[i] = jumps[i] ? new_right[i] + K[i] * old_right[i] : new_right[i];
                }
            }
            double residual = 0.0;
            for (std::size_t i = first; i <= last; ++i) {
                if (i == from) continue;
                residual = std::max({residual, (new_left[i] - old_left[i]).max_norm(),
                                     (new_right[i] - old_right[i]).max_norm()});
                old_left[i] = new_left[i];
                old_right[i] = new_right[i];
            }
            result.residuals[it] = std::max(result.residuals[it], residual);
        }
    };

    for (std::size_t from = i0; from + 1 < n;) {
        std::size_t to = from + 1;
        while (to + 1 < n && pts[to + 1] - pts[from] <= panel) ++to;
        iterate_panel(from, to, true);
        from = to;
    }
    for (std::size_t from = i0; from > 0;) {
        std::size_t to = from - 1;
        while (to > 0 && pts[from] - pts[to - 1] <= panel) --to;
        iterate_panel(from, to, false);
        from = to;
    }

    OracleSamples& out = result.samples;
    for (std::size_t i = 0; i < n; ++i) {
        out.x.push_back(pts[i]);
        out.left.push_back(old_left[i]);
        // The balanced value is the r-weighted mean of the one-sided limits.
        out.mid.push_back(i == i0 ? mid0 : r * old_left[i] + (1.0 - r) * old_right[i]);
        out.right.push_back(old_right[i]);
    }
    return result;
}

double wronskian_series(const Problem& problem, double x, double y) {
    if (!(x < y)) throw DomainError("wronskian_series requires x < y");
    const double r = problem.r();
    std::vector<double> gammas;
    double product = 1.0;
    for (const Jump& j : problem.jumps()) {
        if (j.position < x || j.position >= y) continue;
        const double p = j.d_alpha * j.d_beta;
        const double theta_1mr = 1.0 - (1.0 - r) * (1.0 - r) * p;
        if (theta_1mr == 0.0) throw HypothesisError("theta_{1-r} vanishes", j.position);
        gammas.push_back((1.0 - 2.0 * r) * p / theta_1mr);
        product *= (1.0 - r * r * p) / theta_1mr;
    }
    // e[k] = k-th elementary symmetric function; mag[k] the same of |gamma|.
    std::vector<double> e(gammas.size() + 1, 0.0), mag(gammas.size() + 1, 0.0);
    e[0] = mag[0] = 1.0;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        for (std::size_t k = i + 1; k > 0; --k) {
            e[k] += e[k - 1] * gammas[i];
            mag[k] += mag[k - 1] * std::abs(gammas[i]);
        }
    }
    const double series = std::accumulate(e.begin(), e.end(), 0.0);
    const double scale = std::max(std::abs(product), std::accumulate(mag.begin(), mag.end(), 0.0));
    if (std::abs(series - product) > 1e-12 * scale) {
        throw InvariantError("wronskian series and theta product disagree");
    }
    return series;
}

double sample_deviation(const OracleSamples& samples, const Solution& exact) {
    const Interval& iv = exact.problem().interval();
    double dev = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < samples.x.size(); ++i) {
        const double x = samples.x[i];
        if (!iv.contains(x)) continue;
        const std::array<std::pair<Side, State>, 3> sides{
            {{Side::left, samples.left[i]}, {Side::mid, samples.mid[i]}, {Side::right, samples.right[i]}}};
        for (const auto& [side, s] : sides) {
            const State e = exact.evaluate(x, side);
            dev = std::max(dev, (s - e).max_norm());
            sup = std::max(sup, e.max_norm());
        }
    }
    return dev / std::max(1.0, sup);
}

}  // namespace msl
