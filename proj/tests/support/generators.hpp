#pragma once

// Small seeded generators for property tests. Each draws from a fixed
// mt19937_64 stream so a failing case is reproduced by its seed alone.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "msl/measure.hpp"
#include "msl/propagator.hpp"

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(0.0, static_cast<double>(n))) % n; }
    bool coin(double p = 0.5) { return unit_(engine_) < p; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct Shape {
    double length = 6.0;
    std::size_t max_breakpoints = 4;
    std::size_t max_atoms = 4;
    double beta_min = -4.0;
    double beta_max = 1.0;
};

/// Sorted distinct points strictly inside (a, b), away from each other.
inline std::vector<double> points(Rng& rng, double a, double b, std::size_t n) {
    std::vector<double> xs;
    while (xs.size() < n) {
        const double x = rng.uniform(a + 0.05 * (b - a), b - 0.05 * (b - a));
        if (std::none_of(xs.begin(), xs.end(), [&](double y) { return std::abs(x - y) < 1e-3 * (b - a); })) {
            xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

/// Random problem on (0, length) satisfying the solvability hypothesis with
/// |theta_r|, |theta_{1-r}| >= 1e-2 at every atom.
inline std::shared_ptr<const msl::Problem> problem(Rng& rng, double r, const Shape& shape = {}) {
    const msl::Interval iv{0.0, shape.length};
    for (;;) {
        const std::vector<double> bps = points(rng, iv.a, iv.b, rng.index(shape.max_breakpoints + 1));
        std::vector<double> da(bps.size() + 1), db(bps.size() + 1);
        for (double& d : da) d = rng.uniform(0.5, 2.0);
        for (double& d : db) d = rng.uniform(shape.beta_min, shape.beta_max);
        std::vector<msl::Atom> aa, ba;
        for (double x : points(rng, iv.a, iv.b, rng.index(shape.max_atoms + 1))) {
            if (std::find(bps.begin(), bps.end(), x) != bps.end()) continue;
            const int which = static_cast<int>(rng.index(3));
            if (which != 1) aa.push_back({x, rng.uniform(0.1, 1.5)});
            if (which != 0) ba.push_back({x, rng.uniform(-3.0, 2.0)});
        }
        msl::PiecewiseMeasure alpha(iv, bps, da, aa);
        msl::PiecewiseMeasure beta(iv, bps, db, ba);
        auto p = std::make_shared<const msl::Problem>(r, std::move(alpha), std::move(beta));
        bool ok = true;
        for (const msl::Jump& j : p->jumps()) {
            ok = ok && std::abs(msl::theta(*p, r, j.position)) >= 1e-2 &&
                 std::abs(msl::theta(*p, 1.0 - r, j.position)) >= 1e-2;
        }
        if (ok) return p;
    }
}

inline double any_r(Rng& rng) {
    switch (rng.index(4)) {
        case 0: return 0.0;
        case 1: return 0.5;
        case 2: return 1.0;
        default: return rng.uniform(0.0, 1.0);
    }
}

/// Interior point that is not a node, so the initial data are unambiguous.
inline double free_point(Rng& rng, const msl::Problem& p) {
    for (;;) {
        const double x = rng.uniform(p.interval().a + 0.1, p.interval().b - 0.1);
        const auto nodes = p.nodes();
        if (std::find(nodes.begin(), nodes.end(), x) == nodes.end()) return x;
    }
}

inline msl::State unit_state(Rng& rng) {
    for (;;) {
        const msl::State s{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (s.max_norm() > 0.1) return s;
    }
}

}  // namespace gen
