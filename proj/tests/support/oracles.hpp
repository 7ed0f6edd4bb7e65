#pragma once

// Reference computations that share no code with the library: a power-series
// matrix exponential, Cramer's rule, composite Simpson quadrature and a dense
// sign scan.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Mat = std::array<double, 4>;  // row major {a11, a12, a21, a22}
using Vec = std::array<double, 2>;

inline Mat mul(const Mat& x, const Mat& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

inline Vec mat_vec(const Mat& m, const Vec& v) { return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]}; }

/// exp(M) by scaling, a Taylor series summed until the terms stop changing
/// the result, and squaring.
inline Mat expm(Mat m) {
    int squarings = 0;
    const double norm = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
    while (std::ldexp(norm, -squarings) > 0.5) ++squarings;
    for (double& x : m) x = std::ldexp(x, -squarings);
    Mat sum{1, 0, 0, 1};
    Mat term{1, 0, 0, 1};
    for (int k = 1; k < 60; ++k) {
        term = mul(term, m);
        for (double& x : term) x /= k;
        Mat next = sum;
        for (int i = 0; i < 4; ++i) next[i] += term[i];
        if (next == sum) break;
        sum = next;
    }
    for (int i = 0; i < squarings; ++i) sum = mul(sum, sum);
    return sum;
}

/// Flow of u' = A v, v' = B u over dx.
inline Vec flow(double A, double B, double dx, Vec y) { return mat_vec(expm({0, A * dx, B * dx, 0}), y); }

/// Solves M x = rhs by Cramer's rule.
inline Vec solve2(const Mat& m, const Vec& rhs) {
    const double det = m[0] * m[3] - m[1] * m[2];
    return {(rhs[0] * m[3] - m[1] * rhs[1]) / det, (m[0] * rhs[1] - rhs[0] * m[2]) / det};
}

/// Balanced value at an atom from the left limit: the left jump equations
/// u^- = u - (1-r) da v, v^- = v - (1-r) db u solved for (u, v).
inline Vec mid_from_left(double r, double da, double db, Vec left) {
    return solve2({1.0, -(1.0 - r) * da, -(1.0 - r) * db, 1.0}, left);
}

inline Vec right_from_mid(double r, double da, double db, Vec mid) {
    return {mid[0] + r * da * mid[1], mid[1] + r * db * mid[0]};
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t n = 2000) {
    if (n % 2) ++n;
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = f(lo) + f(hi);
    for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
    return acc * h / 3.0;
}

/// Points of a uniform grid on [lo, hi] where f changes strict sign between
/// neighbours (midpoint reported), for locating roots to within the spacing.
inline std::vector<double> sign_scan(const std::function<double(double)>& f, double lo, double hi,
                                     std::size_t n = 100000) {
    std::vector<double> out;
    double x_prev = lo;
    double f_prev = f(lo);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double fx = f(x);
        if ((f_prev < 0 && fx > 0) || (f_prev > 0 && fx < 0)) out.push_back(0.5 * (x_prev + x));
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

}  // namespace oracle
