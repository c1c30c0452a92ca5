#pragma once

// Test-side oracles, kept independent of the library's integration and
// window machinery on purpose: adaptive quadrature, interval-union
// enumeration, and closed forms evaluated directly.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracles {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, m, fa, flm, fm);
    double right = simpson(m, b, fm, frm, fb);
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

/// Adaptive Simpson quadrature; panels seeded finer than the integrand's
/// oscillation when `min_panels` is set.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int min_panels = 16) {
    double total = 0.0;
    double h = (b - a) / min_panels;
    for (int i = 0; i < min_panels; ++i) {
        double lo = a + i * h, hi = lo + h;
        double fa = f(lo), fm = f(0.5 * (lo + hi)), fb = f(hi);
        total += adaptive_simpson_rec(f, lo, hi, fa, fm, fb, simpson(lo, hi, fa, fm, fb),
                                      tol / min_panels, 0);
    }
    return total;
}

/// Lebesgue measure of the union of typewriter blocks with indices in
/// [n, m], by explicit interval merging (no dyadic shortcuts).
inline double typewriter_covered_measure(long n, long m,
                                         const std::function<std::pair<double, double>(long)>& block) {
    std::vector<std::pair<double, double>> iv;
    for (long k = n; k <= m; ++k) iv.push_back(block(k));
    std::sort(iv.begin(), iv.end());
    double total = 0.0, cur_lo = 0.0, cur_hi = -1.0;
    for (const auto& [lo, hi] : iv) {
        if (lo > cur_hi) {
            if (cur_hi > cur_lo) total += cur_hi - cur_lo;
            cur_lo = lo;
            cur_hi = hi;
        } else {
            cur_hi = std::max(cur_hi, hi);
        }
    }
    if (cur_hi > cur_lo) total += cur_hi - cur_lo;
    return total;
}

}  // namespace oracles
