#pragma once

#include <cmath>
#include <utility>

namespace d2dcache {

namespace detail {

template <typename Fn>
double simpson_step(Fn& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, int force_depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // force_depth guards against false convergence on narrow-support integrands
    if (depth <= 0 || (force_depth <= 0 && std::fabs(delta) <= 15.0 * tol))
        return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, force_depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, force_depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance. The first min_depth
// levels always subdivide so that features narrower than (b-a)/2^min_depth
// cannot be skipped over.
template <typename Fn>
double adaptive_simpson(Fn&& f, double a, double b, double abs_tol, int max_depth = 48,
                        int min_depth = 8) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth, min_depth);
}

}  // namespace d2dcache
