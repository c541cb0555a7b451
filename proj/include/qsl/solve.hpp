#pragma once

#include <functional>
#include <utility>

#include "real.hpp"

namespace qsl {

// Root of f in [a, b] given f(a), f(b) of opposite sign (or one of them zero).
// Newton steps are taken while they stay inside the bracket, bisection
// otherwise. Converges to the working precision.
template <class T, class F, class DF>
T bracket_solve(F&& f, DF&& df, T a, T b)
{
    using std::abs;
    T fa = f(a), fb = f(b);
    if (fa == 0)
        return a;
    if (fb == 0)
        return b;
    if ((fa > 0) == (fb > 0))
        throw convergence_error("bracket_solve: no sign change");
    if (fa > 0) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    // now f(a) < 0 < f(b); a may exceed b
    const T eps = std::numeric_limits<T>::epsilon();
    T x = (a + b) / 2;
    T prev_step = abs(b - a);
    const int cap = 4 * precision_bits<T>() + 100;
    for (int it = 0; it < cap; ++it) {
        T fx = f(x);
        if (fx == 0)
            return x;
        if (fx < 0)
            a = x;
        else
            b = x;
        T tol = 4 * eps * (abs(x) + 1);
        if (abs(b - a) <= tol)
            return (a + b) / 2;
        T d = df(x);
        T nx = d != 0 ? T(x - fx / d) : x;
        T lo = a < b ? a : b, hi = a < b ? b : a;
        T step = abs(nx - x);
        // a Newton step this small has converged to the noise level
        if (d != 0 && step <= 256 * tol && nx >= lo && nx <= hi)
            return nx;
        if (!(nx > lo && nx < hi) || step > prev_step / 2) {
            nx = (a + b) / 2;
            step = abs(nx - x);
        }
        prev_step = step;
        x = nx;
    }
    return x;
}

// Maximizer of a unimodal g on [a, b].
template <class T, class G>
T golden_max(G&& g, T a, T b, int iterations)
{
    using std::sqrt;
    const T r = (sqrt(T(5)) - 1) / 2;
    T c = b - r * (b - a), d = a + r * (b - a);
    T gc = g(c), gd = g(d);
    for (int i = 0; i < iterations; ++i) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    return gc >= gd ? c : d;
}

} // namespace qsl
