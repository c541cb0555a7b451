#pragma once

#include <optional>
#include <vector>

#include "polynomial.hpp"

namespace qsl {

enum class Parity { even, odd, unknown };

inline const char* to_string(Parity p)
{
    switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "unknown";
    }
}

template <class T>
struct RootEnclosure {
    Interval<T> x;
    Parity parity = Parity::unknown;
};

template <class T>
struct RootOptions {
    std::optional<Interval<T>> window; // default: Cauchy bound
    std::optional<T> width;            // default: 2^(-bits/2)
    bool leftmost_only = false;
};

namespace detail {

template <class T>
int sign_at(const std::vector<T>& c, const T& x)
{
    return horner(c, Interval<T>(x)).sign();
}

// Coefficients carried as midpoint and radius.
template <class T>
struct FuzzyCoeffs {
    std::vector<T> mid;
    std::vector<T> rad;
};

template <class T>
FuzzyCoeffs<T> shift_fuzzy(const FuzzyCoeffs<T>& in, const T& c)
{
    using std::abs;
    const std::size_t n = in.mid.size();
    const T u = std::numeric_limits<T>::epsilon() * (4 * static_cast<long>(n) + 4);
    FuzzyCoeffs<T> out;
    out.mid = taylor_shift(in.mid, c);
    std::vector<T> a(n);
    for (std::size_t k = 0; k < n; ++k)
        a[k] = abs(in.mid[k]);
    a = taylor_shift(std::move(a), T(abs(c)));
    out.rad = taylor_shift(in.rad, T(abs(c)));
    for (std::size_t k = 0; k < n; ++k)
        out.rad[k] = out.rad[k] * (1 + u) + a[k] * u + ulp_floor<T>();
    return out;
}

// Upper bound on the sign variations of the coefficient sequence when
// uncertain entries may take any sign (or vanish). Also reports whether any
// entry was uncertain.
template <class T>
int max_variations(const FuzzyCoeffs<T>& f, bool& uncertain)
{
    uncertain = false;
    constexpr int none = -1;
    bool empty_prefix = true; // no nonzero coefficient forced yet
    int best[2] = {none, none}; // most variations ending in sign - / +
    for (std::size_t k = 0; k < f.mid.size(); ++k) {
        const T& m = f.mid[k];
        const T& r = f.rad[k];
        if (m == 0 && r == 0)
            continue;
        const bool can[2] = {m - r < 0, m + r > 0};
        const bool can_skip = can[0] && can[1];
        uncertain = uncertain || can_skip;
        int next[2] = {none, none};
        for (int s = 0; s < 2; ++s) {
            if (can_skip)
                next[s] = best[s];
            if (!can[s])
                continue;
            int v = empty_prefix ? 0 : none;
            if (best[s] != none)
                v = std::max(v, best[s]);
            if (best[1 - s] != none)
                v = std::max(v, best[1 - s] + 1);
            next[s] = std::max(next[s], v);
        }
        empty_prefix = empty_prefix && can_skip;
        best[0] = next[0];
        best[1] = next[1];
    }
    return std::max(0, std::max(best[0], best[1]));
}

// Descartes bound for the roots of p in the open interval (a, b).
template <class T>
int descartes_bound(const std::vector<T>& c, const T& a, const T& b, bool& uncertain)
{
    using std::abs;
    const std::size_t n = c.size();
    FuzzyCoeffs<T> f{c, std::vector<T>(n, T(0))};
    f = shift_fuzzy(f, a);
    const T w = b - a;
    const T u = std::numeric_limits<T>::epsilon();
    T wk(1);
    for (std::size_t k = 0; k < n; ++k) {
        f.mid[k] *= wk;
        f.rad[k] = f.rad[k] * wk * (1 + 4 * u) + abs(f.mid[k]) * u * T(static_cast<long>(k) + 2);
        wk *= w;
    }
    std::reverse(f.mid.begin(), f.mid.end());
    std::reverse(f.rad.begin(), f.rad.end());
    f = shift_fuzzy(f, T(1));
    return max_variations(f, uncertain);
}

// True when |p| on x stays within a small multiple of the rounding noise of
// evaluating p, i.e. no sign information is left to extract.
template <class T>
bool within_noise(const std::vector<T>& c, const Interval<T>& x)
{
    using std::abs;
    T r = mag(x), acc(0);
    for (std::size_t k = c.size(); k-- > 0;)
        acc = acc * r + abs(c[k]);
    T noise = acc * std::numeric_limits<T>::epsilon() * (4 * static_cast<long>(c.size()) + 4);
    // centered form: p(m + h) = sum t_j h^j
    auto t = taylor_shift_enclosure(c, x.mid());
    T h = x.rad(), hj(1), bound(0);
    for (const auto& tj : t) {
        bound += mag(tj) * hj;
        hj *= h;
    }
    return bound <= 64 * noise;
}

template <class T>
T nudge_step(const T& x, const T& width)
{
    using std::abs;
    return std::max(width, T(abs(x) * half_precision_tol<T>()));
}

// Shrink a sign-change bracket [a, b] around a simple root.
template <class T>
Interval<T> refine_simple(const std::vector<T>& c, const std::vector<T>& dc, T a, T b, int sa, const T& width)
{
    using std::abs;
    T x = (a + b) / 2;
    const int cap = 8 * precision_bits<T>() + 64;
    for (int it = 0; it < cap && b - a > width; ++it) {
        T fx = horner(c, x), dfx = horner(dc, x);
        T cand = x;
        if (dfx != 0)
            cand = x - fx / dfx;
        if (!(cand > a && cand < b))
            cand = (a + b) / 2;
        // try to close the bracket tightly around a converged Newton iterate
        if (abs(cand - x) < width / 4) {
            T h = width / 4;
            T l = std::max(a, T(cand - h)), r = std::min(b, T(cand + h));
            int sl = sign_at(c, l), sr = sign_at(c, r);
            if (l > a && r < b && sl == sa && sr == -sa)
                return {l, r};
        }
        int s = sign_at(c, cand);
        if (s == 0) {
            cand = (a + b) / 2;
            s = sign_at(c, cand);
            if (s == 0)
                break; // precision limit: the bracket is as tight as it gets
        }
        if (s == sa)
            a = cand;
        else
            b = cand;
        x = cand;
    }
    return {a, b};
}

} // namespace detail

// Enclosures of all real roots of p inside the window, each no wider than
// the requested width unless precision runs out first. Isolation by interval
// Descartes bisection; simple roots refined by Newton with sign-checked
// brackets; unresolved clusters are reported with their sign-change parity.
template <class T>
std::vector<RootEnclosure<T>> real_roots(const Polynomial<T>& p, const RootOptions<T>& opt = {})
{
    if (!p.unit_scale())
        throw domain_error("real_roots requires exponent scale 1");
    if (p.is_zero())
        throw domain_error("real_roots of the zero polynomial");
    const std::vector<T>& c = p.coeffs();
    const T width = opt.width ? *opt.width : half_precision_tol<T>();
    std::vector<RootEnclosure<T>> out;
    if (p.degree() == 0)
        return out;

    T lo, hi;
    if (opt.window) {
        lo = opt.window->lo;
        hi = opt.window->hi;
        if (!(lo < hi))
            throw domain_error("degenerate root window");
    } else {
        hi = root_bound(c);
        lo = -hi;
    }
    int slo = detail::sign_at(c, lo), shi = detail::sign_at(c, hi);
    for (int i = 0; slo == 0 && i < 64; ++i) {
        lo -= detail::nudge_step(lo, width) * T(1 << std::min(i, 20));
        slo = detail::sign_at(c, lo);
    }
    for (int i = 0; shi == 0 && i < 64; ++i) {
        hi += detail::nudge_step(hi, width) * T(1 << std::min(i, 20));
        shi = detail::sign_at(c, hi);
    }
    if (slo == 0 || shi == 0)
        throw precision_error("cannot resolve the polynomial sign at the window ends");

    const std::vector<T> dc = derivative(p).coeffs();
    struct Piece {
        T a, b;
        int sa, sb;
    };
    std::vector<Piece> found;
    std::vector<Piece> stack{{lo, hi, slo, shi}};
    while (!stack.empty()) {
        Piece pc = stack.back();
        stack.pop_back();
        bool uncertain = false;
        int v = detail::descartes_bound(c, pc.a, pc.b, uncertain);
        if (v == 0)
            continue;
        if (v == 1) {
            if (pc.sa == pc.sb)
                continue; // at most one root and no sign change: none
            Interval<T> e = detail::refine_simple(c, dc, pc.a, pc.b, pc.sa, width);
            found.push_back({e.lo, e.hi, pc.sa, pc.sb});
            if (opt.leftmost_only)
                break;
            continue;
        }
        const T w = pc.b - pc.a;
        const T mid = pc.a + w / 2;
        // Below the rounding noise of p, bisection cannot make progress:
        // the piece is reported as one cluster.
        if (w <= width || (uncertain && detail::within_noise(c, Interval<T>(pc.a, pc.b)))) {
            found.push_back(pc);
            if (opt.leftmost_only)
                break;
            continue;
        }
        T m;
        int sm = 0;
        for (int k = 0; k < 15 && sm == 0; ++k) {
            int off = (k + 1) / 2 * (k % 2 ? 1 : -1);
            m = mid + w * T(off) / 32;
            sm = detail::sign_at(c, m);
        }
        if (sm == 0)
            throw precision_error("root cluster cannot be separated at the working precision");
        stack.push_back({m, pc.b, sm, pc.sb});
        stack.push_back({pc.a, m, pc.sa, sm});
    }

    // Clusters split across adjacent pieces are merged.
    std::vector<Piece> merged;
    for (const Piece& f : found) {
        if (!merged.empty() && f.a <= merged.back().b) {
            merged.back().b = std::max(merged.back().b, f.b);
            merged.back().sb = f.sb;
        } else {
            merged.push_back(f);
        }
    }
    for (const Piece& f : merged)
        out.push_back({{f.a, f.b}, f.sa == f.sb ? Parity::even : Parity::odd});
    return out;
}

template <class T>
std::vector<RootEnclosure<T>> real_roots(const Polynomial<T>& p, const Interval<T>& window)
{
    RootOptions<T> o;
    o.window = window;
    return real_roots(p, o);
}

} // namespace qsl
