#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "real.hpp"
#include "solve.hpp"

namespace qsl {

template <class T>
struct Level {
    T energy;
    T weight;
};

// Spectral weights of a pure state against a time-independent Hamiltonian.
template <class T>
struct DiagonalState {
    std::vector<Level<T>> levels;

    void validate() const
    {
        using std::abs;
        if (levels.empty())
            throw domain_error("state has no levels");
        T sum(0);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (!(levels[i].weight > 0))
                throw domain_error("level weights must be positive");
            sum += levels[i].weight;
            for (std::size_t j = 0; j < i; ++j)
                if (levels[i].energy == levels[j].energy)
                    throw domain_error("energies must be pairwise distinct");
        }
        if (abs(sum - 1) > half_precision_tol<T>())
            throw domain_error("level weights must sum to 1");
    }

    T max_abs_energy() const
    {
        using std::abs;
        T m(0);
        for (const auto& l : levels)
            m = std::max(m, T(abs(l.energy)));
        return m;
    }

    // Largest frequency present in F = |overlap|^2.
    T spread() const
    {
        T lo = levels.front().energy, hi = lo;
        for (const auto& l : levels) {
            lo = std::min(lo, l.energy);
            hi = std::max(hi, l.energy);
        }
        return hi - lo;
    }
};

// w = 7/15 at 0 and 2/15 at each of +-1, +-11/5.
template <class T>
DiagonalState<T> paper_state()
{
    const T big = T(7) / 15, small = T(2) / 15, e = T(11) / 5;
    return {{{T(0), big}, {T(1), small}, {T(-1), small}, {e, small}, {T(-e), small}}};
}

template <class T>
struct Complex {
    T re;
    T im;
};

// sum_j w_j e^{+i eps_j tau}, the complex conjugate of <psi(0)|psi(tau)>.
// Its argument is the phase theta(tau) used throughout, chosen so that
// sqrt(F) = sum_j w_j cos(eps_j tau - theta).
template <class T>
Complex<T> phase_overlap(const DiagonalState<T>& st, const T& tau)
{
    using std::cos;
    using std::sin;
    Complex<T> z{T(0), T(0)};
    for (const auto& l : st.levels) {
        T a = l.energy * tau;
        z.re += l.weight * cos(a);
        z.im += l.weight * sin(a);
    }
    return z;
}

// <psi(0)|psi(tau)> = sum_j w_j e^{-i eps_j tau}
template <class T>
Complex<T> overlap(const DiagonalState<T>& st, const T& tau)
{
    Complex<T> z = phase_overlap(st, tau);
    return {z.re, -z.im};
}

template <class T>
T fidelity_squared(const DiagonalState<T>& st, const T& tau)
{
    Complex<T> z = phase_overlap(st, tau);
    return z.re * z.re + z.im * z.im;
}

// Root fidelity sqrt(F).
template <class T>
T fidelity(const DiagonalState<T>& st, const T& tau)
{
    using std::sqrt;
    return sqrt(fidelity_squared(st, tau));
}

// n-th derivative of F in tau.
template <class T>
T fidelity_squared_derivative(const DiagonalState<T>& st, const T& tau, int n)
{
    using std::cos;
    using std::pow;
    T s(0);
    const T shift = half_pi<T>() * n;
    for (const auto& a : st.levels)
        for (const auto& b : st.levels) {
            T d = a.energy - b.energy;
            T dn = n == 0 ? T(1) : T(pow(d, n));
            s += a.weight * b.weight * dn * cos(d * tau + shift);
        }
    return s;
}

// dF/dtau from the single sum; cheaper than the double sum above.
template <class T>
T fidelity_squared_slope(const DiagonalState<T>& st, const T& tau)
{
    using std::cos;
    using std::sin;
    T re(0), im(0), dre(0), dim(0);
    for (const auto& l : st.levels) {
        T a = l.energy * tau;
        T c = cos(a), s = sin(a);
        re += l.weight * c;
        im += l.weight * s;
        dre -= l.weight * l.energy * s;
        dim += l.weight * l.energy * c;
    }
    return 2 * (re * dre + im * dim);
}

template <class T>
T moment(const DiagonalState<T>& st, const T& r, const T& shift = T(0), bool absolute = false)
{
    using std::abs;
    using std::pow;
    if (r == 0)
        return T(1);
    const bool integral = is_integer(r);
    T m(0);
    for (const auto& l : st.levels) {
        T e = l.energy + shift;
        if (absolute)
            e = abs(e);
        else if (e < 0 && !integral)
            throw domain_error("fractional moment of a negative shifted energy");
        T v = e == 0 ? T(0) : T(pow(e, r));
        m += l.weight * v;
    }
    return m;
}

namespace detail {

template <class T>
T scan_step(const DiagonalState<T>& st)
{
    T f = std::max(st.spread(), st.max_abs_energy());
    if (f == 0)
        return T(1);
    return pi<T>() / (8 * f);
}

template <class T>
T stationary_point(const DiagonalState<T>& st, const T& a, const T& b)
{
    return bracket_solve(
        [&](const T& t) { return fidelity_squared_slope(st, t); },
        [&](const T& t) { return fidelity_squared_derivative(st, t, 2); }, a, b);
}

} // namespace detail

// Stationary points of sqrt(F) strictly inside (lo, hi), ascending.
template <class T>
std::vector<T> stationary_points(const DiagonalState<T>& st, const T& lo, const T& hi)
{
    std::vector<T> out;
    if (st.spread() == 0)
        return out;
    const T h = detail::scan_step(st);
    T a = lo;
    T ga = fidelity_squared_slope(st, a);
    while (a < hi) {
        T b = std::min(T(a + h), hi);
        T gb = fidelity_squared_slope(st, b);
        if (gb == 0) {
            if (b < hi)
                out.push_back(b);
        } else if (ga != 0 && (ga > 0) != (gb > 0)) {
            out.push_back(detail::stationary_point(st, a, b));
        }
        a = b;
        ga = gb;
    }
    return out;
}

template <class T>
struct Extremum {
    T tau;
    T value; // sqrt(F)
};

// Local minima of sqrt(F) on (lo, hi).
template <class T>
std::vector<Extremum<T>> local_minima(const DiagonalState<T>& st, const T& lo, const T& hi)
{
    std::vector<Extremum<T>> out;
    for (const T& t : stationary_points(st, lo, hi))
        if (fidelity_squared_derivative(st, t, 2) > 0 || fidelity(st, t) <= half_precision_tol<T>())
            out.push_back({t, fidelity(st, t)});
    return out;
}

// Smallest tau in (0, horizon] with sqrt(F(tau)) = target, touching included.
template <class T>
std::optional<T> first_passage(const DiagonalState<T>& st, const T& target, const T& horizon)
{
    using std::abs;
    using std::sqrt;
    if (!(horizon > 0))
        throw domain_error("horizon must be positive");
    if (target < 0 || target > 1)
        throw domain_error("target root fidelity outside [0, 1]");
    if (target == 1)
        return T(0);
    if (st.spread() == 0)
        return std::nullopt;
    const T tol = half_precision_tol<T>();
    const T t2 = target * target;
    auto G = [&](const T& t) { return fidelity_squared(st, t) - t2; };
    auto dG = [&](const T& t) { return fidelity_squared_slope(st, t); };

    // Monotone piece [u, v] of F: crossing of the target inside?
    auto crossing = [&](const T& u, const T& v) -> std::optional<T> {
        T gu = G(u), gv = G(v);
        if (gu > 0 && gv <= 0)
            return bracket_solve(G, dG, u, v);
        return std::nullopt;
    };
    auto touches = [&](const T& t) { return abs(fidelity(st, t) - target) <= tol; };

    const T h = detail::scan_step(st);
    T a(0);
    T ga = dG(a);
    while (a < horizon) {
        T b = std::min(T(a + h), horizon);
        T gb = dG(b);
        std::optional<T> star;
        if (ga != 0 && gb != 0 && (ga > 0) != (gb > 0))
            star = detail::stationary_point(st, a, b);
        if (star) {
            if (auto r = crossing(a, *star))
                return r;
            if (touches(*star))
                return star;
            if (auto r = crossing(*star, b))
                return r;
        } else if (auto r = crossing(a, b)) {
            return r;
        }
        if (gb == 0 && touches(b))
            return b;
        a = b;
        ga = gb;
    }
    return std::nullopt;
}

template <class T>
struct CriticalTimes {
    T tau_c1;       // first zero of sqrt(F)
    T tau_c2;       // deepest local minimum of sqrt(F) before tau_c1
    T sqrt_f_c2;
};

template <class T>
CriticalTimes<T> critical_times(const DiagonalState<T>& st, const T& horizon = T(100))
{
    auto c1 = first_passage(st, T(0), horizon);
    if (!c1)
        throw convergence_error("root fidelity never vanishes within the horizon");
    const T guard = pow2<T>(-precision_bits<T>() / 4) * (1 + *c1);
    auto mins = local_minima(st, T(0), T(*c1 - guard));
    std::optional<Extremum<T>> best;
    for (const auto& m : mins)
        if (!best || m.value < best->value)
            best = m;
    if (!best)
        throw convergence_error("no local minimum of root fidelity before its first zero");
    return {*c1, best->tau, best->value};
}

// Unwrapped phase theta(tau) with theta(0) = 0.
template <class T>
struct PhaseCurve {
    std::vector<T> tau;
    std::vector<T> theta;
    T horizon; // first zero of sqrt(F), or the search limit if none is met
};

namespace detail {

template <class T>
T wrapped_atan2(const Complex<T>& z)
{
    using std::atan2;
    return atan2(z.im, z.re);
}

// Phase at b given the unwrapped phase at a. The step is accepted only if
// the phase cannot have moved by pi or more: |theta'| <= L / sqrt(F) and
// sqrt(F) is L-Lipschitz, with L the largest |energy|.
template <class T>
bool unwrap_step(const DiagonalState<T>& st, const T& a, const T& fa, const T& theta_a, const T& b, T& theta_b,
                 T& fb)
{
    using std::abs;
    using std::floor;
    using std::sqrt;
    const T L = st.max_abs_energy();
    Complex<T> z = phase_overlap(st, b);
    fb = sqrt(z.re * z.re + z.im * z.im);
    const T h = abs(b - a);
    T floor_f = std::min(fa, fb) - L * h / 2;
    if (L * h > 0 && (floor_f <= 0 || L * h / floor_f >= pi<T>()))
        return false;
    T raw = wrapped_atan2(z);
    T k = floor((theta_a - raw) / two_pi<T>() + T(0.5));
    theta_b = raw + k * two_pi<T>();
    return true;
}

} // namespace detail

template <class T>
PhaseCurve<T> phase_theta(const DiagonalState<T>& st, const std::vector<T>& grid);

namespace detail {

// Carries the unwrapped phase from a to b, halving steps that unwrap_step
// cannot accept.
template <class T>
void advance_theta(const DiagonalState<T>& st, T a, T fa, T th, const T& b, T& theta_b, T& fb)
{
    T h = std::min(scan_step(st), T(b - a));
    const T hmin = pow2<T>(-precision_bits<T>() / 2);
    fb = fa;
    while (a < b) {
        T next = std::min(T(a + h), b);
        T thn, fn;
        if (unwrap_step(st, a, fa, th, next, thn, fn)) {
            a = next;
            th = thn;
            fa = fn;
            h = std::min(T(h * 2), scan_step(st));
        } else {
            h /= 2;
            if (h < hmin)
                throw domain_error("phase undefined: root fidelity vanishes before the requested time");
        }
    }
    theta_b = th;
    fb = fa;
}

} // namespace detail

// theta at a single time, unwrapped along an adaptive internal grid.
template <class T>
T theta_at(const DiagonalState<T>& st, const T& tau)
{
    if (tau < 0)
        throw domain_error("negative time");
    T th, f;
    detail::advance_theta(st, T(0), T(1), T(0), tau, th, f);
    return th;
}

template <class T>
PhaseCurve<T> phase_theta(const DiagonalState<T>& st, const std::vector<T>& grid)
{
    PhaseCurve<T> pc;
    if (grid.empty())
        return pc;
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 0)
        throw domain_error("phase grid must be ascending and nonnegative");
    pc.tau = grid;
    pc.theta.resize(grid.size());
    pc.theta[0] = theta_at(st, grid[0]);
    T fa = fidelity(st, grid[0]);
    if (fa <= half_precision_tol<T>())
        throw domain_error("phase undefined: grid meets a zero of root fidelity");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        T fb;
        if (!detail::unwrap_step(st, grid[i - 1], fa, pc.theta[i - 1], grid[i], pc.theta[i], fb)) {
            if (fb <= half_precision_tol<T>())
                throw domain_error("phase undefined: grid meets a zero of root fidelity");
            detail::advance_theta(st, grid[i - 1], fa, pc.theta[i - 1], grid[i], pc.theta[i], fb);
        }
        fa = fb;
    }
    const T reach = std::max(T(4 * grid.back()), T(100));
    auto z = first_passage(st, T(0), reach);
    pc.horizon = z ? *z : reach;
    return pc;
}

// One-sided limit of theta as tau increases to a zero tau0 of the overlap:
// the overlap behaves like c (tau - tau0)^k with c its first nonvanishing
// derivative, so the limit phase is arg(c) + k*pi, taken on the branch that
// continues theta from the left.
template <class T>
T theta_left_limit(const DiagonalState<T>& st, const T& tau0)
{
    using std::abs;
    using std::atan2;
    using std::cos;
    using std::floor;
    using std::pow;
    using std::sin;
    using std::sqrt;
    const T thresh = pow2<T>(-precision_bits<T>() / 3);
    int k = 0;
    Complex<T> c{T(0), T(0)};
    for (k = 0; k < 64; ++k) {
        // d^k/dtau^k sum w e^{i eps tau} = sum w (i eps)^k e^{i eps tau}
        c = {T(0), T(0)};
        for (const auto& l : st.levels) {
            T mag = k == 0 ? T(1) : T(pow(l.energy, k));
            T ang = l.energy * tau0 + half_pi<T>() * k;
            c.re += l.weight * mag * cos(ang);
            c.im += l.weight * mag * sin(ang);
        }
        T scale = pow(std::max(T(1), st.max_abs_energy()), k);
        if (sqrt(c.re * c.re + c.im * c.im) > thresh * scale)
            break;
    }
    T lim = atan2(c.im, c.re) + pi<T>() * k;
    // approach from the left until the leading term dominates
    T eta = std::min(T(tau0 / 2), T(pow2<T>(-20)));
    T before = theta_at(st, T(tau0 - eta));
    T n = floor((before - lim) / two_pi<T>() + T(0.5));
    return lim + n * two_pi<T>();
}

template <class T>
struct TurningReport {
    T tau_min;
    T tau_turn;
    T epsilon0;
    T tau_turn_prime;
    int beta;
    T zeta;
    T delta;
};

template <class T>
TurningReport<T> turning_analysis(const DiagonalState<T>& st, const T& target, const T& horizon = T(1000))
{
    using std::abs;
    using std::cos;
    using std::pow;
    using std::sin;
    using std::sqrt;
    auto tm = first_passage(st, target, horizon);
    if (!tm)
        throw domain_error("target root fidelity is never reached within the horizon");
    TurningReport<T> r;
    r.tau_min = *tm;
    const T guard = pow2<T>(-precision_bits<T>() / 4) * (1 + r.tau_min);
    auto stat = stationary_points(st, T(0), T(r.tau_min - guard));
    if (stat.empty()) {
        r.tau_turn = 0;
        r.epsilon0 = 1;
        r.tau_turn_prime = 0;
    } else {
        r.tau_turn = stat.back();
        T m = std::min(T(1), fidelity(st, r.tau_turn));
        for (const auto& e : local_minima(st, T(0), r.tau_turn))
            m = std::min(m, e.value);
        r.epsilon0 = m - target;
        if (!(r.epsilon0 > 0))
            throw convergence_error("turning analysis: the target is reached before the last turning point");
        const T lvl = target + r.epsilon0;
        auto g = [&](const T& t) { return fidelity(st, t) - lvl; };
        auto dg = [&](const T& t) {
            T f = fidelity(st, t);
            return fidelity_squared_slope(st, t) / (2 * f);
        };
        r.tau_turn_prime = g(r.tau_turn) <= 0 ? r.tau_turn : bracket_solve(g, dg, r.tau_turn, r.tau_min);
    }

    // order of the first nonvanishing derivative at tau_min
    const T thresh = pow2<T>(-precision_bits<T>() / 3);
    const T L = std::max(T(1), st.spread());
    r.beta = 0;
    if (target == 0) {
        for (int k = 1; k < 64 && r.beta == 0; ++k) {
            T re(0), im(0);
            for (const auto& l : st.levels) {
                T mag = pow(l.energy, k);
                T ang = l.energy * r.tau_min + half_pi<T>() * k;
                re += l.weight * mag * cos(ang);
                im += l.weight * mag * sin(ang);
            }
            if (sqrt(re * re + im * im) > thresh * pow(std::max(T(1), st.max_abs_energy()), k))
                r.beta = k;
        }
    } else {
        for (int k = 1; k < 64 && r.beta == 0; ++k)
            if (abs(fidelity_squared_derivative(st, r.tau_min, k)) > thresh * pow(L, k))
                r.beta = k;
    }
    if (r.beta == 0)
        throw convergence_error("turning analysis: no nonvanishing derivative at tau_min");

    r.delta = (r.tau_min - r.tau_turn) / 2;
    const int samples = 200;
    for (int attempt = 0; attempt < 30; ++attempt) {
        T z(-1);
        for (int i = 1; i <= samples; ++i) {
            T d = r.delta * i / samples;
            T q = (fidelity(st, T(r.tau_min - d)) - target) / pow(d, r.beta);
            if (z < 0 || q < z)
                z = q;
        }
        if (z > 0) {
            r.zeta = z;
            return r;
        }
        r.delta /= 2;
    }
    throw convergence_error("turning analysis: decay envelope could not be fitted");
}

} // namespace qsl
