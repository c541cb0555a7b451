#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "build.hpp"
#include "evolution.hpp"
#include "roots.hpp"
#include "solve.hpp"

namespace qsl {

// M_{s k} for k = 0..n, possibly about a shifted reference energy.
template <class T>
struct MomentVector {
    T s{1};
    std::vector<T> values;
    bool absolute = false;
    T shift{0};

    void validate() const
    {
        using std::abs;
        if (!(s > 0))
            throw domain_error("moment scale must be positive");
        if (values.empty() || abs(values[0] - 1) > half_precision_tol<T>())
            throw domain_error("moment vector must start with M_0 = 1");
        if (absolute)
            for (const T& v : values)
                if (v < 0)
                    throw domain_error("absolute moments must be nonnegative");
    }
};

template <class T>
MomentVector<T> moments_of(const DiagonalState<T>& st, const T& s, int n, const T& shift = T(0), bool absolute = true)
{
    MomentVector<T> m;
    m.s = s;
    m.absolute = absolute;
    m.shift = shift;
    for (int k = 0; k <= n; ++k)
        m.values.push_back(moment(st, T(s * k), shift, absolute));
    return m;
}

// M_{2k} = 4 (1 + (11/5)^(2k)) / 15 and vanishing odd moments.
template <class T>
MomentVector<T> paper_moments(int n)
{
    MomentVector<T> m;
    m.absolute = false;
    const T e = T(11) / 5;
    for (int k = 0; k <= n; ++k)
        m.values.push_back(k == 0 ? T(1) : k % 2 ? T(0) : T(4 * (1 + T(pow(e, k))) / 15));
    return m;
}

template <class T>
struct TimeInterval {
    T lo{0};
    T hi{0};                   // +inf for the unbounded tail
    T lo_width{0};             // width of the root enclosure behind each endpoint
    T hi_width{0};
    bool degenerate = false;   // a tangency: the bound touches the target without crossing
};

template <class T>
struct IntervalSet {
    std::vector<TimeInterval<T>> intervals;

    bool empty() const { return intervals.empty(); }

    bool contains(const T& t, const T& slack = T(0)) const
    {
        for (const auto& i : intervals)
            if (t >= i.lo - i.lo_width - slack && t <= i.hi + i.hi_width + slack)
                return true;
        return false;
    }

    std::optional<T> infimum() const
    {
        if (intervals.empty())
            return std::nullopt;
        return intervals.front().lo;
    }
};

template <class T>
IntervalSet<T> intersect(const IntervalSet<T>& a, const IntervalSet<T>& b)
{
    IntervalSet<T> out;
    std::size_t i = 0, j = 0;
    while (i < a.intervals.size() && j < b.intervals.size()) {
        const auto& x = a.intervals[i];
        const auto& y = b.intervals[j];
        TimeInterval<T> r;
        r.lo = std::max(x.lo, y.lo);
        r.lo_width = x.lo >= y.lo ? x.lo_width : y.lo_width;
        r.hi = std::min(x.hi, y.hi);
        r.hi_width = x.hi <= y.hi ? x.hi_width : y.hi_width;
        if (r.lo <= r.hi) {
            r.degenerate = (x.degenerate || y.degenerate) && r.lo == r.hi;
            out.intervals.push_back(r);
        }
        if (x.hi < y.hi)
            ++i;
        else
            ++j;
    }
    return out;
}

// Right-hand side sum_k c_k M_{s k} tau^{s k} of the moment inequality.
template <class T>
T bound_rhs(const Polynomial<T>& p, const MomentVector<T>& m, const T& tau)
{
    using std::pow;
    if (p.scale() != m.s)
        throw domain_error("polynomial and moment scales differ");
    if (m.values.size() < p.size())
        throw domain_error("not enough moments for the polynomial degree");
    if (tau < 0)
        throw domain_error("negative time");
    T sum(0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0)
            continue;
        const T e = m.s * T(static_cast<long>(k));
        sum += p[k] * m.values[k] * (e == 0 ? T(1) : T(pow(tau, e)));
    }
    return sum;
}

// The bound as a polynomial in y = tau^s.
template <class T>
Polynomial<T> bound_polynomial(const Polynomial<T>& p, const MomentVector<T>& m)
{
    if (p.scale() != m.s)
        throw domain_error("polynomial and moment scales differ");
    if (m.values.size() < p.size())
        throw domain_error("not enough moments for the polynomial degree");
    std::vector<T> c(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        c[k] = p[k] * m.values[k];
    return Polynomial<T>(std::move(c));
}

// B as a polynomial in z = tau^(s g), g the gcd of the exponents present, with
// its critical points located once for repeated target queries.
template <class T>
class BoundCurve {
public:
    BoundCurve(const Polynomial<T>& p, const MomentVector<T>& m)
    {
        m.validate();
        const Polynomial<T> Y = bound_polynomial(p, m);
        int g = 0;
        for (std::size_t k = 1; k < Y.size(); ++k)
            if (Y[k] != 0)
                g = std::gcd(g, static_cast<int>(k));
        g = std::max(g, 1);
        std::vector<T> c;
        for (std::size_t k = 0; k < Y.size(); k += g)
            c.push_back(Y[k]);
        z_ = Polynomial<T>(std::move(c));
        power_ = m.s * g;
        const Polynomial<T> dz = derivative(z_);
        if (z_.degree() > 1) {
            RootOptions<T> ro;
            const T B = root_bound(dz.coeffs()) + 1;
            ro.window = Interval<T>(T(-pow2<T>(-precision_bits<T>() / 2)), B);
            ro.width = pow2<T>(-precision_bits<T>() / 3) * B;
            for (const auto& r : real_roots(dz, ro))
                if (r.x.hi >= 0)
                    critical_.push_back(r.x);
        }
    }

    const Polynomial<T>& in_z() const { return z_; }
    T power() const { return power_; }

    T tau_of(const T& z) const
    {
        using std::pow;
        return z <= 0 ? T(0) : power_ == 1 ? z : T(pow(z, 1 / power_));
    }

    T operator()(const T& tau) const
    {
        using std::pow;
        return z_(power_ == 1 ? tau : T(pow(tau, power_)));
    }

    // Times tau in [0, horizon] with target >= B(tau), plus the unbounded
    // tail when B falls below the target for good.
    IntervalSet<T> permissible(const T& target, const T& horizon, bool leftmost_only = false) const
    {
        using std::abs;
        if (target < 0 || target > 1)
            throw domain_error("target root fidelity outside [0, 1]");
        if (!(horizon > 0))
            throw domain_error("horizon must be positive");
        const Polynomial<T> Q = z_ - target;
        IntervalSet<T> out;
        const T inf = std::numeric_limits<T>::infinity();
        if (Q.degree() == 0 || Q.is_zero()) {
            if (Q[0] <= 0)
                out.intervals.push_back({T(0), inf, T(0), T(0), false});
            return out;
        }
        const T B = root_bound(Q.coeffs()) + 1;
        const T tol = half_precision_tol<T>() * B;

        struct Mark {
            Interval<T> z;
        };
        std::vector<Mark> marks;
        RootOptions<T> ro;
        ro.window = Interval<T>(T(-tol), B);
        ro.width = pow2<T>(-precision_bits<T>() / 2) * B;
        ro.leftmost_only = leftmost_only;
        for (const auto& r : real_roots(Q, ro))
            if (r.x.hi >= 0)
                marks.push_back({r.x});
        // minima within rounding of the target: a tangency the root finder may miss
        const T near = pow2<T>(-precision_bits<T>() / 2) * 16;
        for (const auto& c : critical_) {
            if (leftmost_only && !marks.empty() && c.lo > marks.front().z.hi)
                break;
            const T v = Q(c.mid());
            if (v > 0 && v <= near) {
                bool known = false;
                for (const auto& mk : marks)
                    known = known || overlaps(mk.z, Interval<T>(T(c.lo - tol), T(c.hi + tol)));
                if (!known)
                    marks.push_back({c});
            }
        }
        std::sort(marks.begin(), marks.end(), [](const Mark& a, const Mark& b) { return a.z.lo < b.z.lo; });

        auto sign_at = [&](const T& z) { return horner(Q.coeffs(), Interval<T>(z)).sign(); };
        auto width = [&](const Interval<T>& z) { return tau_of(z.hi) - tau_of(std::max(T(0), z.lo)); };
        std::optional<TimeInterval<T>> open;
        if (marks.empty() || marks[0].z.lo > 0) {
            const T probe = marks.empty() ? T(1) : T(marks[0].z.lo / 2);
            if (sign_at(probe) < 0)
                open = TimeInterval<T>{T(0), T(0), T(0), T(0), false};
        }
        for (std::size_t i = 0; i < marks.size(); ++i) {
            const auto& mk = marks[i];
            const T next = i + 1 < marks.size() ? marks[i + 1].z.lo : T(2 * mk.z.hi + 1);
            const int after = sign_at((mk.z.hi + std::max(next, mk.z.hi)) / 2);
            const T t = mk.z.lo <= 0 && Q[0] == 0 ? T(0) : tau_of(mk.z.mid()), w = width(mk.z);
            if (open) {
                if (after > 0) {
                    open->hi = t;
                    open->hi_width = w;
                    out.intervals.push_back(*open);
                    open.reset();
                }
            } else if (after < 0) {
                open = TimeInterval<T>{t, T(0), w, T(0), false};
            } else {
                // touches the target without crossing it
                out.intervals.push_back({t, t, w, w, true});
            }
            if (leftmost_only && !out.intervals.empty())
                break;
        }
        if (open) {
            open->hi = inf;
            out.intervals.push_back(*open);
        }

        IntervalSet<T> clipped;
        for (auto iv : out.intervals) {
            if (iv.lo > horizon)
                continue;
            if (iv.hi != inf && iv.hi > horizon) {
                iv.hi = horizon;
                iv.hi_width = 0;
            }
            clipped.intervals.push_back(iv);
        }
        return clipped;
    }

    // Earliest permissible time, +inf if none within the horizon.
    T tau_min(const T& target, const T& horizon) const
    {
        auto set = permissible(target, horizon, true);
        return set.empty() ? std::numeric_limits<T>::infinity() : *set.infimum();
    }

private:
    Polynomial<T> z_;
    T power_{1};
    std::vector<Interval<T>> critical_;
};

template <class T>
IntervalSet<T> permissible_times(const Polynomial<T>& p, const MomentVector<T>& m, const T& target,
                                 const T& horizon = T(1000))
{
    return BoundCurve<T>(p, m).permissible(target, horizon);
}

// Intersection of the permissible sets over reference-energy shifts, with the
// shifted absolute moments taken from the state itself.
template <class T>
IntervalSet<T> tighten_by_shift(const DiagonalState<T>& st, const Polynomial<T>& p, const T& target,
                                const std::vector<T>& shifts, const T& horizon = T(1000))
{
    if (shifts.empty())
        throw domain_error("no reference-energy shifts given");
    const int n = p.degree();
    std::optional<IntervalSet<T>> acc;
    for (const T& a : shifts) {
        auto set = permissible_times(p, moments_of(st, p.scale(), n, a, true), target, horizon);
        acc = acc ? intersect(*acc, set) : set;
    }
    return *acc;
}

// Shift tightening from signed integer moments alone: <(E + a)^k> by the
// binomial theorem. Sound only when every shifted energy is nonnegative,
// which the caller attests with the spectrum lower bound e_min.
template <class T>
MomentVector<T> shift_moments(const MomentVector<T>& m, const T& a, const T& e_min)
{
    using std::pow;
    if (m.absolute || m.s != 1)
        throw domain_error("binomial shifting needs signed moments of integer order");
    if (e_min + a < 0)
        throw domain_error("shifted energies would be negative");
    MomentVector<T> out = m;
    out.shift = m.shift + a;
    for (std::size_t k = 0; k < m.values.size(); ++k) {
        T sum(0), binom(1);
        for (std::size_t l = 0; l <= k; ++l) {
            sum += binom * m.values[l] * (k == l ? T(1) : T(pow(a, static_cast<long>(k - l))));
            binom = binom * T(static_cast<long>(k - l)) / T(static_cast<long>(l + 1));
        }
        out.values[k] = sum;
    }
    return out;
}

template <class T>
struct TauMinJump {
    T sqrt_f;     // critical root fidelity, enclosed to 1e-6
    T tau_before; // tau_min just below it
    T tau_after;  // tau_min just above it
};

template <class T>
struct TauMinCurve {
    std::vector<T> sqrt_f;
    std::vector<T> tau_min; // +inf where no time is permissible within the horizon
    std::vector<TauMinJump<T>> jumps;
};

template <class T>
std::vector<T> default_fidelity_grid(int n = 400)
{
    std::vector<T> g;
    for (int i = 0; i < n; ++i)
        g.push_back(T(i) / (n - 1));
    return g;
}

template <class T>
TauMinCurve<T> tau_min_scan(const Polynomial<T>& p, const MomentVector<T>& m, const std::vector<T>& grid,
                            const T& horizon = T(1000), const T& threshold = T(1))
{
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw domain_error("fidelity grid must be ascending");
    const BoundCurve<T> curve(p, m);
    TauMinCurve<T> out;
    out.sqrt_f = grid;
    for (const T& f : grid)
        out.tau_min.push_back(curve.tau_min(f, horizon));
    const T enclosure(1e-6);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(out.tau_min[i - 1] - out.tau_min[i] > threshold))
            continue;
        T lo = grid[i - 1], hi = grid[i];
        T tlo = out.tau_min[i - 1], thi = out.tau_min[i];
        while (hi - lo > enclosure) {
            const T mid = (lo + hi) / 2;
            const T t = curve.tau_min(mid, horizon);
            if (tlo - t > threshold) {
                hi = mid;
                thi = t;
            } else {
                lo = mid;
                tlo = t;
            }
        }
        out.jumps.push_back({(lo + hi) / 2, tlo, thi});
    }
    return out;
}

enum class ClassicKind { mandelstam_tamm, margolus_levitin, chau, generalized };

inline const char* to_string(ClassicKind k)
{
    switch (k) {
    case ClassicKind::mandelstam_tamm: return "mandelstam_tamm";
    case ClassicKind::margolus_levitin: return "margolus_levitin";
    case ClassicKind::chau: return "chau";
    default: return "generalized";
    }
}

inline ClassicKind parse_classic_kind(const std::string& s)
{
    if (s == "mandelstam_tamm" || s == "mt")
        return ClassicKind::mandelstam_tamm;
    if (s == "margolus_levitin" || s == "ml")
        return ClassicKind::margolus_levitin;
    if (s == "chau")
        return ClassicKind::chau;
    if (s == "generalized")
        return ClassicKind::generalized;
    throw domain_error("unknown classic bound kind: " + s);
}

template <class T>
struct ClassicBound {
    T tau;                    // minimal evolution time
    T theta{0};               // phase of the tangent minorant used (not for MT)
    T a{0};                   // its slope constant
    std::optional<MinorantCertificate<T>> certificate;
};

// (cos(theta) - target) / a(theta), the tangent-family bound on stat * tau^b.
template <class T>
T tangent_objective(const T& b, const T& theta, const T& target)
{
    auto t = tangent_family(b, theta, false);
    return (cos(theta) - target) / t.a;
}

// Minimal time from the closed form (MT) or from the tangent minorants
// cos(theta) - a x^b: stat * tau^b >= (cos(theta) - target) / a, optimized over
// theta for ML and the generalized family and taken at theta = 0 for Chau.
// stat is Delta E, <E> above the ground state, <|E - a|>, or <E^b>.
template <class T>
ClassicBound<T> classic_bound(ClassicKind kind, const T& stat, const T& target, const T& b = T(1))
{
    using std::acos;
    using std::cos;
    using std::pow;
    if (!(stat > 0))
        throw domain_error("the energy statistic must be positive");
    if (target < 0 || target > 1)
        throw domain_error("target root fidelity outside [0, 1]");
    ClassicBound<T> out;
    if (kind == ClassicKind::mandelstam_tamm) {
        out.tau = acos(target) / stat;
        return out;
    }
    const T e = kind == ClassicKind::generalized ? b : T(1);
    if (!(e > 0))
        throw domain_error("generalized bound exponent must be positive");
    T theta(0);
    if (kind != ClassicKind::chau) {
        // theta >= 0 keeps a finite for b > 1; b <= 1 allows either sign
        const T edge = half_pi<T>() - pow2<T>(-10);
        const T lo = e > 1 ? T(e > 2 ? pow2<T>(-10) : T(0)) : T(-edge);
        auto f = [&](const T& th) { return tangent_objective(e, th, target); };
        theta = golden_max(f, lo, edge, 2 * precision_bits<T>() / 3);
    }
    auto t = tangent_family(e, theta, true);
    if (!t.certificate.verified)
        throw precision_error("tangent minorant failed certification: " + t.certificate.note);
    out.theta = theta;
    out.a = t.a;
    out.certificate = t.certificate;
    const T rhs = (cos(theta) - target) / (t.a * stat);
    out.tau = rhs <= 0 ? T(0) : e == 1 ? rhs : T(pow(rhs, 1 / e));
    return out;
}

template <class T>
struct EqualityReport {
    bool holds = false;
    T phase_residual{0};          // |Im(e^{-i theta} z)|, with Re >= 0 required
    T phase_real{0};
    std::vector<T> level_residuals; // cos(eps_j tau - theta) - p(eps_j tau)
    T tolerance{0};
};

// The two conditions under which sqrt(F) = sum_j w_j p(eps_j tau).
template <class T>
EqualityReport<T> equality_conditions(const DiagonalState<T>& st, const Polynomial<T>& p, const T& theta, const T& tau)
{
    using std::abs;
    using std::cos;
    using std::sin;
    st.validate();
    EqualityReport<T> r;
    r.tolerance = pow2<T>(-precision_bits<T>() / 3);
    const Complex<T> z = phase_overlap(st, tau);
    r.phase_real = cos(theta) * z.re + sin(theta) * z.im;
    r.phase_residual = abs(cos(theta) * z.im - sin(theta) * z.re);
    bool ok = r.phase_residual <= r.tolerance && r.phase_real >= -r.tolerance;
    for (const auto& l : st.levels) {
        const T x = l.energy * tau;
        if (x < 0 && !p.integer_scale())
            throw domain_error("fractional exponent scale at a negative argument");
        const T d = cos(x - theta) - eval(p, x);
        r.level_residuals.push_back(d);
        ok = ok && abs(d) <= r.tolerance * std::max(T(1), T(abs(x)));
    }
    r.holds = ok;
    return r;
}

} // namespace qsl
