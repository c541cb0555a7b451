#pragma once

#include <algorithm>
#include <limits>
#include <ostream>

#include "real.hpp"

namespace qsl {

// Closed interval [lo, hi]. Every operation pads its result outward by one
// ulp-sized step, so the result encloses the exact image regardless of how
// the endpoints were rounded.
template <class T>
struct Interval {
    T lo{0};
    T hi{0};

    Interval() = default;
    Interval(const T& x) : lo(x), hi(x) {} // NOLINT: points convert implicitly
    Interval(const T& l, const T& h) : lo(l), hi(h) {}

    T mid() const { return (lo + hi) / 2; }
    T width() const { return hi - lo; }
    T rad() const { return (hi - lo) / 2; }
    bool contains(const T& x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0 && hi >= 0; }
    bool positive() const { return lo > 0; }
    bool negative() const { return hi < 0; }
    bool certain_sign() const { return lo > 0 || hi < 0; }
    int sign() const { return lo > 0 ? 1 : (hi < 0 ? -1 : 0); }
};

namespace detail {

template <class T>
const T& ulp_floor()
{
    static const T v = std::numeric_limits<T>::min() * 4;
    return v;
}

template <class T>
T down(const T& x, int steps = 1)
{
    using std::abs;
    return x - (abs(x) * std::numeric_limits<T>::epsilon() + ulp_floor<T>()) * steps;
}

template <class T>
T up(const T& x, int steps = 1)
{
    using std::abs;
    return x + (abs(x) * std::numeric_limits<T>::epsilon() + ulp_floor<T>()) * steps;
}

template <class T>
Interval<T> padded(const T& lo, const T& hi, int steps = 1)
{
    return {down(lo, steps), up(hi, steps)};
}

} // namespace detail

template <class T>
T mag(const Interval<T>& x)
{
    using std::abs;
    return std::max(abs(x.lo), abs(x.hi));
}

// Smallest absolute value attained.
template <class T>
T mig(const Interval<T>& x)
{
    using std::abs;
    if (x.contains_zero())
        return T(0);
    return std::min(abs(x.lo), abs(x.hi));
}

template <class T>
Interval<T> hull(const Interval<T>& a, const Interval<T>& b)
{
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

template <class T>
bool overlaps(const Interval<T>& a, const Interval<T>& b)
{
    return a.lo <= b.hi && b.lo <= a.hi;
}

template <class T>
Interval<T> operator-(const Interval<T>& a)
{
    return {-a.hi, -a.lo};
}

template <class T>
Interval<T> operator+(const Interval<T>& a, const Interval<T>& b)
{
    return detail::padded(a.lo + b.lo, a.hi + b.hi);
}

template <class T>
Interval<T> operator-(const Interval<T>& a, const Interval<T>& b)
{
    return detail::padded(a.lo - b.hi, a.hi - b.lo);
}

template <class T>
Interval<T> operator*(const Interval<T>& a, const Interval<T>& b)
{
    if (a.lo >= 0 && b.lo >= 0)
        return detail::padded(a.lo * b.lo, a.hi * b.hi);
    T p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return detail::padded(std::min(std::min(p1, p2), std::min(p3, p4)),
                          std::max(std::max(p1, p2), std::max(p3, p4)));
}

template <class T>
Interval<T> operator*(const Interval<T>& a, const T& c)
{
    if (c >= 0)
        return detail::padded(a.lo * c, a.hi * c);
    return detail::padded(a.hi * c, a.lo * c);
}

template <class T>
Interval<T> operator*(const T& c, const Interval<T>& a)
{
    return a * c;
}

template <class T>
Interval<T> operator/(const Interval<T>& a, const Interval<T>& b)
{
    if (b.contains_zero())
        throw domain_error("interval division by an interval containing zero");
    T q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
    return detail::padded(std::min(std::min(q1, q2), std::min(q3, q4)),
                          std::max(std::max(q1, q2), std::max(q3, q4)));
}

template <class T>
Interval<T>& operator+=(Interval<T>& a, const Interval<T>& b)
{
    return a = a + b;
}

template <class T>
Interval<T>& operator-=(Interval<T>& a, const Interval<T>& b)
{
    return a = a - b;
}

template <class T>
Interval<T>& operator*=(Interval<T>& a, const Interval<T>& b)
{
    return a = a * b;
}

template <class T>
Interval<T> sqr(const Interval<T>& a)
{
    T l = mig(a), h = mag(a);
    return {l == 0 ? T(0) : detail::down(l * l), detail::up(h * h)};
}

template <class T>
Interval<T> pow(const Interval<T>& a, unsigned n)
{
    using std::pow;
    if (n == 0)
        return T(1);
    if (n % 2 == 0) {
        T l = mig(a);
        return {l == 0 ? T(0) : detail::down(T(pow(l, n)), 2), detail::up(T(pow(mag(a), n)), 2)};
    }
    return detail::padded(T(pow(a.lo, n)), T(pow(a.hi, n)), 2);
}

// x^e for x >= 0 and real e; monotone on the nonnegative axis.
template <class T>
Interval<T> pow_real(const Interval<T>& a, const T& e)
{
    using std::pow;
    if (a.lo < 0)
        throw domain_error("fractional power of an interval reaching below zero");
    if (e == 0)
        return T(1);
    T l = a.lo == 0 ? T(0) : T(pow(a.lo, e));
    T h = a.hi == 0 ? T(0) : T(pow(a.hi, e));
    if (e < 0)
        std::swap(l, h);
    if (e < 0 && a.lo == 0)
        h = std::numeric_limits<T>::infinity();
    return {l == 0 ? T(0) : detail::down(l, 2), detail::up(h, 2)};
}

namespace detail {

// Enclosure of cos on [lo, hi] given the offset to the phase where cos peaks:
// extrema sit at lo' = k*pi for integer k after subtracting `peak`.
template <class T>
Interval<T> trig_range(const Interval<T>& x, const T& a, const T& b, const T& peak)
{
    using std::ceil;
    using std::floor;
    using std::abs;
    const T p = pi<T>();
    if (x.width() >= 2 * p)
        return {T(-1), T(1)};
    T lo = std::min(a, b), hi = std::max(a, b);
    lo = down(lo, 2);
    hi = up(hi, 2);
    T slack = (abs(x.lo) + abs(x.hi) + 8) * std::numeric_limits<T>::epsilon() * 4;
    T klo = ceil((x.lo - peak - slack) / p);
    T khi = floor((x.hi - peak + slack) / p);
    for (T k = klo; k <= khi; k += 1) {
        T half = k / 2;
        if (floor(half) == half)
            hi = T(1);
        else
            lo = T(-1);
    }
    return {std::max(lo, T(-1)), std::min(hi, T(1))};
}

} // namespace detail

template <class T>
Interval<T> cos(const Interval<T>& x)
{
    using std::cos;
    return detail::trig_range(x, T(cos(x.lo)), T(cos(x.hi)), T(0));
}

template <class T>
Interval<T> sin(const Interval<T>& x)
{
    using std::sin;
    return detail::trig_range(x, T(sin(x.lo)), T(sin(x.hi)), half_pi<T>());
}

template <class T>
Interval<T> intersect(const Interval<T>& a, const Interval<T>& b)
{
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Interval<T>& x)
{
    return os << '[' << x.lo << ", " << x.hi << ']';
}

} // namespace qsl
