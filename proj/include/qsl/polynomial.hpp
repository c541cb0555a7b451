#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "interval.hpp"
#include "real.hpp"

namespace qsl {

// p(x) = sum_k c_k x^(s*k), coefficients in ascending order.
template <class T>
class Polynomial {
public:
    Polynomial() : c_{T(0)}, s_(1) {}

    explicit Polynomial(std::vector<T> coeffs, T scale = T(1)) : c_(std::move(coeffs)), s_(std::move(scale))
    {
        if (!(s_ > 0))
            throw domain_error("exponent scale must be positive");
        while (c_.size() > 1 && c_.back() == 0)
            c_.pop_back();
        if (c_.empty())
            c_.push_back(T(0));
    }

    const std::vector<T>& coeffs() const { return c_; }
    const T& scale() const { return s_; }
    const T& operator[](std::size_t k) const { return c_[k]; }
    std::size_t size() const { return c_.size(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0; }
    bool unit_scale() const { return s_ == 1; }
    bool integer_scale() const { return is_integer(s_); }
    const T& leading() const { return c_.back(); }

    T operator()(const T& x) const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.s_ == b.s_ && a.c_ == b.c_; }

private:
    std::vector<T> c_;
    T s_;
};

template <class T>
T horner(const std::vector<T>& c, const T& y)
{
    T r = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;)
        r = r * y + c[k];
    return r;
}

template <class T>
Interval<T> horner(const std::vector<T>& c, const Interval<T>& y)
{
    Interval<T> r = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;)
        r = r * y + Interval<T>(c[k]);
    return r;
}

template <class T>
Interval<T> horner(const std::vector<Interval<T>>& c, const Interval<T>& y)
{
    Interval<T> r = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;)
        r = r * y + c[k];
    return r;
}

// x^s with the domain rules of a scaled polynomial.
template <class T>
T scaled_power(const T& x, const T& s)
{
    using std::pow;
    if (s == 1)
        return x;
    if (x < 0 && !is_integer(s))
        throw domain_error("negative argument with fractional exponent scale");
    if (x == 0)
        return T(0);
    return T(pow(x, s));
}

template <class T>
Interval<T> scaled_power(const Interval<T>& x, const T& s)
{
    if (s == 1)
        return x;
    if (is_integer(s))
        return pow(x, static_cast<unsigned>(static_cast<long>(s)));
    if (x.lo < 0)
        throw domain_error("negative argument with fractional exponent scale");
    return pow_real(x, s);
}

template <class T>
T eval(const Polynomial<T>& p, const T& x)
{
    return horner(p.coeffs(), scaled_power(x, p.scale()));
}

template <class T>
T Polynomial<T>::operator()(const T& x) const
{
    return eval(*this, x);
}

template <class T>
Interval<T> eval_interval(const Polynomial<T>& p, const Interval<T>& x)
{
    return horner(p.coeffs(), scaled_power(x, p.scale()));
}

template <class T>
Polynomial<T> derivative(const Polynomial<T>& p, int k = 1)
{
    if (!p.unit_scale())
        throw domain_error("derivative requires exponent scale 1");
    const auto& c = p.coeffs();
    if (k <= 0)
        return p;
    if (k > p.degree())
        return Polynomial<T>();
    std::vector<T> d(c.size() - k);
    for (std::size_t j = 0; j < d.size(); ++j) {
        T f(1);
        for (int i = 1; i <= k; ++i)
            f *= T(static_cast<long>(j) + i);
        d[j] = c[j + k] * f;
    }
    return Polynomial<T>(std::move(d));
}

// Coefficients of p(c + h) in powers of h.
template <class T>
std::vector<T> taylor_shift(std::vector<T> t, const T& c)
{
    const std::size_t n = t.size() - 1;
    if (c == 0)
        return t;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = n; j-- > i;)
            t[j] += c * t[j + 1];
    return t;
}

// Same shift with a rigorous bound on the accumulated rounding error: the
// algorithm run on |c_k| and |c| bounds every partial sum, and each entry goes
// through at most 2n roundings.
template <class T>
std::vector<Interval<T>> taylor_shift_enclosure(const std::vector<T>& coeffs, const T& c)
{
    using std::abs;
    std::vector<T> t = taylor_shift(coeffs, c);
    std::vector<T> a(coeffs.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = abs(coeffs[k]);
    a = taylor_shift(std::move(a), T(abs(c)));
    const T u = std::numeric_limits<T>::epsilon() * (4 * static_cast<long>(coeffs.size()) + 4);
    std::vector<Interval<T>> out(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        T e = a[k] * u + detail::ulp_floor<T>();
        out[k] = Interval<T>(t[k] - e, t[k] + e);
    }
    return out;
}

template <class T>
std::vector<T> taylor_coefficients(const Polynomial<T>& p, const T& c)
{
    if (!p.unit_scale())
        throw domain_error("Taylor expansion requires exponent scale 1");
    return taylor_shift(p.coeffs(), c);
}

// Expand an integer exponent scale into an ordinary polynomial.
template <class T>
Polynomial<T> to_unit_scale(const Polynomial<T>& p)
{
    if (p.unit_scale())
        return p;
    if (!p.integer_scale())
        throw domain_error("fractional exponent scale cannot be expanded");
    const auto s = static_cast<std::size_t>(static_cast<long>(p.scale()));
    std::vector<T> c((p.size() - 1) * s + 1, T(0));
    for (std::size_t k = 0; k < p.size(); ++k)
        c[k * s] = p[k];
    return Polynomial<T>(std::move(c));
}

// Inverse of to_unit_scale when every exponent present is a multiple of s.
template <class T>
bool try_rescale(const Polynomial<T>& p, unsigned s, Polynomial<T>& out)
{
    if (!p.unit_scale() || s == 0)
        return false;
    std::vector<T> c;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k % s == 0)
            c.push_back(p[k]);
        else if (p[k] != 0)
            return false;
    }
    out = Polynomial<T>(std::move(c), T(s));
    return true;
}

template <class T>
Polynomial<T> with_scale(const Polynomial<T>& p, const T& s)
{
    return Polynomial<T>(p.coeffs(), s);
}

template <class T>
Polynomial<T> trimmed(const Polynomial<T>& p, const T& rel_tol)
{
    using std::abs;
    T big(0);
    for (const auto& c : p.coeffs())
        big = std::max(big, T(abs(c)));
    std::vector<T> c = p.coeffs();
    while (c.size() > 1 && abs(c.back()) <= rel_tol * big)
        c.pop_back();
    return Polynomial<T>(std::move(c), p.scale());
}

namespace detail {

template <class T>
void require_same_scale(const Polynomial<T>& a, const Polynomial<T>& b)
{
    if (a.scale() != b.scale())
        throw domain_error("polynomials with different exponent scales");
}

} // namespace detail

template <class T>
Polynomial<T> operator+(const Polynomial<T>& a, const Polynomial<T>& b)
{
    detail::require_same_scale(a, b);
    std::vector<T> c(std::max(a.size(), b.size()), T(0));
    for (std::size_t k = 0; k < a.size(); ++k)
        c[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k)
        c[k] += b[k];
    return Polynomial<T>(std::move(c), a.scale());
}

template <class T>
Polynomial<T> operator-(const Polynomial<T>& a)
{
    std::vector<T> c = a.coeffs();
    for (auto& v : c)
        v = -v;
    return Polynomial<T>(std::move(c), a.scale());
}

template <class T>
Polynomial<T> operator-(const Polynomial<T>& a, const Polynomial<T>& b)
{
    return a + (-b);
}

template <class T>
Polynomial<T> operator*(const Polynomial<T>& a, const Polynomial<T>& b)
{
    detail::require_same_scale(a, b);
    std::vector<T> c(a.size() + b.size() - 1, T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    return Polynomial<T>(std::move(c), a.scale());
}

template <class T>
Polynomial<T> operator*(const T& k, const Polynomial<T>& a)
{
    std::vector<T> c = a.coeffs();
    for (auto& v : c)
        v *= k;
    return Polynomial<T>(std::move(c), a.scale());
}

template <class T>
Polynomial<T> operator+(const Polynomial<T>& a, const T& k)
{
    std::vector<T> c = a.coeffs();
    c[0] += k;
    return Polynomial<T>(std::move(c), a.scale());
}

template <class T>
Polynomial<T> operator-(const Polynomial<T>& a, const T& k)
{
    return a + T(-k);
}

// p(alpha*x + beta); unit scale only.
template <class T>
Polynomial<T> compose_linear(const Polynomial<T>& p, const T& alpha, const T& beta)
{
    if (!p.unit_scale())
        throw domain_error("composition requires exponent scale 1");
    std::vector<T> t = taylor_shift(p.coeffs(), beta);
    T f(1);
    for (auto& v : t) {
        v *= f;
        f *= alpha;
    }
    return Polynomial<T>(std::move(t));
}

// All real roots lie in [-B, B]: the smaller of the Cauchy and Fujiwara bounds.
template <class T>
T root_bound(const std::vector<T>& c)
{
    using std::abs;
    using std::pow;
    const std::size_t n = c.size() - 1;
    T cauchy(0), fujiwara(0);
    for (std::size_t k = 0; k < n; ++k) {
        const T r = abs(c[k] / c.back());
        cauchy = std::max(cauchy, r);
        if (r == 0)
            continue;
        // |c_k / c_n|^(1/(n-k)), with the constant term halved
        const T base = k == 0 ? T(r / 2) : r;
        fujiwara = std::max(fujiwara, detail::up(T(pow(base, T(1) / T(static_cast<long>(n - k)))), 8));
    }
    return detail::up(std::min(T(1 + cauchy), T(2 * fujiwara)), 4);
}

template <class U, class T>
Polynomial<U> convert(const Polynomial<T>& p)
{
    std::vector<U> c;
    c.reserve(p.size());
    for (const auto& v : p.coeffs())
        c.push_back(convert<U>(v));
    return Polynomial<U>(std::move(c), convert<U>(p.scale()));
}

} // namespace qsl
