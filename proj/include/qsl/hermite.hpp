#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "polynomial.hpp"

namespace qsl {

template <class T>
struct HermiteNode {
    T x;
    int m = 1; // matched orders f, f', ..., f^(m-1)
};

// f(x), f'(x), ..., f^(count-1)(x)
template <class T>
using DerivativeFn = std::function<std::vector<T>(const T& x, int count)>;

// Derivatives of cos(x - theta).
template <class T>
DerivativeFn<T> shifted_cos(T theta)
{
    return [theta](const T& x, int count) {
        using std::cos;
        using std::sin;
        T c = cos(x - theta), s = sin(x - theta);
        const T cycle[4] = {c, -s, -c, s};
        std::vector<T> d(count);
        for (int j = 0; j < count; ++j)
            d[j] = cycle[j % 4];
        return d;
    };
}

namespace detail {

// Taylor coefficients of cos(v) and sin(v) for a truncated series v.
template <class T>
void cos_sin_series(const std::vector<T>& v, std::vector<T>& c, std::vector<T>& s)
{
    using std::cos;
    using std::sin;
    const std::size_t n = v.size();
    c.assign(n, T(0));
    s.assign(n, T(0));
    c[0] = cos(v[0]);
    s[0] = sin(v[0]);
    for (std::size_t k = 1; k < n; ++k) {
        T ck(0), sk(0);
        for (std::size_t i = 1; i <= k; ++i) {
            T iv = v[i] * T(static_cast<long>(i));
            ck -= iv * s[k - i];
            sk += iv * c[k - i];
        }
        c[k] = ck / T(static_cast<long>(k));
        s[k] = sk / T(static_cast<long>(k));
    }
}

} // namespace detail

// Derivatives in y of f(y) = cos(y^(1/s) - theta), the target of a minorant
// with exponent scale s written in the variable y = x^s.
template <class T>
DerivativeFn<T> root_cos(T theta, T s)
{
    if (s == 1)
        return shifted_cos(theta);
    return [theta, s](const T& y, int count) {
        using std::pow;
        const T alpha = 1 / s;
        std::vector<T> u(count, T(0));
        if (y == 0 && count <= 1) {
            // value only
        } else if (y == 0 && s == 2 && theta == 0) {
            // cos(sqrt(y)) = sum (-y)^k / (2k)! is analytic at 0
            std::vector<T> d(count);
            T f(1);
            for (int k = 0; k < count; ++k) {
                if (k > 0)
                    f = f * T(k) / (T(2 * k) * T(2 * k - 1));
                d[k] = k % 2 == 0 ? f : T(-f);
            }
            return d;
        } else if (y == 0) {
            if (!is_integer(alpha))
                throw domain_error("derivatives of y^(1/s) at 0 do not exist for fractional 1/s");
            auto n = static_cast<std::size_t>(static_cast<long>(alpha));
            if (n < u.size())
                u[n] = T(1);
        } else {
            if (y < 0)
                throw domain_error("negative node with fractional exponent scale");
            // binomial series of (y + h)^alpha
            T coef(1);
            for (int k = 0; k < count; ++k) {
                u[k] = coef * T(pow(y, alpha - k));
                coef = coef * (alpha - k) / T(k + 1);
            }
        }
        u[0] -= theta;
        std::vector<T> c, sn;
        detail::cos_sin_series(u, c, sn);
        T f(1);
        for (int j = 0; j < count; ++j) {
            c[j] *= f;
            f *= T(j + 1);
        }
        return c;
    };
}

// Unique polynomial of degree sum(m) - 1 matching f to order m - 1 at every
// node, by divided differences on the repeated abscissae.
template <class T>
Polynomial<T> hermite_interpolate(std::span<const HermiteNode<T>> nodes, const DerivativeFn<T>& f)
{
    if (nodes.empty())
        throw domain_error("no interpolation nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].m < 1)
            throw domain_error("node order must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (nodes[i].x == nodes[j].x)
                throw domain_error("duplicate interpolation node");
    }

    std::vector<T> z;
    std::vector<std::vector<T>> taylor; // f^(j)(z_i) / j! per expanded abscissa
    std::vector<std::vector<T>> derivs(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        derivs[i] = f(nodes[i].x, nodes[i].m);
        std::vector<T> t = derivs[i];
        T fact(1);
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (j > 0)
                fact *= T(static_cast<long>(j));
            t[j] /= fact;
        }
        for (int r = 0; r < nodes[i].m; ++r) {
            z.push_back(nodes[i].x);
            taylor.push_back(t);
        }
    }

    const std::size_t n = z.size();
    std::vector<T> col(n), top(n);
    for (std::size_t i = 0; i < n; ++i)
        col[i] = taylor[i][0];
    top[0] = col[0];
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = 0; i + k < n; ++i) {
            if (z[i + k] == z[i])
                col[i] = taylor[i][k];
            else
                col[i] = (col[i + 1] - col[i]) / (z[i + k] - z[i]);
        }
        top[k] = col[0];
    }

    // Newton form to monomial basis, innermost factor first.
    std::vector<T> c{top[n - 1]};
    for (std::size_t k = n - 1; k-- > 0;) {
        std::vector<T> next(c.size() + 1, T(0));
        for (std::size_t j = 0; j < c.size(); ++j) {
            next[j + 1] += c[j];
            next[j] -= c[j] * z[k];
        }
        next[0] += top[k];
        c = std::move(next);
    }
    Polynomial<T> p(std::move(c));

    const T tol = half_precision_tol<T>();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::vector<T> t = taylor_coefficients(p, nodes[i].x);
        T fact(1);
        for (int j = 0; j < nodes[i].m; ++j) {
            if (j > 0)
                fact *= T(j);
            T pj = static_cast<std::size_t>(j) < t.size() ? T(t[j] * fact) : T(0);
            using std::abs;
            T fj = derivs[i][j];
            if (abs(pj - fj) > tol * std::max(T(1), T(abs(fj))))
                throw precision_error("interpolation residual exceeds tolerance; raise the working precision");
        }
    }
    return p;
}

template <class T>
Polynomial<T> hermite_interpolate(const std::vector<HermiteNode<T>>& nodes, const DerivativeFn<T>& f)
{
    return hermite_interpolate(std::span<const HermiteNode<T>>(nodes), f);
}

} // namespace qsl
