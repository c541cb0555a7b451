#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "interval.hpp"
#include "polynomial.hpp"

// Taylor models of D(x) = cos(x - theta) - p(x), the quantity every
// certifier has to keep nonnegative.
namespace qsl::detail {

template <class T>
std::vector<Interval<T>> inverse_factorials(int n)
{
    std::vector<Interval<T>> f(n);
    Interval<T> acc(T(1));
    for (int j = 0; j < n; ++j) {
        if (j > 0)
            acc = acc / Interval<T>(T(j));
        f[j] = acc;
    }
    return f;
}

template <class T>
T binom(int n, int k)
{
    T r(1);
    for (int i = 1; i <= k; ++i)
        r = r * T(n - k + i) / T(i);
    return r;
}

template <class T>
Interval<T> cos_derivative(const Interval<T>& x, int n)
{
    switch (n % 4) {
    case 0: return cos(x);
    case 1: return -sin(x);
    case 2: return -cos(x);
    default: return sin(x);
    }
}

// Enclosure of D^(j)/j! on [c - r, c + r] from Taylor coefficients t at c and
// a bound M >= |D^(K)|/K! on the same ball, K = t.size().
template <class T>
Interval<T> taylor_range(const std::vector<Interval<T>>& t, const T& r, int j, const T& M)
{
    const int K = static_cast<int>(t.size());
    T spread(0), rp(1);
    for (int i = j + 1; i < K; ++i) {
        rp *= r;
        spread += mag(t[i]) * binom<T>(i, j) * rp;
    }
    rp *= r;
    spread += M * binom<T>(K, j) * rp;
    spread = up(spread, 2 * K + 4);
    return {t[j].lo - spread, t[j].hi + spread};
}

// cos^(shift)(x - theta) - q(x) for a unit-scale q.
template <class T>
class CosGap {
public:
    CosGap(const Polynomial<T>& q, const T& theta, int shift = 0)
        : q_(q.coeffs()), theta_(theta), shift_(shift), K_(std::max<int>(static_cast<int>(q.size()) + 2, 8)),
          invfact_(inverse_factorials<T>(K_ + 1))
    {
    }

    int order() const { return K_; }
    bool expandable(const T&) const { return true; }

    std::vector<Interval<T>> taylor(const T& c) const
    {
        Interval<T> arg = Interval<T>(c) - Interval<T>(theta_);
        Interval<T> C = cos(arg), S = sin(arg);
        const Interval<T> cyc[4] = {C, -S, -C, S};
        std::vector<Interval<T>> q = taylor_shift_enclosure(q_, c);
        std::vector<Interval<T>> t(K_);
        for (int j = 0; j < K_; ++j) {
            t[j] = cyc[(j + shift_) % 4] * invfact_[j];
            if (j < static_cast<int>(q.size()))
                t[j] = t[j] - q[j];
        }
        return t;
    }

    // the polynomial part has no K-th derivative
    T remainder(const T&, const T&) const { return invfact_[K_].hi; }

    Interval<T> value(const T& x) const { return natural(Interval<T>(x)); }

    Interval<T> natural(const Interval<T>& X) const
    {
        return cos_derivative(X - Interval<T>(theta_), shift_) - horner(q_, X);
    }

private:
    std::vector<T> q_;
    T theta_;
    int shift_ = 0;
    int K_;
    std::vector<Interval<T>> invfact_;
};

// cos(u - theta) - sum c_k u^(s k) for u >= 0 and fractional s. Taylor
// expansions exist about every u > 0; the boundary u = 0 has its own form.
template <class T>
class PowerGap {
public:
    PowerGap(const Polynomial<T>& p, const T& theta)
        : c_(p.coeffs()), s_(p.scale()), theta_(theta), K_(std::max<int>(16, static_cast<int>(p.size()) + 4)),
          invfact_(inverse_factorials<T>(K_ + 1))
    {
    }

    int order() const { return K_; }
    bool expandable(const T& c) const { return c > 0; }

    std::vector<Interval<T>> taylor(const T& c) const
    {
        Interval<T> arg = Interval<T>(c) - Interval<T>(theta_);
        Interval<T> C = cos(arg), S = sin(arg);
        const Interval<T> cyc[4] = {C, -S, -C, S};
        std::vector<Interval<T>> t(K_);
        for (int j = 0; j < K_; ++j)
            t[j] = cyc[j % 4] * invfact_[j];
        const Interval<T> ci(c);
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k] == 0)
                continue;
            const T e = s_ * T(static_cast<long>(k));
            // binom(e, j) c^(e - j)
            Interval<T> term = e == 0 ? Interval<T>(T(1)) : pow_real(ci, e);
            for (int j = 0; j < K_; ++j) {
                t[j] = t[j] - term * c_[k];
                term = term * Interval<T>(T(e - j)) / Interval<T>(T(j + 1)) / ci;
            }
        }
        return t;
    }

    T remainder(const T& c, const T& r) const
    {
        using std::abs;
        using std::pow;
        const T left = c - r;
        if (!(left > 0))
            return std::numeric_limits<T>::infinity();
        T M = invfact_[K_].hi;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k] == 0)
                continue;
            const T e = s_ * T(static_cast<long>(k));
            if (is_integer(e) && e < K_)
                continue;
            T b(1);
            for (int i = 0; i < K_; ++i)
                b = b * (e - i) / (i + 1);
            const T base = e - K_ < 0 ? left : T(c + r);
            M += abs(c_[k]) * abs(b) * pow(base, e - K_);
        }
        return up(M, 8 * K_);
    }

    Interval<T> value(const T& x) const { return natural(Interval<T>(x)); }

    Interval<T> natural(const Interval<T>& X) const
    {
        return cos(X - Interval<T>(theta_)) - horner(c_, pow_real(X, s_));
    }

    // Near u = 0: expand cos to a few orders, then factor out the smallest
    // non-negligible power of u. Proves D >= -deficit on X = [0, r].
    bool boundary(const Interval<T>& X, const T& tol, T& deficit) const
    {
        using std::pow;
        if (X.lo < 0)
            return false;
        const T r = X.hi;
        std::vector<std::pair<T, Interval<T>>> terms;
        auto add = [&](const T& e, const Interval<T>& c) {
            for (auto& t : terms)
                if (t.first == e) {
                    t.second = t.second + c;
                    return;
                }
            terms.emplace_back(e, c);
        };
        T top(0);
        for (std::size_t k = 1; k < c_.size(); ++k)
            if (c_[k] != 0)
                top = std::max(top, T(s_ * T(static_cast<long>(k))));
        int J = 8;
        while (T(J) <= top && J < 64)
            ++J;
        const Interval<T> th(theta_);
        const Interval<T> cyc[4] = {cos(-th), -sin(-th), -cos(-th), sin(-th)};
        const auto inv = inverse_factorials<T>(J + 1);
        for (int j = 0; j < J; ++j)
            add(T(j), cyc[j % 4] * inv[j]);
        const Interval<T> f = inv[J];
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (c_[k] != 0)
                add(s_ * T(static_cast<long>(k)), Interval<T>(T(-c_[k])));
        Interval<T> rem = cos_derivative(Interval<T>(T(0), r) - th, J) * f;
        T low(0);
        std::vector<std::pair<T, Interval<T>>> kept;
        for (const auto& t : terms) {
            if (mag(t.second) <= tol)
                low += mag(t.second) * (t.first == 0 ? T(1) : T(pow(r, t.first)));
            else
                kept.push_back(t);
        }
        low = up(low, 2 * static_cast<int>(terms.size()));
        if (low > tol)
            return false;
        T sigma(J);
        for (const auto& t : kept)
            sigma = std::min(sigma, t.first);
        auto xp = [&](const T& e) { return e == 0 ? Interval<T>(T(1)) : pow_real(X, e); };
        Interval<T> br = rem * xp(T(J - sigma));
        for (const auto& t : kept)
            br = br + t.second * xp(T(t.first - sigma));
        if (br.lo < 0)
            return false;
        deficit = std::max(deficit, low);
        return true;
    }

    bool boundary_contact(const T& tol) const
    {
        T d(0);
        for (int i = 1; i < 200; ++i)
            if (boundary(Interval<T>(T(0), pow2<T>(-i)), tol, d))
                return true;
        return false;
    }

private:
    std::vector<T> c_;
    T s_;
    T theta_;
    int K_;
    std::vector<Interval<T>> invfact_;
};

} // namespace qsl::detail
