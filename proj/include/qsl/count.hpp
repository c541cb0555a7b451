#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "certify.hpp"

namespace qsl {

template <class T>
struct KnownRoot {
    T x;
    int multiplicity = 1;
};

namespace detail {

// Upper bound on the roots (with multiplicity) of cos^(k) - p^(k) in W: on a
// piece where the j-th derivative keeps one sign there are at most j roots.
template <class T>
std::optional<long> count_roots(const CosGap<T>& h, const Interval<T>& W, std::vector<RootCount<T>>& pieces,
                                long budget)
{
    long total = 0, steps = 0;
    std::vector<Interval<T>> stack{W};
    const T scale = std::max(T(1), mag(W));
    const T min_width = pow2<T>(-precision_bits<T>() / 3) * scale;
    while (!stack.empty()) {
        Interval<T> X = stack.back();
        stack.pop_back();
        if (++steps > budget)
            return std::nullopt;
        const auto t = h.taylor(X.mid());
        const T r = X.rad();
        const T M = h.remainder(X.mid(), r);
        int bound = -1;
        for (int j = 0; j < h.order(); ++j) {
            if (!taylor_range(t, r, j, M).contains_zero()) {
                bound = j;
                break;
            }
        }
        // higher-order bounds only once the piece is small; splitting usually does better
        if (bound >= 2 && X.width() > pow2<T>(-16) * scale)
            bound = -1;
        if (bound == 1) {
            // monotone piece: a root is there iff the end signs differ
            Interval<T> a = h.value(X.lo), b = h.value(X.hi);
            if (a.certain_sign() && b.certain_sign() && a.sign() == b.sign())
                bound = 0;
        }
        if (bound >= 0) {
            if (bound > 0) {
                total += bound;
                if (!pieces.empty() && pieces.back().x.hi == X.lo) {
                    pieces.back().x.hi = X.hi;
                    pieces.back().bound += bound;
                } else {
                    pieces.push_back({X, bound});
                }
            }
            continue;
        }
        if (X.width() < min_width)
            return std::nullopt;
        // off-centre split keeps symmetric roots such as x = 0 off the cut points
        const T c = X.lo + X.width() * T(0.4609375);
        stack.push_back({c, X.hi});
        stack.push_back({X.lo, c});
    }
    // adjacent pieces were merged; a single derivative bound on the hull may be smaller
    total = 0;
    for (auto& piece : pieces) {
        if (piece.bound >= 2) {
            const auto t = h.taylor(piece.x.mid());
            const T M = h.remainder(piece.x.mid(), piece.x.rad());
            for (int j = 0; j < piece.bound; ++j) {
                if (!taylor_range(t, piece.x.rad(), j, M).contains_zero()) {
                    piece.bound = j;
                    break;
                }
            }
        }
        total += piece.bound;
    }
    return total;
}

template <class T>
std::optional<Witness<T>> search_witness(const Polynomial<T>& p, const T& theta, const T& lo, const T& hi, int n)
{
    using std::abs;
    std::optional<Witness<T>> best;
    for (int i = 0; i <= n; ++i) {
        T x = lo + (hi - lo) * T(i) / T(n);
        Interval<T> d = cos(Interval<T>(x) - Interval<T>(theta)) - eval_interval(p, Interval<T>(x));
        if (d.hi < 0 && (!best || d.mid() < best->difference * T(1 + 1e-6))) {
            T h = (hi - lo) / T(n);
            best = Witness<T>{Interval<T>(T(x - h), T(x + h)), x, d.mid()};
        }
    }
    return best;
}

} // namespace detail

template <class T>
struct CountOptions {
    std::optional<Interval<T>> window; // searched in addition to the computed one
    long max_subdivisions = 200000;
    std::optional<T> contact_tolerance;
};

// Certify p(x) <= cos(x) on the whole real line by counting roots of a high
// derivative of p - cos and comparing against the declared roots (Rolle).
template <class T>
MinorantCertificate<T> certify_by_derivative_count(const Polynomial<T>& p, const std::vector<KnownRoot<T>>& roots,
                                                   const CountOptions<T>& opt = {})
{
    using std::abs;
    MinorantCertificate<T> cert;
    cert.method = CertMethod::derivative_count;
    cert.precision_bits = precision_bits<T>();
    cert.domain_lower = -std::numeric_limits<T>::infinity();
    if (!p.unit_scale())
        throw domain_error("derivative counting needs exponent scale 1");
    const T tol = opt.contact_tolerance ? *opt.contact_tolerance : half_precision_tol<T>();
    const int n = p.degree();
    const int k = std::max(0, n - 2);
    cert.derivative_order = k;

    auto refute_or_give_up = [&](const std::string& why, const T& reach) {
        cert.note = why;
        if (auto w = detail::search_witness(p, T(0), T(-reach), reach, 8192)) {
            cert.negative_evidence = w;
            cert.set(CertStatus::refuted);
        } else {
            cert.set(CertStatus::inconclusive);
        }
        return cert;
    };

    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (roots[i].x == roots[j].x)
                throw domain_error("declared roots must be distinct");

    // window: outside it |p^(k)| > 1 >= |cos^(k)|
    const Polynomial<T> pk = derivative(p, k);
    std::optional<Interval<T>> W;
    bool unbounded = false;
    if (pk.degree() == 0) {
        unbounded = abs(pk[0]) <= 1;
    } else {
        T B = std::max(root_bound((pk - T(1)).coeffs()), root_bound((pk + T(1)).coeffs())) + 1;
        for (const T& sgn : {T(1), T(-1)}) {
            for (const auto& r : real_roots(pk - sgn, Interval<T>(-B, B)))
                W = W ? hull(*W, r.x) : r.x;
        }
        if (!W && abs(pk(T(0))) <= 1)
            unbounded = true;
    }
    T reach(8);
    for (const auto& r : roots)
        reach = std::max(reach, T(abs(r.x) + 8));
    if (unbounded)
        return refute_or_give_up("|p^(k)| <= 1 on an unbounded set; roots cannot be counted", T(4 * reach));
    if (W) {
        W = Interval<T>(detail::down(W->lo, 4), detail::up(W->hi, 4));
        if (opt.window)
            W = hull(*W, *opt.window);
    } else if (opt.window) {
        W = opt.window;
    }
    if (W)
        reach = std::max(reach, T(mag(*W) + 8));
    cert.window = W;
    cert.far_field_cutoff = W ? mag(*W) : T(0);

    long R = 0;
    if (W) {
        detail::CosGap<T> h(pk, T(0), k);
        auto cnt = detail::count_roots(h, *W, cert.window_roots, opt.max_subdivisions);
        if (!cnt)
            return refute_or_give_up("window root count did not resolve", reach);
        R = *cnt;
    }
    cert.window_root_count = R;

    if (n % 2 != 0 || p.leading() >= 0)
        return refute_or_give_up("p - cos must tend to -inf in both directions", reach);

    // local sign at each declared root
    const detail::CosGap<T> g(p, T(0));
    long N = 0;
    for (const auto& r : roots) {
        detail::Contact<T> c;
        if (!detail::analyze_contact(g, r.x, false, tol, c))
            return refute_or_give_up("p - cos is not locally nonpositive at x = " + to_decimal(r.x, 20), reach);
        if (c.m < r.multiplicity)
            return refute_or_give_up("declared multiplicity exceeds the observed one at x = " + to_decimal(r.x, 20),
                                     reach);
        T rad(0.5), deficit(0);
        bool ok = false;
        for (int i = 0; i < 60 && !ok; ++i, rad /= 2)
            ok = detail::contact_form(g, c, Interval<T>(T(r.x - rad), T(r.x + rad)), tol, deficit);
        if (!ok)
            return refute_or_give_up("local sign check failed at x = " + to_decimal(r.x, 20), reach);
        cert.contact_enclosures.push_back(Interval<T>(T(r.x - 2 * rad), T(r.x + 2 * rad)));
        cert.contact_tolerance = std::max(cert.contact_tolerance, deficit);
        // a root with the same sign on both sides has even multiplicity
        N += r.multiplicity + (r.multiplicity % 2);
    }
    std::sort(cert.contact_enclosures.begin(), cert.contact_enclosures.end(),
              [](const Interval<T>& a, const Interval<T>& b) { return a.lo < b.lo; });

    // A region where p > cos would add at least two roots beyond the declared ones.
    if (N > R + k)
        return refute_or_give_up("declared roots exceed the Rolle bound " + std::to_string(R + k), reach);
    if (N + 2 <= R + k)
        return refute_or_give_up("Rolle bound " + std::to_string(R + k) + " leaves room for undeclared roots", reach);
    cert.set(CertStatus::verified);
    return cert;
}

template <class T>
MinorantCertificate<T> certify_by_derivative_count(const Polynomial<T>& p,
                                                   const std::vector<std::pair<T, int>>& roots,
                                                   const CountOptions<T>& opt = {})
{
    std::vector<KnownRoot<T>> r;
    for (const auto& [x, m] : roots)
        r.push_back({x, m});
    return certify_by_derivative_count(p, r, opt);
}

} // namespace qsl
