#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gap.hpp"
#include "minorant.hpp"
#include "roots.hpp"

namespace qsl {

template <class T>
struct CertifyOptions {
    T lower{0};                         // domain is [lower, inf)
    std::vector<T> contacts;            // declared contact points (hints)
    long max_subdivisions = 400000;
    std::optional<T> contact_tolerance; // default 2^(-bits/2)
};

namespace detail {

template <class T>
struct Contact {
    T x;
    int m = 0;
    bool boundary = false;
    std::vector<Interval<T>> t;
    std::optional<Interval<T>> accepted; // hull of pieces certified through this contact
};

// Leading order of D at x: the first Taylor coefficient above the contact tolerance.
template <class T, class Gap>
bool analyze_contact(const Gap& g, const T& x, bool boundary, const T& tol, Contact<T>& out)
{
    if (!g.expandable(x))
        return false;
    out.x = x;
    out.boundary = boundary;
    out.t = g.taylor(x);
    for (int j = 0; j < g.order(); ++j) {
        if (mag(out.t[j]) > tol) {
            out.m = j;
            if (j == 0)
                return false;
            return out.t[j].lo > 0 && (j % 2 == 0 || boundary);
        }
    }
    return false;
}

// D >= -deficit on X by expanding about the contact point.
template <class T, class Gap>
bool contact_form(const Gap& g, const Contact<T>& c, const Interval<T>& X, const T& tol, T& deficit)
{
    using std::isfinite;
    if (c.m % 2 != 0 && X.lo < c.x)
        return false;
    const T r = mag(X - Interval<T>(c.x));
    const T M = g.remainder(c.x, r);
    if (!isfinite(M))
        return false;
    const int K = g.order();
    T low(0), rp(1);
    for (int j = 0; j < c.m; ++j) {
        low += mag(c.t[j]) * rp;
        rp *= r;
    }
    low = up(low, 2 * K);
    if (low > tol)
        return false;
    T spread(0);
    rp = T(1);
    for (int j = c.m + 1; j < K; ++j) {
        rp *= r;
        spread += mag(c.t[j]) * rp;
    }
    rp *= r;
    spread += rp * M;
    if (down(T(c.t[c.m].lo - up(spread, 2 * K))) < 0)
        return false;
    deficit = std::max(deficit, low);
    return true;
}

// Search near X for an undeclared even-order contact: Newton on D^(m-1).
template <class T, class Gap>
std::optional<Contact<T>> discover_contact(const Gap& g, const Interval<T>& X, const T& lower, const T& tol)
{
    using std::abs;
    Contact<T> c;
    if (X.lo == lower && analyze_contact(g, lower, true, tol, c))
        return c;
    const T w = X.width();
    const T step_tol = pow2<T>(-precision_bits<T>() / 2);
    // from the top: at a contact of order m, D^(j-1) has a multiple root for j < m and Newton crawls
    for (int m = (g.order() - 2) / 2 * 2; m >= 2; m -= 2) {
        T x = X.mid();
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            if (!g.expandable(x))
                break;
            auto t = g.taylor(x);
            T d = t[m].mid() * m;
            if (d == 0)
                break;
            T nx = x - t[m - 1].mid() / d;
            if (abs(nx - X.mid()) > 64 * w + tol)
                break;
            if (abs(nx - x) <= step_tol * (1 + abs(x))) {
                x = nx;
                ok = true;
                break;
            }
            x = nx;
        }
        if (ok && x >= lower && analyze_contact(g, x, x == lower, tol, c))
            return c;
    }
    return std::nullopt;
}

// Far field on [lower, inf): the point beyond which p < -1 <= cos, or a
// witness that p exceeds cos somewhere. For fractional s the roots are
// isolated in y = u^s.
template <class T>
bool far_field(const Polynomial<T>& p, const T& theta, const T& lower, T& xu, std::optional<Witness<T>>& witness)
{
    using std::cos;
    using std::pow;
    const bool unit = p.integer_scale();
    const Polynomial<T> P = unit ? to_unit_scale(p) : Polynomial<T>(p.coeffs());
    const T s = p.scale();
    auto to_x = [&](const T& y) { return unit ? y : T(y <= 0 ? T(0) : T(pow(y, 1 / s))); };
    const T ylower = unit ? lower : T(lower <= 0 ? T(0) : T(pow(lower, s)));
    auto gap = [&](const T& x) { return T(cos(x - theta) - eval(p, x)); };
    if (P.degree() == 0) {
        if (P[0] <= -1) {
            xu = lower;
            return true;
        }
        // cos reaches -1 at theta + pi + 2k pi
        T x = theta + pi<T>();
        while (x < lower)
            x += two_pi<T>();
        while (x - two_pi<T>() >= lower)
            x -= two_pi<T>();
        witness = Witness<T>{Interval<T>(x), x, gap(x)};
        return false;
    }
    if (P.leading() > 0) {
        T y = std::max(T(root_bound((P - T(1)).coeffs()) + 1), T(ylower + 1));
        T x = to_x(y);
        witness = Witness<T>{Interval<T>(x), x, gap(x)};
        return false;
    }
    const Polynomial<T> Q = P + T(1);
    const T B = root_bound(Q.coeffs());
    xu = lower;
    if (B > ylower) {
        auto roots = real_roots(Q, Interval<T>(ylower, B));
        if (!roots.empty())
            xu = std::max(lower, up(to_x(roots.back().x.hi), 4));
    }
    return true;
}

template <class T>
bool has_boundary_form(const CosGap<T>&)
{
    return false;
}

template <class T>
bool has_boundary_form(const PowerGap<T>&)
{
    return true;
}

// Adaptive bisection of [L, xu], left to right.
template <class T, class Gap>
void subdivide(const Gap& g, const T& L, const T& xu, const std::vector<T>& hints, const T& tol, long budget,
               MinorantCertificate<T>& cert)
{
    using std::abs;
    using std::isfinite;
    // the fractional case has a dedicated form at u = 0
    bool boundary_form = false;
    if constexpr (requires { g.boundary_contact(tol); })
        boundary_form = L == 0 && g.boundary_contact(tol);
    std::optional<Interval<T>> boundary_hull;

    std::vector<Contact<T>> contacts;
    auto add_contact = [&](const T& x) {
        if (x < L || x > xu)
            return;
        for (const auto& c : contacts)
            if (c.x == x)
                return;
        Contact<T> c;
        if (analyze_contact(g, x, x == L, tol, c))
            contacts.push_back(std::move(c));
    };
    for (const T& x : hints)
        add_contact(x);
    add_contact(L);

    T deficit(0);
    long count = 0;
    std::vector<Interval<T>> stack;
    if (xu > L)
        stack.push_back({L, xu});
    const T reach(1);
    while (!stack.empty()) {
        Interval<T> X = stack.back();
        stack.pop_back();
        if (++count > budget) {
            cert.subdivision_count = count;
            cert.set(CertStatus::inconclusive);
            cert.note = "subdivision budget exhausted";
            return;
        }
        if constexpr (requires { g.boundary(X, tol, deficit); }) {
            if (boundary_form && X.lo == 0 && g.boundary(X, tol, deficit)) {
                boundary_hull = boundary_hull ? hull(*boundary_hull, X) : X;
                continue;
            }
        }
        Contact<T>* near = nullptr;
        T best_d(0);
        for (auto& c : contacts) {
            T d = c.x < X.lo ? T(X.lo - c.x) : (c.x > X.hi ? T(c.x - X.hi) : T(0));
            if (d <= reach && (!near || d < best_d)) {
                near = &c;
                best_d = d;
            }
        }
        if (near && contact_form(g, *near, X, tol, deficit)) {
            if (X.contains(near->x))
                near->accepted = near->accepted ? hull(*near->accepted, X) : X;
            continue;
        }
        const T c = X.mid();
        const T M = g.expandable(c) ? g.remainder(c, X.rad()) : std::numeric_limits<T>::infinity();
        if (isfinite(M)) {
            if (taylor_range(g.taylor(c), X.rad(), 0, M).lo >= 0)
                continue;
        } else if (g.natural(X).lo >= 0) {
            continue;
        }
        const Interval<T> v = g.value(c);
        if (v.hi < -tol) {
            cert.subdivision_count = count;
            cert.negative_evidence = Witness<T>{X, c, v.mid()};
            cert.set(CertStatus::refuted);
            return;
        }
        const T w = X.width();
        const T scale = std::max(T(1), T(abs(c)));
        if (w < pow2<T>(-12) * scale && !(near && best_d <= 64 * w)) {
            if (auto nc = discover_contact(g, X, L, tol)) {
                bool dup = false;
                for (const auto& e : contacts)
                    dup = dup || e.x == nc->x;
                if (!dup) {
                    contacts.push_back(std::move(*nc));
                    stack.push_back(X);
                    continue;
                }
            }
        }
        if (w < pow2<T>(-precision_bits<T>() / 3) * scale) {
            cert.subdivision_count = count;
            cert.set(CertStatus::inconclusive);
            cert.note = "cannot certify near x = " + to_decimal(c, 20);
            return;
        }
        stack.push_back({c, X.hi});
        stack.push_back({X.lo, c});
    }
    cert.subdivision_count = count;
    if (boundary_form)
        cert.contact_enclosures.push_back(boundary_hull ? *boundary_hull : Interval<T>(T(0)));
    for (const auto& c : contacts)
        cert.contact_enclosures.push_back(c.accepted ? *c.accepted : Interval<T>(c.x));
    std::sort(cert.contact_enclosures.begin(), cert.contact_enclosures.end(),
              [](const Interval<T>& a, const Interval<T>& b) { return a.lo < b.lo; });
    cert.contact_tolerance = deficit;
    cert.set(CertStatus::verified);
}

} // namespace detail

// Certify cos(x - theta) - p(x) >= 0 on [lower, inf) by adaptive bisection
// with Taylor models, contact expansions and a far-field root bound. For a
// fractional scale s the variable is u with p(u) = sum c_k u^(s k).
template <class T>
MinorantCertificate<T> certify_by_subdivision(const Polynomial<T>& p, const T& theta, const CertifyOptions<T>& opt = {})
{
    MinorantCertificate<T> cert;
    cert.method = CertMethod::interval_subdivision;
    cert.precision_bits = precision_bits<T>();
    cert.domain_lower = opt.lower;
    const bool unit = p.integer_scale();
    if (opt.lower < 0 && !unit)
        throw domain_error("negative domain with fractional exponent scale");
    const T tol = opt.contact_tolerance ? *opt.contact_tolerance : half_precision_tol<T>();
    T xu;
    if (!detail::far_field(p, theta, opt.lower, xu, cert.negative_evidence)) {
        cert.set(CertStatus::refuted);
        cert.note = "far field: p exceeds cos";
        return cert;
    }
    cert.far_field_cutoff = xu;
    if (unit)
        detail::subdivide(detail::CosGap<T>(to_unit_scale(p), theta), opt.lower, xu, opt.contacts, tol,
                          opt.max_subdivisions, cert);
    else
        detail::subdivide(detail::PowerGap<T>(p, theta), opt.lower, xu, opt.contacts, tol, opt.max_subdivisions,
                          cert);
    return cert;
}

template <class T>
MinorantCertificate<T> certify_by_subdivision(const Polynomial<T>& p, const T& theta, const std::vector<T>& contacts)
{
    CertifyOptions<T> o;
    o.contacts = contacts;
    return certify_by_subdivision(p, theta, o);
}

} // namespace qsl
