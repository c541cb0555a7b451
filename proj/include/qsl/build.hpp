#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "count.hpp"
#include "evolution.hpp"
#include "hermite.hpp"
#include "solve.hpp"

namespace qsl {

template <class T>
struct BuildOptions {
    int max_doublings = 1000;
    int bisection_rounds = 64;
    int max_reseeds = 8;
    long max_subdivisions = 400000;
};

template <class T>
struct BuiltMinorant {
    Polynomial<T> p;                    // carries the exponent scale s
    MinorantCertificate<T> certificate;
    T correction{0};                    // b in q = interpolant - b * W
    Polynomial<T> interpolant;
    Polynomial<T> correction_shape;     // W
    std::vector<ContactNode<T>> nodes;  // as used, including any extra random node
};

template <class T>
void validate(const MinorantSpec<T>& spec)
{
    if (!(spec.s > 0))
        throw domain_error("exponent scale s must be positive");
    if (spec.nodes.empty())
        throw domain_error("at least one node is required");
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        if (spec.nodes[i].x < 0)
            throw domain_error("nodes must be non-negative");
        if (spec.nodes[i].m < 1)
            throw domain_error("contact order must be at least 1");
        for (std::size_t j = 0; j < i; ++j)
            if (spec.nodes[i].x == spec.nodes[j].x)
                throw domain_error("nodes must be distinct");
    }
}

namespace detail {

template <class T>
std::vector<T> taylor_of(const DerivativeFn<T>& f, const T& x, int count)
{
    std::vector<T> d = f(x, count);
    T fact(1);
    for (int j = 0; j < count; ++j) {
        if (j > 0)
            fact *= j;
        d[j] /= fact;
    }
    return d;
}

// Leading local coefficient of f - q at x, searching orders m .. m + extra.
template <class T>
bool leading_term(const DerivativeFn<T>& f, const Polynomial<T>& q, const T& x, int m, int extra, int& order, T& a)
{
    using std::abs;
    std::vector<T> ft;
    try {
        ft = taylor_of(f, x, m + extra + 2);
    } catch (const domain_error&) {
        return false;
    }
    std::vector<T> qt = taylor_coefficients(q, x);
    qt.resize(ft.size(), T(0));
    for (int j = m; j <= m + extra; ++j) {
        T scale = std::max({T(abs(ft[j])), T(abs(qt[j])), T(abs(ft[j + 1])), T(abs(qt[j + 1])), T(1e-30)});
        T c = ft[j] - qt[j];
        if (abs(c) >= quarter_precision_tol<T>() * scale) {
            order = j;
            a = c;
            return true;
        }
    }
    return false;
}

// Leading term a x^e of cos(x^(1/s) - theta) - q(x) at x = 0+ for fractional s.
template <class T>
std::pair<T, T> fractional_boundary_term(const T& theta, const T& s, const Polynomial<T>& q, const T& tol)
{
    using std::abs;
    using std::cos;
    using std::sin;
    std::vector<std::pair<T, T>> terms;
    T fact(1);
    const T cyc[4] = {T(cos(theta)), T(sin(theta)), T(-cos(theta)), T(-sin(theta))};
    for (int j = 0; j < 64; ++j) {
        if (j > 0)
            fact *= j;
        terms.emplace_back(T(j) / s, cyc[j % 4] / fact);
    }
    for (std::size_t k = 0; k < q.size(); ++k) {
        const T e(static_cast<long>(k));
        bool merged = false;
        for (auto& t : terms)
            if (t.first == e) {
                t.second -= q[k];
                merged = true;
            }
        if (!merged)
            terms.emplace_back(e, T(-q[k]));
    }
    std::pair<T, T> best{std::numeric_limits<T>::infinity(), T(0)};
    for (const auto& t : terms)
        if (abs(t.second) > tol && t.first < best.first)
            best = t;
    return best;
}

template <class T>
Polynomial<T> monomial_power(const T& root, int e)
{
    Polynomial<T> r(std::vector<T>{T(1)});
    const Polynomial<T> f(std::vector<T>{T(-root), T(1)});
    for (int i = 0; i < e; ++i)
        r = r * f;
    return r;
}

} // namespace detail

// Hermite interpolation of cos(x^(1/s) - theta) at the spec nodes, then a
// correction b * x^e0 * prod (x - x_l)^e_l with the smallest b (to 64 halvings)
// that the subdivision certifier accepts.
template <class T>
BuiltMinorant<T> build_minorant(const MinorantSpec<T>& spec, const BuildOptions<T>& opt = {})
{
    using std::pow;
    validate(spec);
    const T s = spec.s;
    const DerivativeFn<T> f = root_cos(spec.theta, s);
    std::vector<ContactNode<T>> nodes = spec.nodes;
    for (auto& n : nodes)
        if (n.x > 0 && n.m % 2 != 0)
            ++n.m; // interior contact must be of even order
    std::mt19937_64 rng(spec.seed);

    BuiltMinorant<T> out;
    Polynomial<T> qt;
    std::vector<int> exps;
    bool ok = false;
    for (int attempt = 0; attempt <= opt.max_reseeds && !ok; ++attempt) {
        std::vector<HermiteNode<T>> hn;
        T far(0);
        for (const auto& n : nodes) {
            hn.push_back({n.x, n.m});
            far = std::max(far, n.x);
        }
        qt = trimmed(hermite_interpolate(hn, f), pow2<T>(-3 * precision_bits<T>() / 4));
        ok = true;
        exps.assign(nodes.size(), 0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto& n = nodes[i];
            int order = n.m;
            T a(0);
            const bool boundary = n.x == 0;
            if (detail::leading_term(f, qt, n.x, n.m, boundary ? 8 : 0, order, a)) {
                n.kappa = a > 0 ? 1 : 0;
                exps[i] = boundary ? order + n.kappa : n.m + 2 * n.kappa;
            } else if (boundary) {
                n.kappa = 0;
                exps[i] = n.m;
            } else {
                ok = false;
            }
        }
        if (!ok) {
            // degenerate node: add a random extra node of random even order
            std::uniform_real_distribution<double> ux(0.0, 1.0);
            T xa;
            bool fresh = false;
            while (!fresh) {
                xa = (far + 1) * T(0.05 + 1.45 * ux(rng));
                fresh = true;
                for (const auto& n : nodes)
                    fresh = fresh && n.x != xa;
            }
            nodes.push_back({xa, 2 * static_cast<int>(1 + rng() % 2), 0});
        }
    }
    if (!ok)
        throw convergence_error("degenerate contact persists after re-randomization");

    // a negative fractional power at 0 below the correction power cannot be fixed by any b
    if (!is_integer(s)) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].x != 0)
                continue;
            auto [e, a] = detail::fractional_boundary_term(spec.theta, s, qt, half_precision_tol<T>());
            if (a < 0 && e < T(exps[i]))
                throw convergence_error("no correction can help: cos - q ~ " + to_decimal(a, 6) + " x^" +
                                        to_decimal(e, 6) + " at x = 0");
        }
    }

    Polynomial<T> W(std::vector<T>{T(1)});
    for (std::size_t i = 0; i < nodes.size(); ++i)
        W = W * detail::monomial_power(nodes[i].x, exps[i]);

    CertifyOptions<T> co;
    co.max_subdivisions = opt.max_subdivisions;
    for (const auto& n : nodes)
        co.contacts.push_back(n.x == 0 ? T(0) : T(pow(n.x, 1 / s)));
    auto candidate = [&](const T& b) { return with_scale(Polynomial<T>(qt - b * W), s); };
    auto check = [&](const T& b) { return certify_by_subdivision(candidate(b), spec.theta, co); };

    out.interpolant = with_scale(qt, s);
    out.correction_shape = W;
    out.nodes = nodes;
    auto cert = check(T(0));
    if (cert.verified) {
        out.p = candidate(T(0));
        out.certificate = cert;
        out.certificate.seed = spec.seed;
        return out;
    }
    T b = half_precision_tol<T>();
    T lo(0);
    bool found = false;
    for (int i = 0; i < opt.max_doublings; ++i) {
        cert = check(b);
        if (cert.verified) {
            found = true;
            break;
        }
        lo = b;
        b *= 2;
    }
    if (!found)
        throw convergence_error("no correction magnitude certified; the node set may need a higher degree");
    for (int i = 0; i < opt.bisection_rounds; ++i) {
        T mid = (lo + b) / 2;
        auto c = check(mid);
        if (c.verified) {
            b = mid;
            cert = c;
        } else {
            lo = mid;
        }
    }
    out.p = candidate(b);
    out.correction = b;
    out.certificate = cert;
    out.certificate.seed = spec.seed;
    return out;
}

template <class T>
struct TangentMinorant {
    Polynomial<T> p; // cos(theta) - a x^b, scale b
    T a{0};
    T x_c{0};        // first tangency, 0 when the contact is only at the boundary
    MinorantCertificate<T> certificate;
};

// Smallest a >= 0 with cos(theta) - a x^b <= cos(x - theta) for x >= 0, i.e.
// a = sup (cos(theta) - cos(x - theta)) / x^b, attained on (0, theta + pi].
template <class T>
TangentMinorant<T> tangent_family(const T& b, const T& theta, bool certify = true)
{
    using std::abs;
    using std::cos;
    using std::pow;
    using std::sin;
    if (!(b > 0))
        throw domain_error("tangent family exponent must be positive");
    if (!(abs(theta) < half_pi<T>()))
        throw domain_error("tangent family needs |theta| < pi/2");
    const T ct = cos(theta), st = sin(theta);
    auto h = [&](const T& u) { return T((ct - cos(u - theta)) / pow(u, b)); };
    // limit at 0+ from cos(theta) - cos(u - theta) = -sin(theta) u + cos(theta) u^2 / 2 + ...
    T lim0(0);
    bool infinite = false;
    const T tiny = half_precision_tol<T>();
    if (abs(st) > tiny) {
        if (b == 1)
            lim0 = -st;
        else if (b > 1)
            infinite = st < 0;
    } else {
        if (b == 2)
            lim0 = ct / 2;
        else if (b > 2)
            infinite = true;
    }
    if (infinite)
        throw domain_error("no finite a: cos(theta) - a x^b exceeds cos(x - theta) near x = 0");

    const T U = theta + pi<T>();
    const int N = 4096;
    int best = 1;
    T hb = h(U / N);
    for (int i = 2; i <= N; ++i) {
        T v = h(U * i / N);
        if (v > hb) {
            hb = v;
            best = i;
        }
    }
    T xc(0), hc = hb;
    if (best > 1 && best < N) {
        auto g = [&](const T& u) { return T(u * sin(u - theta) - b * (ct - cos(u - theta))); };
        auto dg = [&](const T& u) { return T(sin(u - theta) + u * cos(u - theta) - b * sin(u - theta)); };
        const T lo = U * (best - 1) / N, hi = U * (best + 1) / N;
        if ((g(lo) > 0) != (g(hi) > 0))
            xc = bracket_solve(g, dg, lo, hi);
        else
            xc = golden_max(h, lo, hi, 4 * precision_bits<T>());
        hc = h(xc);
    } else if (best == N) {
        xc = U;
    }
    TangentMinorant<T> out;
    if (best == 1 || lim0 >= hc) {
        out.a = std::max(lim0, hc);
        out.x_c = best == 1 && lim0 < hc ? U / N : T(0);
        if (lim0 >= hc)
            out.x_c = 0;
    } else {
        out.a = hc;
        out.x_c = xc;
    }
    out.a = std::max(out.a, T(0));
    out.p = Polynomial<T>(std::vector<T>{ct, T(-out.a)}, b);
    if (certify) {
        CertifyOptions<T> co;
        co.contacts = {T(0)};
        if (out.x_c > 0)
            co.contacts.push_back(out.x_c);
        out.certificate = certify_by_subdivision(out.p, theta, co);
    }
    return out;
}

template <class T>
struct PeMinorant {
    Polynomial<T> p;
    MinorantCertificate<T> subdivision;
    MinorantCertificate<T> derivative_count;
    CriticalTimes<T> times;
    std::vector<HermiteNode<T>> nodes; // the full symmetric node set
};

template <class T>
std::vector<HermiteNode<T>> pe_nodes(const CriticalTimes<T>& ct)
{
    const T a = ct.tau_c1, b = ct.tau_c2;
    const T a2 = 11 * a / 5, b2 = 11 * b / 5;
    return {{T(0), 3}, {a, 4}, {T(-a), 4}, {b, 2}, {T(-b), 2}, {a2, 6}, {T(-a2), 6}, {b2, 4}, {T(-b2), 4}};
}

// The even degree-34 minorant of cos built on the critical times of the
// reference state, certified by both methods.
template <class T>
PeMinorant<T> build_pe(bool certify = true)
{
    PeMinorant<T> out;
    out.times = critical_times(paper_state<T>());
    out.nodes = pe_nodes(out.times);
    auto c = hermite_interpolate(out.nodes, shifted_cos<T>(T(0))).coeffs();
    for (std::size_t k = 1; k < c.size(); k += 2)
        c[k] = 0;
    out.p = Polynomial<T>(std::move(c));
    if (!certify)
        return out;
    CertifyOptions<T> co;
    std::vector<KnownRoot<T>> roots;
    for (const auto& n : out.nodes) {
        if (n.x >= 0)
            co.contacts.push_back(n.x);
        roots.push_back({n.x, n.m});
    }
    out.subdivision = certify_by_subdivision(out.p, T(0), co);
    CountOptions<T> wo;
    wo.window = Interval<T>(T(-8), T(8));
    out.derivative_count = certify_by_derivative_count(out.p, roots, wo);
    if (!out.subdivision.verified || !out.derivative_count.verified)
        throw precision_error("p_e failed certification: " + out.subdivision.note + " " + out.derivative_count.note);
    return out;
}

} // namespace qsl
