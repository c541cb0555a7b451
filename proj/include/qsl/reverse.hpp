#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "certify.hpp"
#include "evolution.hpp"
#include "hermite.hpp"
#include "simplex.hpp"

namespace qsl {

// The induced bound dips to the target before tau_min.
struct strictness_error : error {
    double tau;
    strictness_error(const std::string& what, double t) : error(what), tau(t) {}
};

template <class T>
struct ReverseProblemSpec {
    DiagonalState<T> state;
    T sqrt_f0{0};
    int degree = 16;        // cap n
    int gamma = 2;          // smallest contact order allowed
    int grid_density = 256; // points on the approximation window, and again beyond it
    T horizon{1000};
    int max_rounds = 20;
    int validation_points = 10000;

    void validate() const
    {
        state.validate();
        if (!(sqrt_f0 >= 0) || !(sqrt_f0 < 1))
            throw domain_error("target root fidelity must lie in [0, 1)");
        if (degree < 1 || gamma < 2 || grid_density < 8 || max_rounds < 1 || validation_points < 2)
            throw domain_error("reverse problem: degree >= 1, gamma >= 2, grid density >= 8 required");
    }
};

template <class T>
struct ReverseReport {
    T delta{0};
    int beta = 0;
    T zeta{0};
    T gamma_prime{0};
    int gamma = 0;   // contact order actually imposed
    T epsilon{0};    // sqrt(F)(tau_min - delta) - sqrt(F0)
    T tau_turn{0};
    bool gap_below_epsilon = false; // sup gap < epsilon: the far regime follows without sampling
};

template <class T>
struct ReverseSolution {
    Polynomial<T> p;
    T sup_gap{0}; // max |cos - p| on the approximation grid
    T x_min{0}, x_max{0};
    T x_reach{0}; // right end of the approximation window, >= x_max
    T x_far{0};
    T tau_min{0};
    T theta_min{0};
    std::vector<T> contacts;
    T tightness_residual{0};
    T strictness_margin{0}; // min of RHS - sqrt(F0) over grid points in [0, tau_min - delta]
    T near_margin{0};       // same over grid points in (tau_min - delta, tau_min)
    T near_witness{0};
    MinorantCertificate<T> certificate;
    ReverseReport<T> report;
    int rounds = 0;
    int grid_density = 0;
    long lp_pivots = 0;
    std::vector<T> approximation_grid;
    std::vector<T> extended_grid;
};

namespace detail {

template <class T>
T phase_at(const DiagonalState<T>& st, const T& tau)
{
    if (fidelity(st, tau) <= quarter_precision_tol<T>())
        return theta_left_limit(st, tau);
    return theta_at(st, tau);
}

template <class T>
T induced_direct(const Polynomial<T>& p, const DiagonalState<T>& st, const T& tau, const T& theta)
{
    T s(0);
    for (const auto& l : st.levels)
        s += l.weight * p(l.energy * tau - theta);
    return s;
}

// sum_k sum_l c_k C(k,l) <E^l> (-theta)^(k-l) tau^l, and the sum of the
// magnitudes of its terms
template <class T>
T induced_binomial(const Polynomial<T>& p, const DiagonalState<T>& st, const T& tau, const T& theta, T& magnitude)
{
    using std::abs;
    const auto& c = p.coeffs();
    const std::size_t n = c.size();
    std::vector<T> mom(n, T(0));
    for (const auto& l : st.levels) {
        T e(1);
        for (std::size_t k = 0; k < n; ++k) {
            mom[k] += l.weight * e;
            e *= l.energy;
        }
    }
    std::vector<T> mt(n), nt(n);
    T a(1), b(1);
    for (std::size_t k = 0; k < n; ++k) {
        mt[k] = a; // tau^k
        nt[k] = b; // (-theta)^k
        a *= tau;
        b *= -theta;
    }
    T sum(0);
    magnitude = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (c[k] == 0)
            continue;
        T binom(1);
        for (std::size_t l = 0; l <= k; ++l) {
            T term = c[k] * binom * mom[l] * nt[k - l] * mt[l];
            sum += term;
            magnitude += abs(term);
            binom = binom * T(k - l) / T(l + 1);
        }
    }
    return sum;
}

} // namespace detail

// Right-hand side of the bound induced by p at time tau, in its moment form.
// The level-sum form is evaluated as well and the two must agree.
template <class T>
T induced_bound_rhs(const Polynomial<T>& p, const DiagonalState<T>& st, const T& tau, const T& theta)
{
    using std::abs;
    if (!p.unit_scale())
        throw domain_error("induced bound needs exponent scale 1");
    T mag;
    T bin = detail::induced_binomial(p, st, tau, theta, mag);
    T dir = detail::induced_direct(p, st, tau, theta);
    if (abs(bin - dir) > half_precision_tol<T>() * (1 + mag))
        throw precision_error("induced bound: moment and level forms disagree");
    return bin;
}

template <class T>
T induced_bound_rhs(const Polynomial<T>& p, const DiagonalState<T>& st, const T& tau)
{
    if (tau < 0)
        throw domain_error("negative time");
    return induced_bound_rhs(p, st, tau, detail::phase_at(st, tau));
}

namespace detail {

// Room cos - p must keep at x: m0 prod_j min(1, |x - x_j| / R)^gamma with
// R = 1, which is how cos - p itself behaves near a cluster of contacts.
template <class T>
T reverse_margin(const T& x, const std::vector<T>& contacts, const T& m0, int gamma)
{
    using std::abs;
    using std::pow;
    T f(1);
    for (const auto& c : contacts)
        f *= std::min(T(1), T(abs(x - c)));
    return m0 * pow(f, gamma);
}

// Points of a dense uniform sample where p > cos: one per run of offenders,
// at its worst sample, plus the run's ends.
template <class T>
std::vector<T> screen_violations(const Polynomial<T>& p, const T& lo, const T& hi, int samples)
{
    using std::cos;
    std::vector<T> out;
    bool in_run = false;
    T worst(0), at(0), first(0), last(0);
    for (int i = 0; i <= samples; ++i) {
        const T x = lo + (hi - lo) * i / samples;
        const T v = p(x) - cos(x);
        if (v > 0) {
            if (!in_run) {
                first = x;
                worst = v;
                at = x;
            } else if (v > worst) {
                worst = v;
                at = x;
            }
            last = x;
            in_run = true;
        }
        if (in_run && (!(v > 0) || i == samples)) {
            out.push_back(at);
            if (first != at)
                out.push_back(first);
            if (last != at)
                out.push_back(last);
            in_run = false;
        }
    }
    return out;
}

template <class T>
struct ReverseLp {
    std::vector<T> contacts;
    int gamma = 2;
    int m = 0; // degree of the free factor q
    T lo, hi;  // Chebyshev window for q
    T n_scale{1};
    Polynomial<T> hermite, node_poly;

    // q's basis at x: node_poly(x) T_k(t) / n_scale
    std::vector<T> basis(const T& x) const
    {
        std::vector<T> v(m + 1);
        const T t = (2 * x - lo - hi) / (hi - lo);
        const T nx = node_poly(x) / n_scale;
        T a(1), b = t;
        for (int k = 0; k <= m; ++k) {
            if (k == 0)
                v[k] = nx;
            else if (k == 1)
                v[k] = nx * t;
            else {
                T c = 2 * t * b - a;
                a = b;
                b = c;
                v[k] = nx * c;
            }
        }
        return v;
    }

    Polynomial<T> assemble(const std::vector<T>& q) const
    {
        // Chebyshev series in t to monomials, then t = alpha x + beta
        std::vector<T> acc(m + 1, T(0)), tkm1(m + 1, T(0)), tk(m + 1, T(0));
        tkm1[0] = 1;
        if (m >= 1)
            tk[1] = 1;
        for (int k = 0; k <= m; ++k) {
            const auto& cur = k == 0 ? tkm1 : tk;
            for (int i = 0; i <= m; ++i)
                acc[i] += q[k] * cur[i];
            if (k >= 1 && k < m) {
                std::vector<T> next(m + 1, T(0));
                for (int i = 0; i < m; ++i)
                    next[i + 1] += 2 * tk[i];
                for (int i = 0; i <= m; ++i)
                    next[i] -= tkm1[i];
                tkm1 = tk;
                tk = next;
            }
        }
        const T alpha = 2 / (hi - lo), beta = -(lo + hi) / (hi - lo);
        Polynomial<T> qx = compose_linear(Polynomial<T>(acc), alpha, beta);
        return hermite + (T(1) / n_scale) * (node_poly * qx);
    }
};

} // namespace detail

template <class T>
ReverseSolution<T> solve_reverse(const ReverseProblemSpec<T>& spec)
{
    using std::abs;
    using std::cos;
    using std::log;
    using std::max;
    using std::min;
    spec.validate();
    const auto& st = spec.state;
    const T f0 = spec.sqrt_f0;
    ReverseSolution<T> sol;

    TurningReport<T> tr = turning_analysis(st, f0, spec.horizon);
    const T tm = tr.tau_min;
    sol.tau_min = tm;
    sol.theta_min = detail::phase_at(st, tm);
    sol.report.delta = tr.delta;
    sol.report.beta = tr.beta;
    sol.report.zeta = tr.zeta;
    sol.report.tau_turn = tr.tau_turn;
    sol.report.epsilon = fidelity(st, T(tm - tr.delta)) - f0;

    // arguments e_j tau - theta(tau) over the validation grid
    const int nv = spec.validation_points;
    std::vector<T> vgrid(nv);
    for (int i = 0; i < nv; ++i)
        vgrid[i] = tm * i / nv;
    PhaseCurve<T> pc = phase_theta(st, vgrid);
    for (const auto& l : st.levels)
        sol.contacts.push_back(l.energy * tm - sol.theta_min);
    std::sort(sol.contacts.begin(), sol.contacts.end());
    T lo = sol.contacts.front(), hi = sol.contacts.back();
    sol.x_max = hi;
    for (int i = 0; i < nv; ++i)
        for (const auto& l : st.levels) {
            T a = l.energy * vgrid[i] - pc.theta[i];
            lo = min(lo, a);
            hi = max(hi, a);
        }
    const T span = max(T(hi - lo), T(1));
    sol.x_min = lo - span / 64;
    sol.x_reach = hi + span / 64;
    sol.x_far = max(sol.x_reach, sol.x_max) + 8 * pi<T>();

    // decay order of Delta_j(tau) = e_j (tau_min - tau) + theta(tau) - theta(tau_min)
    {
        const T d1 = tr.delta / 64, d2 = tr.delta / 8;
        const T th1 = theta_at(st, T(tm - d1)), th2 = theta_at(st, T(tm - d2));
        T gp(-1);
        for (const auto& l : st.levels) {
            T a1 = abs(l.energy * d1 + th1 - sol.theta_min), a2 = abs(l.energy * d2 + th2 - sol.theta_min);
            if (a1 <= quarter_precision_tol<T>() || a2 <= quarter_precision_tol<T>())
                continue;
            T g = log(a2 / a1) / log(T(8));
            if (gp < 0 || g < gp)
                gp = g;
        }
        sol.report.gamma_prime = gp < 0 ? T(1) : gp;
    }
    int gamma = spec.gamma + spec.gamma % 2;
    while (!(gamma * sol.report.gamma_prime > sol.report.beta))
        gamma += 2;
    sol.report.gamma = gamma;

    const int d = static_cast<int>(sol.contacts.size());
    detail::ReverseLp<T> lp;
    lp.contacts = sol.contacts;
    lp.gamma = gamma;
    lp.m = spec.degree - gamma * d;
    if (lp.m < 0)
        throw infeasible_error("reverse problem: degree cap " + std::to_string(spec.degree) + " is below the " +
                               std::to_string(gamma * d) + " Hermite conditions; raise the degree");
    lp.lo = sol.x_min;
    lp.hi = sol.x_far;
    {
        std::vector<HermiteNode<T>> nodes;
        for (const auto& x : sol.contacts)
            nodes.push_back({x, gamma});
        lp.hermite = hermite_interpolate(nodes, shifted_cos(T(0)));
        Polynomial<T> np(std::vector<T>{T(1)});
        for (const auto& x : sol.contacts)
            for (int k = 0; k < gamma; ++k)
                np = np * Polynomial<T>(std::vector<T>{T(-x), T(1)});
        lp.node_poly = np;
    }

    const T m0 = min(T(1), T(sol.report.epsilon)) / 16;
    T gamma_fact(1);
    for (int k = 2; k <= gamma; ++k)
        gamma_fact *= k;

    std::vector<T> cuts;
    // A bump next to an active constraint point g moves halfway to g after
    // each single cut, so cut geometrically between the offender and g.
    auto add_cut = [&](const T& x) {
        T g = sol.approximation_grid.empty() ? x : sol.approximation_grid.front();
        auto closer = [&](const T& y) {
            if (y != x && abs(y - x) < abs(g - x))
                g = y;
        };
        for (const auto& y : sol.approximation_grid)
            closer(y);
        for (const auto& y : sol.extended_grid)
            closer(y);
        cuts.push_back(x);
        if (g == x)
            return;
        T h = x - g;
        for (int k = 1; k <= 12; ++k) {
            h /= 2;
            cuts.push_back(g + h);
            cuts.push_back(g - h);
        }
    };
    int density = spec.grid_density;
    for (int round = 1; round <= spec.max_rounds; ++round) {
        sol.rounds = round;
        sol.grid_density = density;
        sol.approximation_grid.assign(density, T(0));
        for (int i = 0; i < density; ++i)
            sol.approximation_grid[i] = sol.x_min + (sol.x_reach - sol.x_min) * i / (density - 1);
        sol.extended_grid.clear();
        for (int i = 0; i < density; ++i) {
            T c = cos(pi<T>() * (2 * i + 1) / (2 * density));
            sol.extended_grid.push_back(sol.x_reach + (sol.x_far - sol.x_reach) * (1 - c) / 2);
        }
        sol.extended_grid.push_back(sol.x_far);
        for (const auto& x : cuts)
            sol.extended_grid.push_back(x);

        lp.n_scale = 0;
        for (const auto& x : sol.approximation_grid)
            lp.n_scale = max(lp.n_scale, T(abs(lp.node_poly(x))));
        if (!(lp.n_scale > 0))
            lp.n_scale = 1;

        const int nq = lp.m + 1, nvar = nq + 2; // q, sup gap, bound on |q_k|
        std::vector<std::vector<T>> A;
        std::vector<T> b;
        auto push = [&](std::vector<T> row, T rhs) {
            row.resize(nvar, T(0));
            T s = abs(rhs);
            for (const auto& v : row)
                s = max(s, T(abs(v)));
            if (s > 0) {
                for (auto& v : row)
                    v /= s;
                rhs /= s;
            }
            A.push_back(std::move(row));
            b.push_back(rhs);
        };
        auto below_cos = [&](const T& x) {
            auto v = lp.basis(x);
            std::vector<T> row(v.begin(), v.end());
            row.push_back(T(0));
            T room = detail::reverse_margin(x, sol.contacts, m0, gamma);
            // past the window p grows like node_poly; keep room on that scale (q <= -m0 there)
            if (x > sol.x_reach)
                room += m0 * abs(lp.node_poly(x)) / lp.n_scale * min(T(1), T(x - sol.x_reach));
            push(std::move(row), T(cos(x) - lp.hermite(x) - room));
        };
        for (const auto& x : sol.approximation_grid) {
            auto v = lp.basis(x);
            std::vector<T> row(nvar);
            for (int k = 0; k < nq; ++k)
                row[k] = -v[k];
            row[nq] = -1;
            push(std::move(row), T(lp.hermite(x) - cos(x)));
            below_cos(x);
        }
        for (const auto& x : sol.extended_grid)
            below_cos(x);
        {
            // p(x_far) <= -1
            auto v = lp.basis(sol.x_far);
            std::vector<T> row(v.begin(), v.end());
            row.push_back(T(0));
            push(std::move(row), T(-1 - lp.hermite(sol.x_far)));
            // negative leading coefficient
            std::vector<T> lead(nvar, T(0));
            lead[lp.m] = 1;
            push(std::move(lead), T(-quarter_precision_tol<T>()));
            // room at each contact: (cos - p)^(gamma)(x_j) at half the margin's rate
            Polynomial<T> hd = derivative(lp.hermite, gamma);
            for (int j = 0; j < d; ++j) {
                const T x = sol.contacts[j];
                T mj(1), rate(1);
                for (int i = 0; i < d; ++i)
                    if (i != j) {
                        mj *= pow(T(x - sol.contacts[i]), gamma);
                        rate *= pow(min(T(1), T(abs(x - sol.contacts[i]))), gamma);
                    }
                // node_poly vanishes to order gamma at x, leaving gamma! M_j(x) q(x)
                const T t = (2 * x - lp.lo - lp.hi) / (lp.hi - lp.lo);
                std::vector<T> row(nvar, T(0));
                T a(1), bb = t;
                for (int k = 0; k < nq; ++k) {
                    T tk;
                    if (k == 0)
                        tk = 1;
                    else if (k == 1)
                        tk = t;
                    else {
                        tk = 2 * t * bb - a;
                        a = bb;
                        bb = tk;
                    }
                    row[k] = gamma_fact * mj * tk / lp.n_scale;
                }
                const T cosg = (gamma / 2) % 2 == 0 ? T(cos(x)) : T(-cos(x));
                push(std::move(row), T(cosg - hd(x) - gamma_fact * m0 * rate / 2));
            }
        }
        // Only the window enters the objective, so the optimal face is wide and
        // a bare vertex can swing far between extended-grid points. A small
        // weight on max |q_k| picks a tame point of that face.
        for (int k = 0; k < nq; ++k)
            for (int sgn : {1, -1}) {
                std::vector<T> row(nvar, T(0));
                row[k] = sgn;
                row[nq + 1] = -1;
                push(std::move(row), T(0));
            }
        std::vector<T> g(nvar, T(0));
        g[nq] = 1;
        g[nq + 1] = pow2<T>(-20);
        LpResult<T> res = minimize_free(A, b, g);
        sol.lp_pivots += res.pivots;
        if (res.status == LpStatus::infeasible || res.status == LpStatus::unbounded)
            throw infeasible_error("reverse problem: no degree-" + std::to_string(spec.degree) +
                                   " polynomial meets the constraints (S_{n,gamma} empty on the grid); raise the degree");
        if (res.status != LpStatus::optimal)
            throw convergence_error("reverse problem: linear program hit its pivot limit");
        std::vector<T> q(res.x.begin(), res.x.begin() + nq);
        sol.p = lp.assemble(q);
        {
            auto bad = detail::screen_violations(sol.p, sol.x_min, sol.x_far, 32 * density);
            if (!bad.empty() && round < spec.max_rounds) {
                for (const auto& x : bad)
                    add_cut(x);
                continue;
            }
        }
        sol.sup_gap = 0;
        for (const auto& x : sol.approximation_grid)
            sol.sup_gap = max(sol.sup_gap, T(abs(cos(x) - sol.p(x))));

        CertifyOptions<T> co;
        co.lower = sol.x_min;
        co.contacts = sol.contacts;
        sol.certificate = certify_by_subdivision(sol.p, T(0), co);
        if (sol.certificate.verified)
            break;
        if (round == spec.max_rounds)
            throw convergence_error("reverse problem: certification did not pass within " +
                                    std::to_string(spec.max_rounds) + " rounds (" +
                                    to_string(sol.certificate.status) + ")");
        if (sol.certificate.negative_evidence) {
            const auto& w = *sol.certificate.negative_evidence;
            add_cut(w.point);
            cuts.push_back(w.region.lo);
            cuts.push_back(w.region.hi);
        } else {
            density *= 2;
        }
    }
    sol.report.gap_below_epsilon = sol.sup_gap < sol.report.epsilon;

    // tightness and strictness on the validation grid
    sol.tightness_residual = abs(induced_bound_rhs(sol.p, st, tm, sol.theta_min) - f0);
    const T split = tm - tr.delta;
    bool far_seen = false, near_seen = false;
    for (int i = 0; i < nv; ++i) {
        T v = detail::induced_direct(sol.p, st, vgrid[i], pc.theta[i]) - f0;
        if (i % 100 == 0)
            v = induced_bound_rhs(sol.p, st, vgrid[i], pc.theta[i]) - f0;
        if (vgrid[i] <= split) {
            if (!far_seen || v < sol.strictness_margin)
                sol.strictness_margin = v;
            far_seen = true;
        } else {
            if (!near_seen || v < sol.near_margin) {
                sol.near_margin = v;
                sol.near_witness = vgrid[i];
            }
            near_seen = true;
        }
        if (!(v > 0))
            throw strictness_error("reverse problem: induced bound reaches the target at tau = " +
                                       to_decimal(vgrid[i], 12) + " before tau_min",
                                   to_double(vgrid[i]));
    }
    if (!near_seen)
        sol.near_margin = sol.strictness_margin;
    return sol;
}

// Raises the degree cap in steps until a solution passes, or gives up at max_degree.
template <class T>
ReverseSolution<T> solve_reverse_raising(ReverseProblemSpec<T> spec, int max_degree, int step = 4)
{
    for (;;) {
        try {
            return solve_reverse(spec);
        } catch (const infeasible_error&) {
            if (spec.degree + step > max_degree)
                throw;
        } catch (const strictness_error&) {
            if (spec.degree + step > max_degree)
                throw;
        } catch (const convergence_error&) {
            // certification kept finding violations past the grid
            if (spec.degree + step > max_degree)
                throw;
        }
        spec.degree += step;
    }
}

} // namespace qsl
