#include <gtest/gtest.h>

#include <qsl/reverse.hpp>
#include <qsl/simplex.hpp>

#include <cmath>

#include "support.hpp"

using R = qsl::real256;

namespace {

using Matrix = std::vector<std::vector<R>>;

qsl::ReverseProblemSpec<R> two_level_spec(int degree)
{
    qsl::ReverseProblemSpec<R> sp;
    sp.state = support::two_level<R>();
    sp.sqrt_f0 = R(0);
    sp.degree = degree;
    sp.gamma = 2;
    return sp;
}

// Independent check of a solution: overlap phase from the complex sum on a
// fine grid, unwrapped step by step, then sum_j w_j p(eps_j tau - theta).
void expect_valid(const qsl::ReverseProblemSpec<R>& sp, const qsl::ReverseSolution<R>& s, int points = 10000)
{
    EXPECT_TRUE(s.certificate.verified) << s.certificate.note;
    EXPECT_LE(s.tightness_residual, R(1e-8));
    auto oracle = qsl::first_passage(sp.state, sp.sqrt_f0, R(1000));
    ASSERT_TRUE(oracle.has_value());
    EXPECT_LT(qsl::to_double(abs(*oracle - s.tau_min)), 1e-30);

    const double tmin = qsl::to_double(s.tau_min);
    double theta = 0, prev = 0;
    double worst = 1e300;
    for (int k = 0; k < points; ++k) {
        const double t = tmin * k / points;
        std::complex<double> z = 0;
        for (const auto& l : sp.state.levels)
            z += qsl::to_double(l.weight) * std::exp(std::complex<double>(0, qsl::to_double(l.energy) * t));
        const double raw = std::arg(z);
        double d = raw - prev;
        d -= 2 * M_PI * std::round(d / (2 * M_PI));
        theta += k == 0 ? raw : d;
        prev = raw;
        R rhs(0);
        for (const auto& l : sp.state.levels)
            rhs += l.weight * s.p(R(l.energy * R(t) - R(theta)));
        worst = std::min(worst, qsl::to_double(rhs - sp.sqrt_f0));
    }
    EXPECT_GT(worst, 0);
    const R at = qsl::induced_bound_rhs(s.p, sp.state, s.tau_min, s.theta_min);
    EXPECT_LT(qsl::to_double(abs(at - sp.sqrt_f0)), 1e-8);
}

} // namespace

TEST(Simplex, SmallPrograms)
{
    // min z with z >= 3
    auto r = qsl::minimize_free<R>({{R(-1)}}, {R(-3)}, {R(1)});
    ASSERT_EQ(r.status, qsl::LpStatus::optimal);
    EXPECT_EQ(r.x[0], 3);

    // max y1 + y2 subject to y1 + 2 y2 = 4, y >= 0: y = (4, 0)
    auto m = qsl::maximize_standard<R>({{R(1), R(2)}}, {R(4)}, {R(1), R(1)});
    ASSERT_EQ(m.status, qsl::LpStatus::optimal);
    EXPECT_EQ(m.objective, 4);

    EXPECT_EQ(qsl::minimize_free<R>({{R(1)}, {R(-1)}}, {R(1), R(-2)}, {R(1)}).status, qsl::LpStatus::infeasible);
    EXPECT_EQ(qsl::minimize_free<R>({{R(1)}}, {R(1)}, {R(1)}).status, qsl::LpStatus::unbounded);
    EXPECT_THROW(qsl::minimize_free<R>({{R(1), R(2)}}, {R(1)}, {R(1)}), qsl::domain_error);
}

TEST(Simplex, MinimaxLineFit)
{
    // best uniform fit of x^2 by a + b x on [0, 1]: a = -1/8, b = 1, error 1/8
    Matrix A;
    std::vector<R> rhs;
    for (int i = 0; i <= 64; ++i) {
        R x = R(i) / 64;
        A.push_back({R(1), x, R(-1)});
        rhs.push_back(x * x);
        A.push_back({R(-1), R(-x), R(-1)});
        rhs.push_back(-x * x);
    }
    auto r = qsl::minimize_free(A, rhs, {R(0), R(0), R(1)});
    ASSERT_EQ(r.status, qsl::LpStatus::optimal);
    EXPECT_LT(qsl::to_double(abs(r.x[0] + R(0.125))), 1e-60);
    EXPECT_LT(qsl::to_double(abs(r.x[1] - 1)), 1e-60);
    EXPECT_LT(qsl::to_double(abs(r.objective - R(0.125))), 1e-60);
}

TEST(Induced, TrivialCases)
{
    auto st = qsl::paper_state<R>();
    qsl::Polynomial<R> one({R(1)});
    for (double t : {0.0, 1.0, 3.3})
        EXPECT_LT(qsl::to_double(abs(qsl::induced_bound_rhs(one, st, R(t)) - 1)), 1e-60);
    qsl::Polynomial<R> p({R(0.75), R(0.5), R(-0.25), R(0.125)});
    EXPECT_LT(qsl::to_double(abs(qsl::induced_bound_rhs(p, st, R(0)) - R(0.75))), 1e-70);
}

TEST(Induced, BinomialAgreesWithDirect)
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> c(-1, 1), t(0, 5), th(-4, 4);
    for (int i = 0; i < 200; ++i) {
        auto st = support::random_state<R>(rng, 1 + i % 6, -3, 3);
        std::vector<R> coeffs;
        for (int k = 0; k <= 2 + i % 15; ++k)
            coeffs.push_back(R(c(rng)) / (k + 1));
        qsl::Polynomial<R> p(coeffs);
        const R tau(t(rng)), theta(th(rng));
        R mag;
        const R b = qsl::detail::induced_binomial(p, st, tau, theta, mag);
        const R d = qsl::detail::induced_direct(p, st, tau, theta);
        EXPECT_LE(abs(b - d), qsl::half_precision_tol<R>() * (1 + mag));
    }
}

TEST(Reverse, TwoLevelState)
{
    auto sp = two_level_spec(8);
    auto s = qsl::solve_reverse(sp);
    EXPECT_LT(qsl::to_double(abs(s.tau_min - qsl::pi<R>())), 1e-60);
    EXPECT_GT(s.strictness_margin, 0);
    EXPECT_LE(s.p.degree(), 8);
    EXPECT_LT(s.p.leading(), 0);
    // contacts at eps_j tau_min - theta = -pi/2 and pi/2
    ASSERT_EQ(s.contacts.size(), 2u);
    for (const auto& x : s.contacts)
        EXPECT_LT(qsl::to_double(abs(abs(x) - qsl::half_pi<R>())), 1e-40);
    EXPECT_LE(s.x_min, s.contacts.front());
    EXPECT_GE(s.x_max, s.contacts.back());
    expect_valid(sp, s);
}

TEST(Reverse, PaperStateAtCriticalFidelity)
{
    qsl::ReverseProblemSpec<R> sp;
    sp.state = qsl::paper_state<R>();
    const auto ct = qsl::critical_times(sp.state);
    sp.sqrt_f0 = ct.sqrt_f_c2;
    sp.degree = 32;
    auto s = qsl::solve_reverse(sp);
    EXPECT_LT(qsl::to_double(abs(s.tau_min - ct.tau_c2)), 1e-30);
    EXPECT_GE(s.report.gamma * s.report.gamma_prime, R(s.report.beta));
    expect_valid(sp, s);
}

TEST(Reverse, RandomStates)
{
    std::mt19937_64 rng(42);
    for (int i = 0; i < 4; ++i) {
        qsl::ReverseProblemSpec<R> sp;
        sp.state = support::state_with_zero<R>(rng, 2 + i % 3, -2, 2);
        sp.sqrt_f0 = R(i % 2 ? 0.3 : 0);
        sp.degree = 12;
        auto s = qsl::solve_reverse_raising(sp, 48);
        expect_valid(sp, s);
    }
}

TEST(Reverse, RaisingRecoversFromExhaustedCertification)
{
    qsl::ReverseProblemSpec<R> sp;
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20; ++i)
        sp.state = support::state_with_zero<R>(rng, 2 + i % 4, -2, 2);
    sp.sqrt_f0 = R(0);
    sp.degree = 24;
    sp.max_rounds = 3;
    EXPECT_THROW(qsl::solve_reverse(sp), qsl::convergence_error);
    auto s = qsl::solve_reverse_raising(sp, 40);
    EXPECT_GT(s.p.degree(), 24);
    expect_valid(sp, s);
}

TEST(Reverse, MidpointOfTwoSolutionsIsFeasible)
{
    auto sp = two_level_spec(16);
    auto a = qsl::solve_reverse(sp);
    sp.degree = 20;
    auto b = qsl::solve_reverse(sp);
    std::vector<R> c(std::max(a.p.size(), b.p.size()), R(0));
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = ((k < a.p.size() ? a.p[k] : R(0)) + (k < b.p.size() ? b.p[k] : R(0))) / 2;
    qsl::Polynomial<R> mid(c);
    // the contact equalities are linear, so they survive averaging
    for (const auto& x : a.contacts) {
        EXPECT_LT(qsl::to_double(abs(mid(x) - cos(x))), 1e-50);
        EXPECT_LT(qsl::to_double(abs(qsl::derivative(mid)(x) + sin(x))), 1e-50);
    }
    for (const auto& x : a.extended_grid)
        EXPECT_LE(mid(x), cos(x));
    EXPECT_LE(mid(a.x_far), -1);
    qsl::CertifyOptions<R> co;
    co.lower = a.x_min;
    co.contacts = a.contacts;
    EXPECT_TRUE(qsl::certify_by_subdivision(mid, R(0), co).verified);
}

TEST(Reverse, GapDoesNotGrowWithDegree)
{
    auto sp = two_level_spec(8);
    R prev(1e9);
    for (int n : {8, 12, 16, 20}) {
        sp.degree = n;
        auto s = qsl::solve_reverse(sp);
        EXPECT_LE(s.sup_gap, prev) << n;
        prev = s.sup_gap;
    }
}

TEST(Reverse, Errors)
{
    auto sp = two_level_spec(8);
    sp.gamma = 1;
    EXPECT_THROW(qsl::solve_reverse(sp), qsl::domain_error);
    sp = two_level_spec(8);
    sp.sqrt_f0 = R(1);
    EXPECT_THROW(qsl::solve_reverse(sp), qsl::domain_error);
    // a single level never loses fidelity
    sp = two_level_spec(8);
    sp.state = {{{R(1), R(1)}}};
    sp.sqrt_f0 = R(0.5);
    EXPECT_THROW(qsl::solve_reverse(sp), qsl::error);
    // too low a degree for two order-2 contacts and the far-field conditions
    sp = two_level_spec(3);
    EXPECT_THROW(qsl::solve_reverse(sp), qsl::infeasible_error);
}
