#include <gtest/gtest.h>

#include <qsl/bounds.hpp>

#include <cmath>
#include <limits>

#include "support.hpp"

using R = qsl::real256;
using R5 = qsl::real512;

namespace {

const qsl::Polynomial<R>& pe()
{
    static const auto p = qsl::convert<R>(qsl::build_pe<R5>(false).p);
    return p;
}

const qsl::CriticalTimes<R>& times()
{
    static const auto ct = qsl::critical_times(qsl::paper_state<R>());
    return ct;
}

qsl::Polynomial<R> quadratic()
{
    return qsl::Polynomial<R>({R(1), R(0), R(-0.5)});
}

// Sign changes and touch points of B(tau) - f on a fine grid, refined by bisection.
std::vector<double> crossings_oracle(const qsl::Polynomial<R>& p, const qsl::MomentVector<R>& m, double f,
                                     double hi, double step = 1e-3)
{
    auto g = [&](double t) { return qsl::to_double(qsl::bound_rhs(p, m, R(t))) - f; };
    std::vector<double> out;
    double a = 0, ga = g(0);
    for (double b = step; b <= hi; b += step) {
        double gb = g(b);
        if ((ga < 0) != (gb < 0)) {
            double lo = a, up = b;
            for (int i = 0; i < 60; ++i) {
                double mid = (lo + up) / 2;
                ((g(mid) < 0) == (ga < 0) ? lo : up) = mid;
            }
            out.push_back((lo + up) / 2);
        }
        a = b;
        ga = gb;
    }
    return out;
}

bool inside(const qsl::IntervalSet<R>& s, const R& t, double slack)
{
    return s.contains(t, R(slack));
}

// every sampled point of a lies in b
void expect_subset(const qsl::IntervalSet<R>& a, const qsl::IntervalSet<R>& b, double slack)
{
    for (const auto& i : a.intervals) {
        const R hi = isinf(i.hi) ? R(i.lo + 50) : i.hi;
        for (int k = 0; k <= 8; ++k) {
            R t = i.lo + (hi - i.lo) * k / 8;
            EXPECT_TRUE(inside(b, t, slack)) << qsl::to_double(t);
        }
    }
}

} // namespace

TEST(BoundRhs, Examples)
{
    auto st = qsl::paper_state<R>();
    auto m = qsl::moments_of(st, R(1), 2, R(0), true);
    EXPECT_EQ(qsl::bound_rhs(qsl::Polynomial<R>({R(1)}), m, R(3.7)), 1);
    // M_2 = 2 (2/15)(1 + 121/25) = 1.55733...
    EXPECT_NEAR(qsl::to_double(qsl::bound_rhs(quadratic(), m, R(1))), 1 - 1.5573333333333333 / 2, 1e-15);
    EXPECT_NEAR(qsl::to_double(qsl::bound_rhs(quadratic(), m, R(1))), 0.2213, 5e-5);

    auto pm = qsl::paper_moments<R>(34);
    EXPECT_LT(qsl::to_double(abs(qsl::bound_rhs(pe(), pm, times().tau_c1))), 1e-30);
}

TEST(BoundRhs, Errors)
{
    auto m = qsl::moments_of(qsl::paper_state<R>(), R(1), 1, R(0), true);
    EXPECT_THROW(qsl::bound_rhs(quadratic(), m, R(1)), qsl::domain_error);
    auto m2 = qsl::moments_of(qsl::paper_state<R>(), R(2), 2, R(0), true);
    EXPECT_THROW(qsl::bound_rhs(quadratic(), m2, R(1)), qsl::domain_error);
    qsl::MomentVector<R> bad;
    bad.values = {R(2), R(1)};
    EXPECT_THROW(bad.validate(), qsl::domain_error);
}

TEST(Moments, PaperMomentsMatchTheState)
{
    auto st = qsl::paper_state<R>();
    auto pm = qsl::paper_moments<R>(34);
    auto sm = qsl::moments_of(st, R(1), 34, R(0), false);
    for (int k = 0; k <= 34; ++k)
        EXPECT_LT(qsl::to_double(abs(pm.values[k] - sm.values[k])), 1e-60 * (1 + qsl::to_double(sm.values[k]))) << k;
}

TEST(Moments, LyapunovForAbsoluteMoments)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 5, -3, 3);
        auto m = qsl::moments_of(st, R(0.5), 12, R(0), true);
        R prev(0);
        for (int k = 1; k <= 12; ++k) {
            R r = R(k) / 2;
            R v = pow(m.values[k], 1 / r);
            EXPECT_GE(v, prev * (1 - R(1e-60)));
            prev = v;
        }
    }
}

TEST(Permissible, PaperMinorantAtZero)
{
    auto pm = qsl::paper_moments<R>(34);
    auto s = qsl::permissible_times(pe(), pm, R(0), R(1000));
    ASSERT_EQ(s.intervals.size(), 2u);
    EXPECT_NEAR(qsl::to_double(s.intervals[0].lo), 9.693, 5e-3);
    EXPECT_NEAR(qsl::to_double(s.intervals[0].hi), 10.138, 5e-3);
    EXPECT_NEAR(qsl::to_double(s.intervals[1].lo), 10.248, 5e-3);
    EXPECT_TRUE(isinf(s.intervals[1].hi));
    EXPECT_LT(qsl::to_double(abs(s.intervals[0].lo - times().tau_c1)), 1e-30);

    auto oracle = crossings_oracle(pe(), pm, 0, 20);
    ASSERT_EQ(oracle.size(), 3u);
    EXPECT_NEAR(qsl::to_double(s.intervals[0].lo), oracle[0], 1e-9);
    EXPECT_NEAR(qsl::to_double(s.intervals[0].hi), oracle[1], 1e-9);
    EXPECT_NEAR(qsl::to_double(s.intervals[1].lo), oracle[2], 1e-9);
    for (const auto& i : s.intervals)
        EXPECT_LT(i.lo_width, R(1e-30));
}

TEST(Permissible, PaperMinorantAtCriticalFidelity)
{
    auto pm = qsl::paper_moments<R>(34);
    auto s = qsl::permissible_times(pe(), pm, times().sqrt_f_c2, R(1000));
    ASSERT_EQ(s.intervals.size(), 2u);
    EXPECT_TRUE(s.intervals[0].degenerate);
    EXPECT_EQ(s.intervals[0].lo, s.intervals[0].hi);
    EXPECT_NEAR(qsl::to_double(s.intervals[0].lo), 4.110, 5e-3);
    EXPECT_LT(qsl::to_double(abs(s.intervals[0].lo - times().tau_c2)), 1e-15);
    EXPECT_NEAR(qsl::to_double(s.intervals[1].lo), 9.519, 5e-3);
    EXPECT_TRUE(isinf(s.intervals[1].hi));
    // the only sign change of B - sqrt(F_c2) below 20
    auto oracle = crossings_oracle(pe(), pm, qsl::to_double(times().sqrt_f_c2), 20);
    ASSERT_EQ(oracle.size(), 1u);
    EXPECT_NEAR(qsl::to_double(s.intervals[1].lo), oracle[0], 1e-9);
}

TEST(Permissible, Quadratic)
{
    auto m = qsl::moments_of(support::two_level<R>(), R(1), 2, R(0), true);
    // 1 - tau^2/4 <= f: tau >= 2 sqrt(1 - f)
    for (double f : {0.0, 0.3, 0.9}) {
        auto s = qsl::permissible_times(quadratic(), m, R(f), R(1000));
        ASSERT_EQ(s.intervals.size(), 1u);
        EXPECT_NEAR(qsl::to_double(s.intervals[0].lo), 2 * std::sqrt(1 - f), 1e-30);
        EXPECT_TRUE(isinf(s.intervals[0].hi));
    }
    // B(tau) <= 1 everywhere, so every time is permissible at f = 1
    auto one = qsl::permissible_times(quadratic(), m, R(1), R(1000));
    ASSERT_EQ(one.intervals.size(), 1u);
    EXPECT_EQ(one.intervals[0].lo, 0);
    EXPECT_TRUE(isinf(one.intervals[0].hi));
}

TEST(Permissible, HorizonAndErrors)
{
    auto m = qsl::moments_of(support::two_level<R>(), R(1), 2, R(0), true);
    EXPECT_TRUE(qsl::permissible_times(quadratic(), m, R(0), R(1)).empty());
    auto clipped = qsl::permissible_times(quadratic(), m, R(0), R(5));
    // the unbounded tail is kept past the horizon
    ASSERT_EQ(clipped.intervals.size(), 1u);
    EXPECT_TRUE(isinf(clipped.intervals[0].hi));
    EXPECT_THROW(qsl::permissible_times(quadratic(), m, R(1.5), R(10)), qsl::domain_error);
    EXPECT_THROW(qsl::permissible_times(quadratic(), m, R(-0.1), R(10)), qsl::domain_error);
}

TEST(Permissible, FractionalScale)
{
    // cos(theta) - a x^b with b = 1/2 against <|E|^(1/2)>
    auto t = qsl::tangent_family(R(0.5), R(0), false);
    auto st = support::two_level<R>();
    auto m = qsl::moments_of(st, R(0.5), 1, R(0), true);
    auto s = qsl::permissible_times(t.p, m, R(0), R(1000));
    ASSERT_EQ(s.intervals.size(), 1u);
    // (1 - a sqrt(tau)/2 = 0)
    const R expect = pow(2 / t.a, 2);
    EXPECT_LT(qsl::to_double(abs(s.intervals[0].lo - expect)), 1e-30);
    EXPECT_LE(s.intervals[0].lo, qsl::pi<R>());
}

TEST(Shift, Examples)
{
    auto st = support::two_level<R>();
    auto single = qsl::tighten_by_shift(st, quadratic(), R(0), {R(0)}, R(1000));
    auto direct = qsl::permissible_times(quadratic(), qsl::moments_of(st, R(1), 2, R(0), true), R(0), R(1000));
    ASSERT_EQ(single.intervals.size(), direct.intervals.size());
    EXPECT_EQ(single.intervals[0].lo, direct.intervals[0].lo);

    auto both = qsl::tighten_by_shift(st, quadratic(), R(0), {R(0), R(-0.5)}, R(1000));
    ASSERT_EQ(both.intervals.size(), 1u);
    EXPECT_LT(qsl::to_double(abs(both.intervals[0].lo - 2 * sqrt(R(2)))), 1e-30);
    expect_subset(both, direct, 0);
    EXPECT_THROW(qsl::tighten_by_shift(st, quadratic(), R(0), {}, R(10)), qsl::domain_error);
}

TEST(Shift, BinomialMatchesShiftedState)
{
    qsl::DiagonalState<R> st{{{R(0.5), R(0.25)}, {R(1), R(0.5)}, {R(2.25), R(0.25)}}};
    auto m = qsl::moments_of(st, R(1), 6, R(0), false);
    for (double a : {0.0, -0.5, 1.0}) {
        auto sm = qsl::shift_moments(m, R(a), R(0.5));
        auto direct = qsl::moments_of(st, R(1), 6, R(a), false);
        for (int k = 0; k <= 6; ++k)
            EXPECT_LT(qsl::to_double(abs(sm.values[k] - direct.values[k])), 1e-60);
    }
    EXPECT_THROW(qsl::shift_moments(m, R(-1), R(0.5)), qsl::domain_error);
    EXPECT_THROW(qsl::shift_moments(qsl::moments_of(st, R(1), 6, R(0), true), R(0), R(0.5)), qsl::domain_error);
}

TEST(Shift, OracleIsShiftInvariantButBoundsAreNot)
{
    std::mt19937_64 rng(32);
    for (int i = 0; i < 10; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 4, -2, 2);
        auto moved = st;
        for (auto& l : moved.levels)
            l.energy += R(0.75);
        auto a = qsl::first_passage(st, R(0.5), R(200));
        auto b = qsl::first_passage(moved, R(0.5), R(200));
        ASSERT_EQ(a.has_value(), b.has_value());
        if (!a)
            continue;
        EXPECT_LT(qsl::to_double(abs(*a - *b)), 1e-40);
        auto m0 = qsl::moments_of(st, R(1), 2, R(0), true);
        auto m1 = qsl::moments_of(moved, R(1), 2, R(0), true);
        EXPECT_NE(m0.values[2], m1.values[2]);
        auto s = qsl::tighten_by_shift(st, quadratic(), R(0.5), {R(-1), R(0), R(0.75), R(1.5)}, R(1000));
        EXPECT_TRUE(s.contains(*a, R(1e-30)));
    }
}

TEST(Scan, PaperMinorantJump)
{
    auto pm = qsl::paper_moments<R>(34);
    std::vector<R> grid;
    for (int i = 0; i <= 40; ++i)
        grid.push_back(R(0.05) + R(0.04) * i / 40);
    auto c = qsl::tau_min_scan(pe(), pm, grid, R(1000), R(5));
    ASSERT_EQ(c.jumps.size(), 1u);
    const auto& j = c.jumps[0];
    EXPECT_GE(j.tau_before, 9.5);
    EXPECT_LE(j.tau_before, 9.7);
    EXPECT_NEAR(qsl::to_double(j.tau_after), 4.110, 5e-3);
    EXPECT_LT(qsl::to_double(abs(j.sqrt_f - times().sqrt_f_c2)), 1e-6);
    for (std::size_t i = 1; i < c.tau_min.size(); ++i)
        EXPECT_LE(c.tau_min[i], c.tau_min[i - 1]);
}

TEST(Scan, FullGrid)
{
    auto pm = qsl::paper_moments<R>(34);
    auto c = qsl::tau_min_scan(pe(), pm, qsl::default_fidelity_grid<R>(), R(1000));
    ASSERT_EQ(c.sqrt_f.size(), 400u);
    EXPECT_EQ(c.tau_min.back(), 0);
    for (std::size_t i = 1; i < c.tau_min.size(); ++i)
        EXPECT_LE(c.tau_min[i], c.tau_min[i - 1]);
    int big = 0;
    for (const auto& j : c.jumps) {
        EXPECT_GT(j.tau_before - j.tau_after, 1);
        if (j.tau_before - j.tau_after >= 5) {
            ++big;
            EXPECT_LT(qsl::to_double(abs(j.sqrt_f - times().sqrt_f_c2)), 1e-6);
        }
    }
    EXPECT_EQ(big, 1);
}

TEST(Scan, QuadraticHasNoJumps)
{
    auto m = qsl::moments_of(support::two_level<R>(), R(1), 2, R(0), true);
    auto c = qsl::tau_min_scan(quadratic(), m, qsl::default_fidelity_grid<R>(100), R(1000));
    EXPECT_TRUE(c.jumps.empty());
    EXPECT_EQ(c.tau_min.back(), 0);
    EXPECT_THROW(qsl::tau_min_scan(quadratic(), m, {R(0.5), R(0.1)}, R(10)), qsl::domain_error);
}

TEST(Classic, MandelstamTamm)
{
    for (double f : {0.0, 0.3, 0.9, 1.0})
        for (double de : {0.5, 1.0, 3.0})
            EXPECT_LT(qsl::to_double(abs(qsl::classic_bound(qsl::ClassicKind::mandelstam_tamm, R(de), R(f)).tau -
                                         acos(R(f)) / de)),
                      1e-70);
    EXPECT_LT(qsl::to_double(abs(qsl::classic_bound(qsl::ClassicKind::mandelstam_tamm, R(1), R(0)).tau -
                                 qsl::half_pi<R>())),
              1e-70);
}

TEST(Classic, MargolusLevitinIsSaturatedByTwoLevelState)
{
    auto ml = qsl::classic_bound(qsl::ClassicKind::margolus_levitin, R(1), R(0));
    EXPECT_NEAR(qsl::to_double(ml.tau), M_PI / 2, 1e-6);
    ASSERT_TRUE(ml.certificate.has_value());
    EXPECT_TRUE(ml.certificate->verified);

    auto st = support::two_level<R>();
    const R mean = qsl::moment(st, R(1));
    auto b = qsl::classic_bound(qsl::ClassicKind::margolus_levitin, mean, R(0));
    auto fp = qsl::first_passage(st, R(0), R(100));
    ASSERT_TRUE(fp.has_value());
    EXPECT_LT(qsl::to_double(abs(*fp - qsl::pi<R>())), 1e-60);
    EXPECT_LT(qsl::to_double(abs(b.tau - *fp)), 1e-9);
    EXPECT_LE(b.tau, *fp + R(1e-9));
}

TEST(Classic, Chau)
{
    // 1 - a x touches cos x at u with a = sin u and 1 - u sin u = cos u
    long double lo = 2, hi = 3;
    for (int i = 0; i < 200; ++i) {
        long double u = (lo + hi) / 2;
        (1 - u * std::sin(u) - std::cos(u) < 0 ? lo : hi) = u;
    }
    const double a = static_cast<double>(std::sin((lo + hi) / 2));
    auto c = qsl::classic_bound(qsl::ClassicKind::chau, R(1), R(0));
    EXPECT_NEAR(qsl::to_double(c.a), a, 1e-15);
    EXPECT_NEAR(qsl::to_double(c.a), 0.7246, 1e-4);
    EXPECT_NEAR(qsl::to_double(c.tau), 1 / a, 1e-12);
    EXPECT_NEAR(qsl::to_double(c.tau), 1.3801, 1e-4);
    EXPECT_EQ(c.theta, 0);
}

TEST(Classic, GeneralizedReducesToKnownCases)
{
    auto g1 = qsl::classic_bound(qsl::ClassicKind::generalized, R(1), R(0), R(1));
    auto ml = qsl::classic_bound(qsl::ClassicKind::margolus_levitin, R(1), R(0));
    EXPECT_LT(qsl::to_double(abs(g1.tau - ml.tau)), 1e-30);
    // b = 2 at theta = 0 is the quadratic 1 - x^2/2: <E^2> tau^2 >= 2
    auto g2 = qsl::classic_bound(qsl::ClassicKind::generalized, R(1), R(0), R(2));
    EXPECT_GE(g2.tau, sqrt(R(2)) * (1 - R(1e-30)));
    for (const auto& t : {g1, g2}) {
        ASSERT_TRUE(t.certificate.has_value());
        EXPECT_TRUE(t.certificate->verified);
    }
}

TEST(Classic, Errors)
{
    EXPECT_THROW(qsl::classic_bound(qsl::ClassicKind::chau, R(0), R(0)), qsl::domain_error);
    EXPECT_THROW(qsl::classic_bound(qsl::ClassicKind::mandelstam_tamm, R(-1), R(0)), qsl::domain_error);
    EXPECT_THROW(qsl::parse_classic_kind("bogus"), qsl::domain_error);
    EXPECT_EQ(qsl::parse_classic_kind("chau"), qsl::ClassicKind::chau);
}

TEST(Equality, PaperState)
{
    auto st = qsl::paper_state<R>();
    auto at_c1 = qsl::equality_conditions(st, pe(), R(0), times().tau_c1);
    EXPECT_TRUE(at_c1.holds);
    ASSERT_EQ(at_c1.level_residuals.size(), 5u);
    for (const auto& r : at_c1.level_residuals)
        EXPECT_LT(qsl::to_double(abs(r)), 1e-30);

    auto at_c2 = qsl::equality_conditions(st, pe(), R(0), times().tau_c2);
    EXPECT_TRUE(at_c2.holds);

    auto half = qsl::equality_conditions(st, pe(), R(0), R(times().tau_c1 / 2));
    EXPECT_FALSE(half.holds);
    double worst = 0;
    for (const auto& r : half.level_residuals)
        worst = std::max(worst, std::abs(qsl::to_double(r)));
    EXPECT_GT(worst, 1e-9);

    // the rotation 22 tau_c1 / 5 exceeds a full turn
    EXPECT_GT(R(22) * times().tau_c1 / 5, qsl::two_pi<R>());
}

TEST(Equality, SingleLevelAndBoundValue)
{
    qsl::DiagonalState<R> one{{{R(0), R(1)}}};
    EXPECT_TRUE(qsl::equality_conditions(one, quadratic(), R(0), R(7)).holds);
    // when equality holds the bound equals sqrt(F)
    auto st = qsl::paper_state<R>();
    auto pm = qsl::paper_moments<R>(34);
    EXPECT_LT(qsl::to_double(abs(qsl::bound_rhs(pe(), pm, times().tau_c2) - times().sqrt_f_c2)), 1e-30);
}

// The oracle first-passage time always lies in the permissible set.
TEST(Property, SoundnessAgainstOracle)
{
    auto line = qsl::tangent_family(R(1), R(0), true);
    ASSERT_TRUE(line.certificate.verified);
    struct Member {
        const char* name;
        qsl::Polynomial<R> p;
    };
    const std::vector<Member> battery = {{"quadratic", quadratic()}, {"tangent line", line.p}, {"p_e", pe()}};
    std::mt19937_64 rng(33);
    const double targets[10] = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.75, 0.9};
    int checked = 0, violations = 0;
    for (int i = 0; i < 100; ++i) {
        auto st = support::random_state<R>(rng, 1 + i % 6, -3, 3);
        for (double f : targets) {
            auto t = qsl::first_passage(st, R(f), R(100));
            if (!t)
                continue;
            for (const auto& m : battery) {
                auto mv = qsl::moments_of(st, m.p.scale(), m.p.degree(), R(0), true);
                auto s = qsl::permissible_times(m.p, mv, R(f), R(1000));
                ++checked;
                if (!s.contains(*t, R(1e-30))) {
                    ++violations;
                    ADD_FAILURE() << m.name << " state " << i << " f " << f << " tau " << qsl::to_double(*t);
                }
            }
        }
    }
    EXPECT_EQ(violations, 0);
    EXPECT_GT(checked, 1000);
}

TEST(Property, MonotoneInTarget)
{
    std::mt19937_64 rng(34);
    const std::vector<qsl::Polynomial<R>> battery = {quadratic(), pe()};
    for (int i = 0; i < 15; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 5, -3, 3);
        for (const auto& p : battery) {
            auto mv = qsl::moments_of(st, R(1), p.degree(), R(0), true);
            qsl::IntervalSet<R> prev;
            bool first = true;
            for (double f : {0.0, 0.1, 0.25, 0.5, 0.8, 1.0}) {
                auto s = qsl::permissible_times(p, mv, R(f), R(100));
                if (!first)
                    expect_subset(prev, s, 1e-20);
                prev = s;
                first = false;
            }
        }
    }
}

// 1 - sqrt(F(t)) = (dE t)^2 / 2 + C t^4 + O(t^6) with C = -mu_4 / 24.
TEST(Property, MandelstamTammSmallTime)
{
    std::mt19937_64 rng(35);
    for (int i = 0; i < 20; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 5, -3, 3);
        const R mean = qsl::moment(st, R(1));
        const R var = qsl::moment(st, R(2), R(-mean));
        const R mu4 = qsl::moment(st, R(4), R(-mean));
        for (double dt : {1e-2, 1e-3}) {
            const R t(dt);
            const R lhs = 1 - qsl::fidelity(st, t);
            const R c = (lhs - var * t * t / 2) / pow(t, 4);
            EXPECT_LE(lhs, var * t * t / 2);
            EXPECT_NEAR(qsl::to_double(c), qsl::to_double(-mu4 / 24), 1e-2 * (1 + qsl::to_double(mu4)));
        }
    }
}
