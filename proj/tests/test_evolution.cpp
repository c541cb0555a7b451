#include <gtest/gtest.h>

#include <qsl/evolution.hpp>

#include <complex>

#include "support.hpp"

using R = qsl::real256;
using R5 = qsl::real512;

namespace {

// 512-bit values, computed independently and frozen
const char* kTauC1 = "9.69281390675455887124699258758233221934";
const char* kTauC2 = "4.10954764938080940948271588968179974334";
const char* kSqrtFC2 = "0.0682016695541392134501650584857329571869";

double oracle_fidelity(const qsl::DiagonalState<R>& st, double tau)
{
    std::complex<long double> z = 0;
    for (const auto& l : st.levels)
        z += static_cast<long double>(qsl::to_double(l.weight)) *
             std::exp(std::complex<long double>(0, -static_cast<long double>(qsl::to_double(l.energy)) * tau));
    return static_cast<double>(std::abs(z));
}

} // namespace

TEST(Fidelity, OneAtZero)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto st = support::random_state<R>(rng, 1 + i % 6, -3, 3);
        EXPECT_LT(qsl::to_double(abs(qsl::fidelity(st, R(0)) - 1)), 1e-70);
    }
}

TEST(Fidelity, MatchesComplexSum)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> t(0, 50);
    for (int i = 0; i < 50; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 5, -3, 3);
        double tau = t(rng);
        EXPECT_NEAR(qsl::to_double(qsl::fidelity(st, R(tau))), oracle_fidelity(st, tau), 1e-12);
    }
}

TEST(Fidelity, PaperStateCriticalValues)
{
    auto st = qsl::paper_state<R5>();
    R5 c1 = qsl::from_decimal<R5>(kTauC1), c2 = qsl::from_decimal<R5>(kTauC2);
    EXPECT_LT(qsl::to_double(qsl::fidelity(st, c1)), 1e-35);
    EXPECT_NEAR(qsl::to_double(qsl::fidelity(st, c2)), 0.0682, 5e-5);
}

TEST(CriticalTimes, PaperState)
{
    auto ct = qsl::critical_times(qsl::paper_state<R5>());
    EXPECT_LT(qsl::to_double(abs(ct.tau_c1 - qsl::from_decimal<R5>(kTauC1))), 1e-35);
    EXPECT_LT(qsl::to_double(abs(ct.tau_c2 - qsl::from_decimal<R5>(kTauC2))), 1e-35);
    EXPECT_LT(qsl::to_double(abs(ct.sqrt_f_c2 - qsl::from_decimal<R5>(kSqrtFC2))), 1e-35);
    // printed values
    EXPECT_NEAR(qsl::to_double(ct.tau_c1), 9.693, 5e-4);
    EXPECT_NEAR(qsl::to_double(ct.tau_c2), 4.110, 5e-4);
    EXPECT_NEAR(qsl::to_double(ct.sqrt_f_c2), 0.0682, 5e-5);
}

TEST(Moments, Examples)
{
    auto st = qsl::paper_state<R>();
    EXPECT_NEAR(qsl::to_double(qsl::moment(st, R(2), R(0), true)), 4 * (1 + 121.0 / 25) / 15, 1e-15);
    EXPECT_EQ(qsl::moment(st, R(0)), 1);
    EXPECT_EQ(qsl::moment(support::two_level<R>(), R(1)), R(0.5));
    EXPECT_THROW(qsl::moment(st, R(0.5)), qsl::domain_error);
    EXPECT_NO_THROW(qsl::moment(st, R(0.5), R(0), true));
    EXPECT_NO_THROW(qsl::moment(st, R(0.5), R(3)));
    // shifted moments against direct sums
    R direct(0);
    for (const auto& l : st.levels)
        direct += l.weight * pow(l.energy + R(0.25), 3);
    EXPECT_LT(qsl::to_double(abs(qsl::moment(st, R(3), R(0.25)) - direct)), 1e-70);
}

TEST(FirstPassage, Examples)
{
    auto tl = qsl::first_passage(support::two_level<R>(), R(0), R(10));
    ASSERT_TRUE(tl);
    EXPECT_LT(qsl::to_double(abs(*tl - qsl::pi<R>())), 1e-60);

    auto st = qsl::paper_state<R>();
    auto c1 = qsl::first_passage(st, R(0), R(20));
    ASSERT_TRUE(c1);
    EXPECT_NEAR(qsl::to_double(*c1), 9.693, 5e-4);
    auto c2 = qsl::first_passage(st, qsl::from_decimal<R>(kSqrtFC2), R(20));
    ASSERT_TRUE(c2);
    EXPECT_NEAR(qsl::to_double(*c2), 4.10955, 1e-5);

    EXPECT_FALSE(qsl::first_passage(support::two_level<R>(), R(0), R(3)));
    EXPECT_THROW(qsl::first_passage(st, R(0), R(0)), qsl::domain_error);
}

TEST(FirstPassage, IsTheFirstCrossing)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 30; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 5, -3, 3);
        double target = u(rng);
        auto t = qsl::first_passage(st, R(target), R(200));
        if (!t)
            continue;
        EXPECT_NEAR(qsl::to_double(qsl::fidelity(st, *t)), target, 1e-30);
        // nothing below the target on a fine grid before t
        const int n = 4000;
        for (int k = 0; k < n; ++k) {
            double tau = qsl::to_double(*t) * k / n;
            EXPECT_GT(oracle_fidelity(st, tau), target - 1e-12) << "tau " << tau;
        }
    }
}

TEST(Phase, Examples)
{
    auto st = qsl::paper_state<R>();
    auto pc = qsl::phase_theta(st, std::vector<R>{R(0)});
    ASSERT_EQ(pc.theta.size(), 1u);
    EXPECT_EQ(pc.theta[0], 0);

    // one level at E: sqrt(F) cos(E tau - theta) = 1 needs theta = +E tau
    qsl::DiagonalState<R> one{{{R(1.5), R(1)}}};
    std::vector<R> grid;
    for (int i = 0; i <= 40; ++i)
        grid.push_back(R(i) / 4);
    auto p1 = qsl::phase_theta(one, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_LT(qsl::to_double(abs(p1.theta[i] - R(1.5) * grid[i])), 1e-60);

    // +-1 with equal weights: overlap cos(tau) is real and positive before pi/2
    qsl::DiagonalState<R> sym{{{R(-1), R(0.5)}, {R(1), R(0.5)}}};
    std::vector<R> g2;
    for (int i = 0; i < 20; ++i)
        g2.push_back(qsl::half_pi<R>() * i / 20);
    auto p2 = qsl::phase_theta(sym, g2);
    for (const auto& th : p2.theta)
        EXPECT_LT(qsl::to_double(abs(th)), 1e-60);
    EXPECT_LT(qsl::to_double(abs(p2.horizon - qsl::half_pi<R>())), 1e-60);
}

TEST(Phase, ConsistentWithOverlap)
{
    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 5, -3, 3);
        auto z0 = qsl::first_passage(st, R(0), R(100));
        R end = z0 ? R(*z0 * R(0.98)) : R(30);
        std::vector<R> grid;
        for (int k = 0; k <= 400; ++k)
            grid.push_back(end * k / 400);
        qsl::PhaseCurve<R> pc;
        try {
            pc = qsl::phase_theta(st, grid);
        } catch (const qsl::domain_error&) {
            continue; // grid too coarse near a deep minimum; refusing is the contract
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto z = qsl::phase_overlap(st, grid[k]);
            R f = qsl::fidelity(st, grid[k]);
            EXPECT_LT(qsl::to_double(abs(f * cos(pc.theta[k]) - z.re)), 1e-60);
            EXPECT_LT(qsl::to_double(abs(f * sin(pc.theta[k]) - z.im)), 1e-60);
            if (k > 0) {
                EXPECT_LT(qsl::to_double(abs(pc.theta[k] - pc.theta[k - 1])), 3.1416);
            }
            // sqrt(F) = sum w cos(eps tau - theta)
            R s(0);
            for (const auto& l : st.levels)
                s += l.weight * cos(l.energy * grid[k] - pc.theta[k]);
            EXPECT_LT(qsl::to_double(abs(s - f)), 1e-60);
        }
    }
}

TEST(Phase, RefusesToCrossAZero)
{
    auto tl = support::two_level<R>();
    std::vector<R> grid{R(0), R(1), R(2), R(3), R(4)};
    EXPECT_THROW(qsl::phase_theta(tl, grid), qsl::domain_error);
    EXPECT_THROW(qsl::theta_at(tl, R(4)), qsl::domain_error);
}

TEST(Phase, LeftLimitAtZero)
{
    auto tl = support::two_level<R>();
    // overlap conj: (1 + e^{i tau}) / 2 = cos(tau/2) e^{i tau/2}
    EXPECT_LT(qsl::to_double(abs(qsl::theta_left_limit(tl, qsl::pi<R>()) - qsl::half_pi<R>())), 1e-30);
    EXPECT_LT(qsl::to_double(abs(qsl::theta_at(tl, R(1)) - R(0.5))), 1e-60);
}

TEST(Turning, TwoLevel)
{
    auto r = qsl::turning_analysis(support::two_level<R>(), R(0));
    EXPECT_EQ(r.tau_turn, 0);
    EXPECT_EQ(r.epsilon0, 1);
    EXPECT_EQ(r.beta, 1);
    EXPECT_LT(qsl::to_double(abs(r.tau_min - qsl::pi<R>())), 1e-60);
    EXPECT_GT(r.zeta, 0);
    EXPECT_GT(r.delta, 0);
}

TEST(Turning, PaperState)
{
    auto st = qsl::paper_state<R>();
    auto r = qsl::turning_analysis(st, R(0));
    EXPECT_EQ(r.beta, 1);
    // d sqrt(F)/d tau at tau_c1 is nonzero
    EXPECT_NEAR(qsl::to_double(r.tau_min), 9.69281, 1e-5);
    EXPECT_NEAR(qsl::to_double(r.tau_turn), 8.3849, 1e-4);
    EXPECT_NEAR(qsl::to_double(r.epsilon0), 0.0682017, 1e-6);
    EXPECT_LE(r.tau_turn, r.tau_turn_prime);
    EXPECT_LE(r.tau_turn_prime, r.tau_min);
    EXPECT_NEAR(qsl::to_double(qsl::fidelity(st, r.tau_turn_prime)), 0.0682017, 1e-6);
}

TEST(Turning, Invariants)
{
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 0.8);
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
        auto st = support::random_state<R>(rng, 2 + i % 4, -3, 3);
        R target(u(rng));
        if (!qsl::first_passage(st, target, R(200)))
            continue;
        qsl::TurningReport<R> r;
        try {
            r = qsl::turning_analysis(st, target, R(200));
        } catch (const qsl::convergence_error&) {
            continue;
        }
        ++checked;
        EXPECT_GT(r.epsilon0, 0);
        EXPECT_LE(r.tau_turn, r.tau_turn_prime);
        EXPECT_LE(r.tau_turn_prime, r.tau_min);
        // decreasing on [tau_turn, tau_min] and above the envelope near tau_min
        R prev = qsl::fidelity(st, r.tau_turn);
        for (int k = 1; k <= 200; ++k) {
            R t = r.tau_turn + (r.tau_min - r.tau_turn) * k / 200;
            R f = qsl::fidelity(st, t);
            EXPECT_LE(f, prev + R(1e-40));
            prev = f;
        }
        for (int k = 1; k < 100; ++k) {
            R d = r.delta * k / 100;
            R f = qsl::fidelity(st, R(r.tau_min - d));
            EXPECT_GE(f - target, r.zeta * pow(d, r.beta) * R(0.999));
        }
    }
    EXPECT_GT(checked, 10);
}

TEST(Recurrence, IntegerEnergiesArePeriodic)
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> t(0, 20);
    qsl::DiagonalState<R> st{{{R(-2), R(0.25)}, {R(1), R(0.5)}, {R(3), R(0.25)}}};
    for (int i = 0; i < 50; ++i) {
        R tau(t(rng));
        EXPECT_LT(qsl::to_double(abs(qsl::fidelity(st, tau) - qsl::fidelity(st, R(tau + qsl::two_pi<R>())))), 1e-60);
    }
}

TEST(PaperState, MagicStateConstraints)
{
    auto st = qsl::paper_state<R>();
    st.validate();
    EXPECT_EQ(st.levels[0].weight, R(7) / 15);
    EXPECT_LT(qsl::to_double(abs(st.levels[1].weight + st.levels[2].weight - R(4) / 15)), 1e-70);
    EXPECT_LT(qsl::to_double(abs(st.levels[3].weight + st.levels[4].weight - R(4) / 15)), 1e-70);
    EXPECT_GT(R(22) / 5 * qsl::from_decimal<R>(kTauC1), qsl::two_pi<R>());
}

TEST(State, Validation)
{
    qsl::DiagonalState<R> bad{{{R(0), R(0.5)}, {R(0), R(0.5)}}};
    EXPECT_THROW(bad.validate(), qsl::domain_error);
    qsl::DiagonalState<R> unnorm{{{R(0), R(0.5)}, {R(1), R(0.4)}}};
    EXPECT_THROW(unnorm.validate(), qsl::domain_error);
}
