#pragma once

#include <qsl/evolution.hpp>

#include <random>

namespace support {

// d levels with distinct energies in [lo, hi] (multiples of 1/64 so that
// every run draws the same states) and random positive weights summing to 1.
template <class T>
qsl::DiagonalState<T> random_state(std::mt19937_64& rng, int d, double lo, double hi)
{
    std::uniform_int_distribution<int> e(static_cast<int>(lo * 64), static_cast<int>(hi * 64));
    std::uniform_int_distribution<int> w(1, 1000);
    qsl::DiagonalState<T> st;
    T total(0);
    while (static_cast<int>(st.levels.size()) < d) {
        T x = T(e(rng)) / 64;
        bool fresh = true;
        for (const auto& l : st.levels)
            fresh = fresh && l.energy != x;
        if (!fresh)
            continue;
        T v(w(rng));
        st.levels.push_back({x, v});
        total += v;
    }
    for (auto& l : st.levels)
        l.weight /= total;
    return st;
}

// A random state whose overlap vanishes exactly at some tau* in [1, 4]:
// the last two weights are solved for so that they cancel the others there.
template <class T>
qsl::DiagonalState<T> state_with_zero(std::mt19937_64& rng, int d, double lo, double hi)
{
    using std::abs;
    using std::cos;
    using std::sin;
    std::uniform_int_distribution<int> tz(64, 256);
    for (;;) {
        auto st = random_state<T>(rng, d, lo, hi);
        if (d == 2) {
            for (auto& l : st.levels)
                l.weight = T(0.5);
            return st;
        }
        const T tau = T(tz(rng)) / 64;
        T sr(0), si(0);
        for (int j = 0; j < d - 2; ++j) {
            sr += st.levels[j].weight * cos(st.levels[j].energy * tau);
            si += st.levels[j].weight * sin(st.levels[j].energy * tau);
        }
        const T p1 = st.levels[d - 2].energy * tau, p2 = st.levels[d - 1].energy * tau;
        const T det = sin(p2 - p1);
        if (abs(det) < T(0.1))
            continue;
        const T a = (-sr * sin(p2) + si * cos(p2)) / det;
        const T b = (-si * cos(p1) + sr * sin(p1)) / det;
        if (!(a > T(0.02)) || !(b > T(0.02)))
            continue;
        st.levels[d - 2].weight = a;
        st.levels[d - 1].weight = b;
        T total(0);
        for (const auto& l : st.levels)
            total += l.weight;
        for (auto& l : st.levels)
            l.weight /= total;
        return st;
    }
}

template <class T>
qsl::DiagonalState<T> two_level()
{
    return {{{T(0), T(0.5)}, {T(1), T(0.5)}}};
}

} // namespace support
