#pragma once

#include <cstddef>
#include <vector>

#include "error.hpp"
#include "real.hpp"

namespace qsl {

enum class LpStatus { optimal, infeasible, unbounded, pivot_limit };

inline const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    default: return "pivot_limit";
    }
}

template <class T>
struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<T> x;
    T objective{0};
    long pivots = 0;
};

namespace detail {

// Dense tableau for max c.y, M y = r, y >= 0, with one artificial column
// per row. Entering column: largest reduced cost, lowest index on ties;
// after a run of degenerate pivots the rule falls back to Bland's.
template <class T>
class Tableau {
public:
    Tableau(const std::vector<std::vector<T>>& M, const std::vector<T>& r, T tol)
        : m_(M.size()), n_(M.empty() ? 0 : M[0].size()), tol_(tol)
    {
        width_ = n_ + m_ + 1;
        a_.assign(m_, std::vector<T>(width_, T(0)));
        sign_.assign(m_, 1);
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            sign_[i] = r[i] < 0 ? -1 : 1;
            for (std::size_t j = 0; j < n_; ++j)
                a_[i][j] = sign_[i] * M[i][j];
            a_[i][n_ + i] = 1;
            a_[i][width_ - 1] = sign_[i] * r[i];
            basis_[i] = n_ + i;
        }
    }

    // Phase I then II; returns the status and fills y and the multipliers.
    LpStatus solve(const std::vector<T>& c, long max_pivots, std::vector<T>& y, std::vector<T>& pi, T& value,
                   long& pivots)
    {
        pivots = 0;
        std::vector<T> cost1(width_ - 1, T(0));
        for (std::size_t i = 0; i < m_; ++i)
            cost1[n_ + i] = -1;
        LpStatus st = run(cost1, width_ - 1, max_pivots, pivots);
        if (st == LpStatus::pivot_limit)
            return st;
        if (-objective_value() > tol_ * (1 + rhs_scale()))
            return LpStatus::infeasible;
        drive_out_artificials();
        std::vector<T> cost2(width_ - 1, T(0));
        for (std::size_t j = 0; j < n_; ++j)
            cost2[j] = c[j];
        st = run(cost2, n_, max_pivots, pivots);
        if (st != LpStatus::optimal)
            return st;
        y.assign(n_, T(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_)
                y[basis_[i]] = a_[i][width_ - 1];
        pi.assign(m_, T(0));
        for (std::size_t i = 0; i < m_; ++i)
            pi[i] = -sign_[i] * red_[n_ + i];
        value = objective_value();
        return LpStatus::optimal;
    }

private:
    T rhs_scale() const
    {
        using std::abs;
        T s(0);
        for (std::size_t i = 0; i < m_; ++i)
            s = std::max(s, T(abs(a_[i][width_ - 1])));
        return s;
    }

    T objective_value() const
    {
        T v(0);
        for (std::size_t i = 0; i < m_; ++i)
            v += cost_[basis_[i]] * a_[i][width_ - 1];
        return v;
    }

    void price(const std::vector<T>& cost)
    {
        cost_ = cost;
        red_ = cost;
        red_.push_back(T(0));
        for (std::size_t i = 0; i < m_; ++i) {
            const T cb = cost[basis_[i]];
            if (cb == 0)
                continue;
            for (std::size_t j = 0; j < width_; ++j)
                red_[j] -= cb * a_[i][j];
        }
    }

    void pivot(std::size_t row, std::size_t col)
    {
        auto& pr = a_[row];
        const T inv = 1 / pr[col];
        for (auto& v : pr)
            v *= inv;
        pr[col] = 1;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || a_[i][col] == 0)
                continue;
            const T f = a_[i][col];
            for (std::size_t j = 0; j < width_; ++j)
                if (pr[j] != 0)
                    a_[i][j] -= f * pr[j];
            a_[i][col] = 0;
        }
        const T f = red_[col];
        if (f != 0) {
            for (std::size_t j = 0; j < width_; ++j)
                if (pr[j] != 0)
                    red_[j] -= f * pr[j];
            red_[col] = 0;
        }
        basis_[row] = col;
    }

    // columns >= limit never enter
    LpStatus run(const std::vector<T>& cost, std::size_t limit, long max_pivots, long& pivots)
    {
        price(cost);
        int degenerate = 0;
        for (;;) {
            const bool bland = degenerate > 50;
            std::size_t col = limit;
            T best = tol_;
            for (std::size_t j = 0; j < limit; ++j) {
                if (red_[j] > best) {
                    col = j;
                    if (bland)
                        break;
                    best = red_[j];
                }
            }
            if (col == limit)
                return LpStatus::optimal;
            std::size_t row = m_;
            T ratio(0);
            for (std::size_t i = 0; i < m_; ++i) {
                if (!(a_[i][col] > tol_))
                    continue;
                T q = a_[i][width_ - 1] / a_[i][col];
                if (row == m_ || q < ratio || (q == ratio && basis_[i] < basis_[row])) {
                    row = i;
                    ratio = q;
                }
            }
            if (row == m_)
                return LpStatus::unbounded;
            if (++pivots > max_pivots)
                return LpStatus::pivot_limit;
            degenerate = ratio <= tol_ ? degenerate + 1 : 0;
            pivot(row, col);
        }
    }

    void drive_out_artificials()
    {
        using std::abs;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_)
                continue;
            std::size_t col = n_;
            T best = tol_;
            for (std::size_t j = 0; j < n_; ++j)
                if (abs(a_[i][j]) > best) {
                    best = abs(a_[i][j]);
                    col = j;
                }
            if (col < n_)
                pivot(i, col);
            // otherwise the row is redundant and its artificial stays at zero
        }
    }

    std::size_t m_, n_, width_;
    T tol_;
    std::vector<std::vector<T>> a_;
    std::vector<int> sign_;
    std::vector<std::size_t> basis_;
    std::vector<T> cost_, red_;
};

} // namespace detail

// max c.y subject to M y = r, y >= 0. On success x holds y.
template <class T>
LpResult<T> maximize_standard(const std::vector<std::vector<T>>& M, const std::vector<T>& r, const std::vector<T>& c,
                              long max_pivots = 200000)
{
    LpResult<T> out;
    detail::Tableau<T> tab(M, r, pow2<T>(-precision_bits<T>() / 2));
    std::vector<T> pi;
    out.status = tab.solve(c, max_pivots, out.x, pi, out.objective, out.pivots);
    return out;
}

// min g.z subject to A z <= b with z free. Solved through the dual
// max -b.y, A^T y = -g, y >= 0; z is minus the final simplex multipliers.
// Rows of A should be scaled to comparable size by the caller.
template <class T>
LpResult<T> minimize_free(const std::vector<std::vector<T>>& A, const std::vector<T>& b, const std::vector<T>& g,
                          long max_pivots = 200000)
{
    const std::size_t rows = A.size(), vars = g.size();
    for (const auto& a : A)
        if (a.size() != vars)
            throw domain_error("constraint row has the wrong length");
    if (b.size() != rows)
        throw domain_error("right-hand side has the wrong length");
    std::vector<std::vector<T>> M(vars, std::vector<T>(rows));
    std::vector<T> r(vars), c(rows);
    for (std::size_t k = 0; k < vars; ++k) {
        r[k] = -g[k];
        for (std::size_t i = 0; i < rows; ++i)
            M[k][i] = A[i][k];
    }
    for (std::size_t i = 0; i < rows; ++i)
        c[i] = -b[i];
    detail::Tableau<T> tab(M, r, pow2<T>(-precision_bits<T>() / 2));
    std::vector<T> y, pi;
    LpResult<T> out;
    T dual_value(0);
    LpStatus st = tab.solve(c, max_pivots, y, pi, dual_value, out.pivots);
    // dual infeasible: the primal is unbounded or infeasible; dual unbounded: primal infeasible
    if (st == LpStatus::infeasible)
        st = LpStatus::unbounded;
    else if (st == LpStatus::unbounded)
        st = LpStatus::infeasible;
    out.status = st;
    if (st != LpStatus::optimal)
        return out;
    out.x.resize(vars);
    for (std::size_t k = 0; k < vars; ++k)
        out.x[k] = -pi[k];
    out.objective = 0;
    for (std::size_t k = 0; k < vars; ++k)
        out.objective += g[k] * out.x[k];
    return out;
}

} // namespace qsl
