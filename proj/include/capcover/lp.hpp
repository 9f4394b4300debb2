#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "capcover/core.hpp"

namespace capcover {

enum class Rel { Le, Eq, Ge };

struct LpRow {
    std::vector<double> coeffs;
    Rel rel = Rel::Le;
    double rhs = 0.0;
};

// min c.x subject to rows and box bounds lo <= x <= hi, lo >= 0.
struct LpProblem {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lo;  // defaults to 0
    std::vector<double> hi;  // +inf allowed

    int num_vars() const { return static_cast<int>(objective.size()); }

    static LpProblem with_vars(int n) {
        LpProblem lp;
        lp.objective.assign(n, 0.0);
        lp.lo.assign(n, 0.0);
        lp.hi.assign(n, std::numeric_limits<double>::infinity());
        return lp;
    }
    void add_row(std::vector<double> coeffs, Rel rel, double rhs) {
        if (static_cast<int>(coeffs.size()) != num_vars())
            throw input_error("lp row arity mismatch");
        rows.push_back({std::move(coeffs), rel, rhs});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    std::vector<double> assignment;
    std::vector<int> basis;  // structural variables currently basic
};

namespace detail {

inline constexpr double kPivotTol = 1e-9;
inline constexpr long long kMaxPivots = 1'000'000;

struct Tableau {
    int cols = 0;  // excluding rhs
    std::vector<std::vector<double>> t;
    std::vector<int> basis;
    std::vector<double> z;  // reduced costs, z[cols] = -objective
    bool bland = false;
    int degenerate_run = 0;
    long long pivots = 0;

    double rhs(int r) const { return t[r][cols]; }

    void pivot(int r, int e) {
        auto& row = t[r];
        const double p = row[e];
        for (double& v : row) v /= p;
        row[e] = 1.0;
        for (size_t r2 = 0; r2 < t.size(); ++r2) {
            if (static_cast<int>(r2) == r) continue;
            double f = t[r2][e];
            if (std::abs(f) < 1e-13) continue;
            auto& dst = t[r2];
            for (int j = 0; j <= cols; ++j) dst[j] -= f * row[j];
            dst[e] = 0.0;
        }
        double fz = z[e];
        if (std::abs(fz) > 0.0) {
            for (int j = 0; j <= cols; ++j) z[j] -= fz * row[j];
            z[e] = 0.0;
        }
        basis[r] = e;
        ++pivots;
    }

    // Returns true when an optimum of the current objective was reached,
    // false on unbounded. Columns with banned[j] set never enter.
    bool iterate(const std::vector<char>& banned) {
        for (;;) {
            if (pivots > kMaxPivots)
                throw numerical_error("simplex: pivot cap exceeded");
            int enter = -1;
            if (!bland) {
                double best = -kPivotTol;
                for (int j = 0; j < cols; ++j)
                    if (!banned[j] && z[j] < best) {
                        best = z[j];
                        enter = j;
                    }
            } else {
                for (int j = 0; j < cols; ++j)
                    if (!banned[j] && z[j] < -kPivotTol) {
                        enter = j;
                        break;
                    }
            }
            if (enter < 0) return true;

            int leave = -1;
            double best_ratio = 0.0;
            for (size_t r = 0; r < t.size(); ++r) {
                double a = t[r][enter];
                if (a <= kPivotTol) continue;
                double ratio = rhs(r) / a;
                if (leave < 0 || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basis[r] < basis[leave])) {
                    leave = static_cast<int>(r);
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return false;
            // Anti-cycling: once a run of degenerate pivots stalls the
            // objective, fall back to Bland's rule until it moves again.
            if (best_ratio <= kPivotTol) {
                if (++degenerate_run >= 24) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
            pivot(leave, enter);
        }
    }
};

}  // namespace detail

// Two-phase dense tableau simplex. Finite upper bounds become explicit
// rows; lower bounds are shifted out. Deterministic: largest-coefficient
// entering rule until the first degenerate pivot, Bland's rule after.
inline LpSolution simplex_solve(const LpProblem& lp, double feas_tol = kLpFeasTol) {
    const int n = lp.num_vars();
    const double inf = std::numeric_limits<double>::infinity();

    for (int v = 0; v < n; ++v)
        if (lp.lo[v] < 0) throw input_error("simplex: negative lower bound");

    struct NormRow {
        std::vector<double> a;
        Rel rel;
        double b;
    };
    std::vector<NormRow> rows;
    rows.reserve(lp.rows.size() + n);
    for (const auto& r : lp.rows) {
        double b = r.rhs;
        for (int v = 0; v < n; ++v) b -= r.coeffs[v] * lp.lo[v];
        rows.push_back({r.coeffs, r.rel, b});
    }
    for (int v = 0; v < n; ++v)
        if (lp.hi[v] < inf) {
            std::vector<double> a(n, 0.0);
            a[v] = 1.0;
            rows.push_back({std::move(a), Rel::Le, lp.hi[v] - lp.lo[v]});
        }
    for (auto& r : rows)
        if (r.b < 0) {
            for (double& x : r.a) x = -x;
            r.b = -r.b;
            r.rel = r.rel == Rel::Le ? Rel::Ge : (r.rel == Rel::Ge ? Rel::Le : Rel::Eq);
        }

    const int nrows = static_cast<int>(rows.size());
    int nslack = 0, nart = 0;
    for (const auto& r : rows) {
        if (r.rel != Rel::Eq) ++nslack;
        if (r.rel != Rel::Le) ++nart;
    }
    const int cols = n + nslack + nart;

    detail::Tableau tab;
    tab.cols = cols;
    tab.t.assign(nrows, std::vector<double>(cols + 1, 0.0));
    tab.basis.assign(nrows, -1);
    std::vector<char> is_art(cols, 0);

    int scol = n, acol = n + nslack;
    for (int r = 0; r < nrows; ++r) {
        auto& row = tab.t[r];
        for (int v = 0; v < n; ++v) row[v] = rows[r].a[v];
        row[cols] = rows[r].b;
        switch (rows[r].rel) {
            case Rel::Le:
                row[scol] = 1.0;
                tab.basis[r] = scol++;
                break;
            case Rel::Ge:
                row[scol] = -1.0;
                ++scol;
                row[acol] = 1.0;
                is_art[acol] = 1;
                tab.basis[r] = acol++;
                break;
            case Rel::Eq:
                row[acol] = 1.0;
                is_art[acol] = 1;
                tab.basis[r] = acol++;
                break;
        }
    }

    LpSolution sol;
    std::vector<char> banned(cols, 0);

    // Phase 1: minimize the artificial sum.
    if (nart > 0) {
        tab.z.assign(cols + 1, 0.0);
        for (int j = 0; j < cols; ++j) tab.z[j] = is_art[j] ? 1.0 : 0.0;
        for (int r = 0; r < nrows; ++r)
            if (is_art[tab.basis[r]])
                for (int j = 0; j <= cols; ++j) tab.z[j] -= tab.t[r][j];
        tab.iterate(banned);
        if (-tab.z[cols] > feas_tol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Pivot lingering artificials out; drop dependent rows.
        for (int r = nrows - 1; r >= 0; --r) {
            if (!is_art[tab.basis[r]]) continue;
            int enter = -1;
            for (int j = 0; j < cols && enter < 0; ++j)
                if (!is_art[j] && std::abs(tab.t[r][j]) > detail::kPivotTol) enter = j;
            if (enter >= 0) {
                tab.pivot(r, enter);
            } else {
                tab.t.erase(tab.t.begin() + r);
                tab.basis.erase(tab.basis.begin() + r);
            }
        }
        for (int j = 0; j < cols; ++j)
            if (is_art[j]) banned[j] = 1;
    }

    // Phase 2.
    tab.z.assign(cols + 1, 0.0);
    for (int v = 0; v < n; ++v) tab.z[v] = lp.objective[v];
    for (size_t r = 0; r < tab.t.size(); ++r) {
        int b = tab.basis[r];
        if (b < n && std::abs(lp.objective[b]) > 0.0) {
            double f = lp.objective[b];
            for (int j = 0; j <= cols; ++j) tab.z[j] -= f * tab.t[r][j];
        }
    }
    if (!tab.iterate(banned)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.assignment.assign(n, 0.0);
    for (size_t r = 0; r < tab.t.size(); ++r) {
        int b = tab.basis[r];
        if (b < n) {
            sol.assignment[b] = tab.rhs(r);
            sol.basis.push_back(b);
        }
    }
    std::sort(sol.basis.begin(), sol.basis.end());
    for (int v = 0; v < n; ++v) sol.assignment[v] += lp.lo[v];
    sol.value = 0.0;
    for (int v = 0; v < n; ++v) sol.value += lp.objective[v] * sol.assignment[v];

    // Residual audit; a violation here means the tableau drifted.
    for (const auto& r : lp.rows) {
        double lhs = 0.0;
        for (int v = 0; v < n; ++v) lhs += r.coeffs[v] * sol.assignment[v];
        double gap = r.rel == Rel::Le ? lhs - r.rhs : (r.rel == Rel::Ge ? r.rhs - lhs : std::abs(lhs - r.rhs));
        if (gap > feas_tol * std::max(1.0, std::abs(r.rhs)) + feas_tol)
            throw numerical_error("simplex: optimal point violates a row");
    }
    for (int v = 0; v < n; ++v)
        if (sol.assignment[v] < lp.lo[v] - feas_tol ||
            sol.assignment[v] > lp.hi[v] + feas_tol)
            throw numerical_error("simplex: optimal point violates a bound");
    return sol;
}

struct OracleResult {
    bool feasible = false;
    double value = 0.0;
};

// Exhaustive basic-point enumeration for tiny LPs. Every square system of
// active constraints (rows plus bounds) is solved and filtered for
// feasibility; independent of the simplex path by construction.
inline OracleResult vertex_enum_oracle(const LpProblem& lp) {
    const int n = lp.num_vars();
    const double inf = std::numeric_limits<double>::infinity();

    struct Con {
        std::vector<double> a;
        double b;
        Rel rel;
    };
    std::vector<Con> pool;
    for (const auto& r : lp.rows) pool.push_back({r.coeffs, r.rhs, r.rel});
    for (int v = 0; v < n; ++v) {
        std::vector<double> a(n, 0.0);
        a[v] = 1.0;
        pool.push_back({a, lp.lo[v], Rel::Ge});
        if (lp.hi[v] < inf) {
            std::vector<double> a2(n, 0.0);
            a2[v] = 1.0;
            pool.push_back({std::move(a2), lp.hi[v], Rel::Le});
        }
    }
    const int p = static_cast<int>(pool.size());
    if (n > 12 || p > 16) throw input_error("vertex oracle: size cap exceeded");
    if (p < n) return {};

    OracleResult best;
    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;

    auto feasible_point = [&](const std::vector<double>& x) {
        for (const auto& c : pool) {
            double lhs = 0.0;
            for (int v = 0; v < n; ++v) lhs += c.a[v] * x[v];
            if (c.rel == Rel::Le && lhs > c.b + kLpFeasTol) return false;
            if (c.rel == Rel::Ge && lhs < c.b - kLpFeasTol) return false;
            if (c.rel == Rel::Eq && std::abs(lhs - c.b) > kLpFeasTol) return false;
        }
        return true;
    };

    for (;;) {
        // Solve the active square system by Gaussian elimination.
        std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
        for (int i = 0; i < n; ++i) {
            for (int v = 0; v < n; ++v) m[i][v] = pool[pick[i]].a[v];
            m[i][n] = pool[pick[i]].b;
        }
        bool singular = false;
        for (int col = 0; col < n && !singular; ++col) {
            int piv = -1;
            double bestmag = 1e-9;
            for (int r = col; r < n; ++r)
                if (std::abs(m[r][col]) > bestmag) {
                    bestmag = std::abs(m[r][col]);
                    piv = r;
                }
            if (piv < 0) {
                singular = true;
                break;
            }
            std::swap(m[col], m[piv]);
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                double f = m[r][col] / m[col][col];
                if (f == 0.0) continue;
                for (int j = col; j <= n; ++j) m[r][j] -= f * m[col][j];
            }
        }
        if (!singular) {
            std::vector<double> x(n);
            for (int v = 0; v < n; ++v) x[v] = m[v][n] / m[v][v];
            bool finite = true;
            for (double xv : x)
                if (!std::isfinite(xv)) finite = false;
            if (finite && feasible_point(x)) {
                double val = 0.0;
                for (int v = 0; v < n; ++v) val += lp.objective[v] * x[v];
                if (!best.feasible || val < best.value) {
                    best.feasible = true;
                    best.value = val;
                }
            }
        }
        // Next combination.
        int i = n - 1;
        while (i >= 0 && pick[i] == p - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

}  // namespace capcover
