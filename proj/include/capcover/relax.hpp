#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "capcover/core.hpp"
#include "capcover/instance.hpp"
#include "capcover/lp.hpp"

namespace capcover {

// Fractional covering solution: flow x (ball x point, dense) and
// openness y. stage_slack[i] tracks how far ball i may currently serve,
// as a multiple of its radius (1 initially, raised by preprocessing).
struct FractionalSolution {
    int n = 0, m = 0;
    std::vector<double> x;  // m*n row-major
    std::vector<double> y;
    std::vector<double> stage_slack;
    double lp_value = 0.0;

    static FractionalSolution zeros(int m_, int n_) {
        FractionalSolution f;
        f.n = n_;
        f.m = m_;
        f.x.assign(static_cast<size_t>(m_) * n_, 0.0);
        f.y.assign(m_, 0.0);
        f.stage_slack.assign(m_, 1.0);
        return f;
    }
    double& xat(int ball, int point) { return x[static_cast<size_t>(ball) * n + point]; }
    double xat(int ball, int point) const { return x[static_cast<size_t>(ball) * n + point]; }

    double outflow(int ball) const {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += xat(ball, j);
        return s;
    }
    double inflow(int point) const {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += xat(i, point);
        return s;
    }
    double cost() const {
        double s = 0.0;
        for (double v : y) s += v;
        return s;
    }
    std::vector<int> served_points(int ball, double tol = kTol) const {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if (xat(ball, j) > tol) out.push_back(j);
        return out;
    }
};

struct MmccLp {
    LpProblem lp;
    // Variable map: y_i is variable i; x-pairs follow.
    std::vector<std::pair<int, int>> pairs;          // var index - m -> (ball, point)
    std::vector<std::vector<int>> pair_var_of_ball;  // x-var indices per ball
};

// The covering relaxation: one y per ball, one x per (ball, point) pair
// with the point inside the unexpanded ball, so the support constraint
// holds by construction.
//   min sum y_i
//   x_ij <= y_i            for every pair
//   sum_j x_ij <= U_i y_i  for every ball
//   sum_i x_ij  = 1        for every point
//   0 <= y_i <= y_cap, x_ij >= 0
inline MmccLp build_mmcc_lp_impl(const MetricInstance& inst, double y_cap) {
    const int n = inst.num_points();
    const int m = inst.num_balls();

    MmccLp out;
    std::vector<std::vector<int>> servers(n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (inst.contains(i, j, 1.0)) {
                servers[j].push_back(static_cast<int>(out.pairs.size()));
                out.pairs.emplace_back(i, j);
            }
    for (int j = 0; j < n; ++j)
        if (servers[j].empty())
            throw coverage_error("point " + std::to_string(j) + " lies in no ball");

    const int nv = m + static_cast<int>(out.pairs.size());
    out.lp = LpProblem::with_vars(nv);
    for (int i = 0; i < m; ++i) {
        out.lp.objective[i] = 1.0;
        out.lp.hi[i] = y_cap;
    }

    // x_ij - y_i <= 0; for unit-capacity balls the capacity row already
    // says sum_j x_ij <= y_i, so the per-pair rows are redundant there.
    for (size_t k = 0; k < out.pairs.size(); ++k) {
        if (inst.balls[out.pairs[k].first].capacity == 1) continue;
        std::vector<double> a(nv, 0.0);
        a[m + k] = 1.0;
        a[out.pairs[k].first] = -1.0;
        out.lp.add_row(std::move(a), Rel::Le, 0.0);
    }
    // sum_j x_ij - U_i y_i <= 0
    out.pair_var_of_ball.assign(m, {});
    for (size_t k = 0; k < out.pairs.size(); ++k)
        out.pair_var_of_ball[out.pairs[k].first].push_back(m + static_cast<int>(k));
    for (int i = 0; i < m; ++i) {
        std::vector<double> a(nv, 0.0);
        for (int v : out.pair_var_of_ball[i]) a[v] = 1.0;
        a[i] = -static_cast<double>(inst.balls[i].capacity);
        out.lp.add_row(std::move(a), Rel::Le, 0.0);
    }
    // sum_i x_ij = 1
    for (int j = 0; j < n; ++j) {
        std::vector<double> a(nv, 0.0);
        for (int k : servers[j]) a[m + k] = 1.0;
        out.lp.add_row(std::move(a), Rel::Eq, 1.0);
    }
    return out;
}

inline MmccLp build_mmcc_lp(const MetricInstance& inst) {
    return build_mmcc_lp_impl(inst, 1.0);
}

// Soft-capacity relaxation: identical but y is unbounded above.
inline MmccLp build_soft_lp(const MetricInstance& inst) {
    return build_mmcc_lp_impl(inst, std::numeric_limits<double>::infinity());
}

// Feasibility audit for a fractional solution; beta_of_ball gives the
// per-ball serving reach in radius multiples (the stage slack).
inline void check_fractional(const MetricInstance& inst, const FractionalSolution& f,
                             bool check_openness, double tol = 1e-7) {
    const int n = f.n, m = f.m;
    for (int i = 0; i < m; ++i) {
        double out = 0.0;
        for (int j = 0; j < n; ++j) {
            double v = f.xat(i, j);
            check(v >= -tol, "negative flow");
            if (check_openness)
                check(v <= f.y[i] + tol, "flow above openness on ball " + std::to_string(i));
            if (v > tol)
                check(inst.center_dist(i, j) <=
                          f.stage_slack[i] * inst.balls[i].radius + tol,
                      "ball " + std::to_string(i) + " serves beyond its slack radius");
            out += v;
        }
        check(out <= f.y[i] * inst.balls[i].capacity + tol,
              "capacity times openness exceeded on ball " + std::to_string(i));
    }
    for (int j = 0; j < n; ++j)
        check(std::abs(f.inflow(j) - 1.0) <= tol,
              "point " + std::to_string(j) + " inflow != 1");
}

inline FractionalSolution decode_lp(const MetricInstance& inst, const MmccLp& built,
                                    const LpSolution& sol) {
    const int n = inst.num_points();
    const int m = inst.num_balls();
    FractionalSolution f = FractionalSolution::zeros(m, n);
    for (int i = 0; i < m; ++i) f.y[i] = std::clamp(sol.assignment[i], 0.0, 1e18);
    for (size_t k = 0; k < built.pairs.size(); ++k) {
        double v = sol.assignment[m + k];
        if (v < kTol) v = 0.0;  // snap: downstream branches on x > 0
        f.xat(built.pairs[k].first, built.pairs[k].second) = v;
    }
    // Renormalize each point's flow to sum exactly one.
    for (int j = 0; j < n; ++j) {
        double s = f.inflow(j);
        check(s > 0.5, "decoded point flow collapsed");
        for (int i = 0; i < m; ++i)
            if (f.xat(i, j) > 0.0) f.xat(i, j) /= s;
    }
    f.lp_value = f.cost();
    return f;
}

inline FractionalSolution solve_relaxation(const MetricInstance& inst) {
    MmccLp built = build_mmcc_lp(inst);
    LpSolution sol = simplex_solve(built.lp);
    if (sol.status == LpStatus::Infeasible)
        throw infeasible_error("relaxation infeasible");
    if (sol.status != LpStatus::Optimal)
        throw numerical_error("relaxation not solved to optimality");
    FractionalSolution f = decode_lp(inst, built, sol);
    check_fractional(inst, f, true);
    return f;
}

inline FractionalSolution solve_soft_relaxation(const MetricInstance& inst) {
    MmccLp built = build_soft_lp(inst);
    LpSolution sol = simplex_solve(built.lp);
    if (sol.status == LpStatus::Infeasible)
        throw infeasible_error("soft relaxation infeasible");
    if (sol.status != LpStatus::Optimal)
        throw numerical_error("soft relaxation not solved to optimality");
    FractionalSolution f = decode_lp(inst, built, sol);
    check_fractional(inst, f, true);
    return f;
}

}  // namespace capcover
