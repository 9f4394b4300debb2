#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "capcover/core.hpp"
#include "capcover/instance.hpp"
#include "capcover/relax.hpp"
#include "capcover/solution.hpp"

namespace capcover {

// Small deterministic Dinic max-flow; node 0 is the source, node 1 the sink.
class FlowNetwork {
public:
    explicit FlowNetwork(int nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

    int add_arc(int from, int to, long long cap) {
        int id = static_cast<int>(arcs_.size());
        arcs_.push_back({to, head_[from], cap});
        head_[from] = id;
        arcs_.push_back({from, head_[to], 0});
        head_[to] = id + 1;
        return id;
    }
    long long arc_flow(int id) const { return arcs_[id + 1].cap; }

    long long max_flow(int s, int t) {
        long long total = 0;
        while (bfs(s, t)) {
            it_ = head_;
            long long f;
            while ((f = dfs(s, t, std::numeric_limits<long long>::max())) > 0) total += f;
        }
        return total;
    }

private:
    struct Arc {
        int to, next;
        long long cap;
    };
    std::vector<Arc> arcs_;
    std::vector<int> head_, level_, it_;

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e = head_[u]; e >= 0; e = arcs_[e].next)
                if (arcs_[e].cap > 0 && level_[arcs_[e].to] < 0) {
                    level_[arcs_[e].to] = level_[u] + 1;
                    q.push(arcs_[e].to);
                }
        }
        return level_[t] >= 0;
    }
    long long dfs(int u, int t, long long push) {
        if (u == t) return push;
        for (int& e = it_[u]; e >= 0; e = arcs_[e].next) {
            const Arc& a = arcs_[e];
            if (a.cap > 0 && level_[a.to] == level_[u] + 1) {
                long long f = dfs(a.to, t, std::min(push, a.cap));
                if (f > 0) {
                    arcs_[e].cap -= f;
                    arcs_[e ^ 1].cap += f;
                    return f;
                }
            }
        }
        return 0;
    }
};

// Integral assignment on the support of a feasible fractional assignment
// over the given balls. ball_cap lets soft mode pass copies * capacity.
inline std::vector<int> integral_assignment(const MetricInstance& inst,
                                            const std::vector<int>& selected,
                                            const FractionalSolution& frac,
                                            const std::vector<long long>* ball_cap = nullptr) {
    const int n = inst.num_points();
    const int s = 0, t = 1;
    FlowNetwork net(2 + static_cast<int>(selected.size()) + n);
    auto ball_node = [&](int idx) { return 2 + idx; };
    auto point_node = [&](int j) { return 2 + static_cast<int>(selected.size()) + j; };

    std::vector<std::vector<std::pair<int, int>>> arcs_of_point(n);  // (arc id, ball)
    for (size_t bi = 0; bi < selected.size(); ++bi) {
        int i = selected[bi];
        long long cap = ball_cap ? (*ball_cap)[i] : inst.balls[i].capacity;
        net.add_arc(s, ball_node(static_cast<int>(bi)), cap);
        for (int j = 0; j < n; ++j)
            if (frac.xat(i, j) > kTol) {
                int id = net.add_arc(ball_node(static_cast<int>(bi)), point_node(j), 1);
                arcs_of_point[j].push_back({id, i});
            }
    }
    for (int j = 0; j < n; ++j) net.add_arc(point_node(j), t, 1);

    long long got = net.max_flow(s, t);
    check(got == n, "integral assignment: max-flow " + std::to_string(got) +
                        " < " + std::to_string(n) + " points");

    std::vector<int> assign(n, -1);
    for (int j = 0; j < n; ++j)
        for (auto [id, ball] : arcs_of_point[j])
            if (net.arc_flow(id) == 1) {
                assign[j] = ball;
                break;
            }
    for (int j = 0; j < n; ++j)
        check(assign[j] >= 0, "integral assignment: point left unassigned");
    return assign;
}

// Decision version: can `subset` serve every point within beta-expanded radii?
inline bool feasible_assignment_exists(const MetricInstance& inst,
                                       const std::vector<int>& subset, double beta) {
    const int n = inst.num_points();
    if (n == 0) return true;
    long long total_cap = 0;
    for (int i : subset) total_cap += inst.balls[i].capacity;
    if (total_cap < n) return false;

    FlowNetwork net(2 + static_cast<int>(subset.size()) + n);
    const int s = 0, t = 1;
    for (size_t bi = 0; bi < subset.size(); ++bi) {
        net.add_arc(s, 2 + static_cast<int>(bi), inst.balls[subset[bi]].capacity);
        for (int j = 0; j < n; ++j)
            if (inst.contains(subset[bi], j, beta))
                net.add_arc(2 + static_cast<int>(bi), 2 + static_cast<int>(subset.size()) + j, 1);
    }
    for (int j = 0; j < n; ++j)
        net.add_arc(2 + static_cast<int>(subset.size()) + j, t, 1);
    return net.max_flow(s, t) == n;
}

struct BruteForceResult {
    long long opt = -1;  // -1: no feasible subset
    std::vector<int> subset;
    std::vector<int> assignment;
};

// Exact optimum by subset enumeration in increasing cardinality, pruned by
// total capacity and coverage. First feasible subset in numeric order wins.
inline BruteForceResult brute_force_opt(const MetricInstance& inst, int max_balls = 12) {
    const int m = inst.num_balls();
    const int n = inst.num_points();
    if (m > max_balls) throw input_error("brute force: too many balls");

    // Per-ball coverage masks at beta = 1.
    std::vector<std::vector<char>> covers(m, std::vector<char>(n, 0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) covers[i][j] = inst.contains(i, j, 1.0);

    for (int k = 0; k <= m; ++k) {
        std::vector<int> pick(k);
        for (int i = 0; i < k; ++i) pick[i] = i;
        bool more = k <= m;
        while (more) {
            long long cap = 0;
            for (int i : pick) cap += inst.balls[i].capacity;
            if (cap >= n) {
                std::vector<char> seen(n, 0);
                int covered = 0;
                for (int i : pick)
                    for (int j = 0; j < n; ++j)
                        if (covers[i][j] && !seen[j]) {
                            seen[j] = 1;
                            ++covered;
                        }
                if (covered == n && feasible_assignment_exists(inst, pick, 1.0)) {
                    BruteForceResult res;
                    res.opt = k;
                    res.subset = pick;
                    if (n > 0) {
                        FractionalSolution f = FractionalSolution::zeros(m, n);
                        // Build a support from containment; max-flow extracts it.
                        for (int i : pick)
                            for (int j = 0; j < n; ++j)
                                if (covers[i][j]) f.xat(i, j) = 1.0;
                        res.assignment = integral_assignment(inst, pick, f);
                    }
                    return res;
                }
            }
            int i = k - 1;
            while (i >= 0 && pick[i] == m - k + i) --i;
            if (i < 0) {
                more = false;
            } else {
                ++pick[i];
                for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
            }
        }
        if (k == 0 && n == 0) break;
    }
    return {};
}

// Checks a rounded solution against the instance at the given expansion cap.
inline ValidationReport verify_solution(const MetricInstance& inst,
                                        const RoundedSolution& sol, double beta_max) {
    ValidationReport rep;
    const int n = inst.num_points();
    std::vector<char> is_selected(inst.num_balls(), 0);
    for (int i : sol.selected) {
        if (i < 0 || i >= inst.num_balls()) {
            rep.add("ball-id", "selected ball " + std::to_string(i) + " out of range");
            return rep;
        }
        is_selected[i] = 1;
    }
    if (static_cast<int>(sol.assignment.size()) != n)
        rep.add("assignment", "assignment arity != point count");

    std::vector<long long> load(inst.num_balls(), 0);
    for (int j = 0; j < static_cast<int>(sol.assignment.size()); ++j) {
        int i = sol.assignment[j];
        if (i < 0 || i >= inst.num_balls() || !is_selected[i]) {
            rep.add("not-selected",
                    "point " + std::to_string(j) + " assigned outside the selection");
            continue;
        }
        ++load[i];
        if (inst.center_dist(i, j) > beta_max * inst.balls[i].radius + kTol)
            rep.add("distance", "point " + std::to_string(j) + " beyond beta*r of ball " +
                                    std::to_string(i));
    }
    for (int i = 0; i < inst.num_balls(); ++i)
        if (load[i] > inst.balls[i].capacity)
            rep.add("capacity", "ball " + std::to_string(i) + " overloaded: " +
                                    std::to_string(load[i]) + " > " +
                                    std::to_string(inst.balls[i].capacity));
    return rep;
}

}  // namespace capcover
