#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "capcover/instance.hpp"
#include "capcover/relax.hpp"

namespace capcover {

// Flat event log of a rounding run. Every flow change is a Move for a
// single point, so a replay can re-derive all running quantities and
// re-check the invariants independently of the pipeline's own state.
struct TraceEvent {
    enum Kind : int {
        YSet,        // ball a, value v
        SlackSet,    // ball a, value v
        Move,        // point a, from ball b, to ball c, amount v
        ClusterAdd,  // heavy a, light b
        OAdd,        // ball a, k = b
        Drop,        // ball a (empty light ball retired)
        Emit,        // cluster a, selected ball b
        Fallback,    // cluster a, restored ball b
        Phase,       // a: 0 preprocess end, 1 cluster formation end, 2 selection end
    };
    Kind kind;
    int a = -1, b = -1, c = -1;
    double v = 0.0;
};

struct TraceLog {
    std::vector<TraceEvent> events;

    void yset(int ball, double v) { events.push_back({TraceEvent::YSet, ball, -1, -1, v}); }
    void slack(int ball, double v) { events.push_back({TraceEvent::SlackSet, ball, -1, -1, v}); }
    void move(int point, int from, int to, double amt) {
        if (amt > 0.0) events.push_back({TraceEvent::Move, point, from, to, amt});
    }
    void cluster_add(int heavy, int light) {
        events.push_back({TraceEvent::ClusterAdd, heavy, light, -1, 0.0});
    }
    void o_add(int ball, long long k) {
        events.push_back({TraceEvent::OAdd, ball, static_cast<int>(k), -1, 0.0});
    }
    void drop(int ball) { events.push_back({TraceEvent::Drop, ball, -1, -1, 0.0}); }
    void emit(int cluster, int ball) { events.push_back({TraceEvent::Emit, cluster, ball, -1, 0.0}); }
    void fallback(int cluster, int ball) {
        events.push_back({TraceEvent::Fallback, cluster, ball, -1, 0.0});
    }
    void phase(int id) { events.push_back({TraceEvent::Phase, id, -1, -1, 0.0}); }

    std::string dump() const {
        std::string out;
        char buf[160];
        for (const auto& e : events) {
            switch (e.kind) {
                case TraceEvent::YSet:
                    std::snprintf(buf, sizeof buf, "yset ball=%d value=%.17g\n", e.a, e.v);
                    break;
                case TraceEvent::SlackSet:
                    std::snprintf(buf, sizeof buf, "slack ball=%d value=%.17g\n", e.a, e.v);
                    break;
                case TraceEvent::Move:
                    std::snprintf(buf, sizeof buf, "move point=%d from=%d to=%d amount=%.17g\n",
                                  e.a, e.b, e.c, e.v);
                    break;
                case TraceEvent::ClusterAdd:
                    std::snprintf(buf, sizeof buf, "cluster heavy=%d light=%d\n", e.a, e.b);
                    break;
                case TraceEvent::OAdd:
                    std::snprintf(buf, sizeof buf, "oadd ball=%d k=%d\n", e.a, e.b);
                    break;
                case TraceEvent::Drop:
                    std::snprintf(buf, sizeof buf, "drop ball=%d\n", e.a);
                    break;
                case TraceEvent::Emit:
                    std::snprintf(buf, sizeof buf, "emit cluster=%d ball=%d\n", e.a, e.b);
                    break;
                case TraceEvent::Fallback:
                    std::snprintf(buf, sizeof buf, "fallback cluster=%d ball=%d\n", e.a, e.b);
                    break;
                case TraceEvent::Phase:
                    std::snprintf(buf, sizeof buf, "phase id=%d\n", e.a);
                    break;
            }
            out += buf;
        }
        return out;
    }
};

// Replays a trace from the decoded LP solution and re-checks every
// invariant the rounding run claims: flow conservation, capacities, the
// freed-flow lower bound per selection, the accumulation cap, the
// available-capacity relation, the selection-order monotonicity, and the
// final selected-count bound.
inline ValidationReport replay_verify(const MetricInstance& inst,
                                      const FractionalSolution& initial,
                                      const TraceLog& log, double alpha) {
    ValidationReport rep;
    const double tol = 1e-6;
    const int n = initial.n, m = initial.m;

    std::vector<double> x = initial.x;
    std::vector<double> y = initial.y;
    std::vector<double> outflow(m, 0.0);
    auto xat = [&](int i, int j) -> double& { return x[static_cast<size_t>(i) * n + j]; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) outflow[i] += xat(i, j);

    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += xat(i, j);
        if (std::abs(s - 1.0) > tol) rep.add("inflow", "initial inflow of point " + std::to_string(j));
    }

    std::vector<char> heavy1(m, 0), light1(m, 0);
    std::vector<double> y_pre(m, 0.0), yacc(m, 0.0);
    bool pre_done = false;
    long long num_o = 0, h1_count = 0;
    double l1_mass = 0.0;
    double prev_k = std::numeric_limits<double>::infinity();

    // Open selection block: ball, k, accumulated per-heavy credits.
    int block_ball = -1;
    long long block_k = 0;
    std::vector<double> block_credit(m, 0.0);

    auto close_block = [&]() {
        if (block_ball < 0) return;
        double freed = 0.0;
        for (int i = 0; i < m; ++i) freed += block_credit[i];
        if (freed < static_cast<double>(block_k) / 5.0 - tol)
            rep.add("freed-flow", "selection of ball " + std::to_string(block_ball) +
                                      ": freed " + std::to_string(freed) + " < k/5");
        for (int i = 0; i < m; ++i)
            if (heavy1[i] && block_k > 0) {
                yacc[i] += block_credit[i] / static_cast<double>(block_k);
                if (yacc[i] > 1.0 + alpha + tol)
                    rep.add("accumulation", "ball " + std::to_string(i) + " accumulation " +
                                                std::to_string(yacc[i]));
                double avail = static_cast<double>(inst.balls[i].capacity) - outflow[i];
                if (avail < yacc[i] * static_cast<double>(block_k) - tol)
                    rep.add("avail", "ball " + std::to_string(i) +
                                         " available capacity below accumulation * k");
            }
        std::fill(block_credit.begin(), block_credit.end(), 0.0);
        block_ball = -1;
    };

    for (const auto& e : log.events) {
        switch (e.kind) {
            case TraceEvent::Move: {
                if (e.v < -tol) rep.add("move", "negative move amount");
                if (xat(e.b, e.a) < e.v - tol)
                    rep.add("conservation", "move takes more flow than ball " +
                                                std::to_string(e.b) + " holds at point " +
                                                std::to_string(e.a));
                xat(e.b, e.a) -= e.v;
                xat(e.c, e.a) += e.v;
                outflow[e.b] -= e.v;
                outflow[e.c] += e.v;
                if (outflow[e.c] > static_cast<double>(inst.balls[e.c].capacity) + tol)
                    rep.add("capacity", "ball " + std::to_string(e.c) + " outflow above capacity");
                if (pre_done && block_ball >= 0 && e.c == block_ball && heavy1[e.b])
                    block_credit[e.b] += e.v;
                break;
            }
            case TraceEvent::YSet:
                y[e.a] = e.v;
                break;
            case TraceEvent::SlackSet:
                break;
            case TraceEvent::ClusterAdd:
                close_block();
                if (!light1[e.b]) rep.add("role", "clustered ball was not light");
                yacc[e.a] -= y_pre[e.b];
                break;
            case TraceEvent::OAdd: {
                close_block();
                block_ball = e.a;
                block_k = e.b;
                if (static_cast<double>(e.b) > prev_k + tol)
                    rep.add("k-order", "selection k increased at ball " + std::to_string(e.a));
                prev_k = static_cast<double>(e.b);
                ++num_o;
                if (!light1[e.a]) rep.add("role", "selected ball was not light");
                break;
            }
            case TraceEvent::Drop:
                close_block();
                if (outflow[e.a] > tol) rep.add("drop", "dropped ball still carries flow");
                break;
            case TraceEvent::Emit:
            case TraceEvent::Fallback:
                break;
            case TraceEvent::Phase:
                if (e.a == 0) {
                    pre_done = true;
                    for (int i = 0; i < m; ++i) {
                        y_pre[i] = y[i];
                        if (std::abs(y[i] - 1.0) <= tol) {
                            heavy1[i] = 1;
                            ++h1_count;
                        } else if (y[i] > tol) {
                            if (y[i] > alpha + tol)
                                rep.add("role", "ball " + std::to_string(i) +
                                                    " neither heavy nor light after preprocessing");
                            light1[i] = 1;
                            l1_mass += y[i];
                        }
                    }
                    // Per-point light openness mass must be at most alpha.
                    for (int j = 0; j < n; ++j) {
                        double mass = 0.0;
                        for (int i = 0; i < m; ++i)
                            if (light1[i] && xat(i, j) > kTol) mass += y[i];
                        if (mass > alpha + tol)
                            rep.add("light-mass", "point " + std::to_string(j) +
                                                      " light mass " + std::to_string(mass));
                    }
                } else if (e.a == 1) {
                    close_block();
                    double bound = 5.0 * ((1.0 + alpha) * static_cast<double>(h1_count) + l1_mass);
                    if (static_cast<double>(num_o) > bound + 1e-6)
                        rep.add("selected-count", "O size " + std::to_string(num_o) +
                                                      " above bound " + std::to_string(bound));
                }
                break;
        }
    }
    close_block();

    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += xat(i, j);
        if (std::abs(s - 1.0) > tol)
            rep.add("inflow", "final inflow of point " + std::to_string(j));
    }
    return rep;
}

}  // namespace capcover
