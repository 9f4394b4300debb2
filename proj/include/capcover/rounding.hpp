#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "capcover/core.hpp"
#include "capcover/exactsol.hpp"
#include "capcover/instance.hpp"
#include "capcover/relax.hpp"
#include "capcover/solution.hpp"
#include "capcover/trace.hpp"

namespace capcover {

struct RoundingParams {
    double alpha = 0.375;
    double tol = 1e-9;
};

inline void validate_rounding_params(const RoundingParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 0.375 + 1e-12))
        throw input_error("alpha must lie in (0, 3/8]");
}

// ---------------------------------------------------------------------------
// Preprocessing: merge light openness around over-served points until every
// point's light openness mass is at most alpha, then lift everything above
// alpha to 1. merge_slack is the serving reach granted to merge receivers
// (3 in the metric setting).
// ---------------------------------------------------------------------------

namespace detail {

inline double light_mass_at(const FractionalSolution& f, int point, double alpha) {
    double mass = 0.0;
    for (int i = 0; i < f.m; ++i)
        if (f.y[i] > kTol && f.y[i] <= alpha + kTol && f.xat(i, point) > kTol) mass += f.y[i];
    return mass;
}

}  // namespace detail

inline FractionalSolution preprocess_merge(const MetricInstance& inst,
                                           const FractionalSolution& frac, double alpha,
                                           double merge_slack, bool lift_to_heavy,
                                           TraceLog* tr) {
    FractionalSolution f = frac;
    const int n = f.n, m = f.m;
    const double in_cost = f.cost();

    for (;;) {
        int bad_point = -1;
        for (int j = 0; j < n && bad_point < 0; ++j)
            if (detail::light_mass_at(f, j, alpha) > alpha + kTol) bad_point = j;
        if (bad_point < 0) break;

        std::vector<int> servers;
        for (int i = 0; i < m; ++i)
            if (f.y[i] > kTol && f.y[i] <= alpha + kTol && f.xat(i, bad_point) > kTol)
                servers.push_back(i);
        std::sort(servers.begin(), servers.end(),
                  [&](int a, int b) { return ball_before(inst, a, b); });

        // Prefix with openness mass in (alpha, 2*alpha]; each term is at
        // most alpha, so the first crossing stays within twice alpha.
        std::vector<int> group;
        double mass = 0.0;
        for (int b : servers) {
            group.push_back(b);
            mass += f.y[b];
            if (mass > alpha + kTol) break;
        }
        check(mass > alpha + kTol, "preprocess: group never crossed alpha");

        const int k = group.front();
        for (size_t g = 1; g < group.size(); ++g) {
            int b = group[g];
            for (int p = 0; p < n; ++p) {
                double amt = f.xat(b, p);
                if (amt <= 0.0) continue;
                f.xat(b, p) = 0.0;
                f.xat(k, p) += amt;
                if (tr) tr->move(p, b, k, amt);
                check(inst.center_dist(k, p) <= merge_slack * inst.balls[k].radius + 1e-7,
                      "preprocess: merged flow beyond the receiver's slack radius");
            }
            f.y[b] = 0.0;
            if (tr) tr->yset(b, 0.0);
        }
        f.y[k] = mass;
        if (tr) tr->yset(k, mass);
        f.stage_slack[k] = merge_slack;
        if (tr) tr->slack(k, merge_slack);
        check(f.outflow(k) <= static_cast<double>(inst.balls[k].capacity) + 1e-7,
              "preprocess: merge receiver over capacity");
    }

    if (lift_to_heavy) {
        for (int i = 0; i < m; ++i)
            if (f.y[i] > alpha + kTol && f.y[i] < 1.0) {
                f.y[i] = 1.0;
                if (tr) tr->yset(i, 1.0);
            }
        check(f.cost() <= in_cost / alpha + 1e-6, "preprocess: cost grew past 1/alpha");
        check_fractional(inst, f, true);
        for (int j = 0; j < n; ++j)
            check(detail::light_mass_at(f, j, alpha) <= alpha + 1e-6,
                  "preprocess: point keeps too much light mass");
    }
    if (tr) tr->phase(0);
    return f;
}

inline FractionalSolution preprocess(const MetricInstance& inst, const FractionalSolution& frac,
                                     const RoundingParams& params, TraceLog* tr = nullptr) {
    validate_rounding_params(params);
    return preprocess_merge(inst, frac, params.alpha, 3.0, true, tr);
}

// ---------------------------------------------------------------------------
// Cluster formation, shared between the metric and Euclidean pipelines.
// ---------------------------------------------------------------------------

struct OEntry {
    int ball = -1;
    long long k = 0;
    double freed = 0.0;
};

struct RoundingState {
    FractionalSolution frac;
    FractionalSolution frac_pre;  // preprocessed input, kept as a pristine reference
    RoundingParams params;
    std::vector<int> heavy1, light1;
    std::vector<char> is_heavy1, is_light1, in_lambda, in_o;
    std::vector<double> y_pre;
    std::vector<int> owner;                 // light -> cluster owner, -1 otherwise
    std::vector<std::vector<int>> members;  // owner -> clustered lights
    std::vector<OEntry> o_list;
    std::vector<double> yacc;
    std::vector<double> outflow;
    TraceLog trace;

    double avail(const MetricInstance& inst, int i) const {
        return static_cast<double>(inst.balls[i].capacity) - outflow[i];
    }
    // Available capacity net of the residual flow still parked at
    // clustered members; this is what admission must respect so the
    // cluster's total never exceeds the owner's capacity.
    double booked_avail(const MetricInstance& inst, int i) const {
        double a = avail(inst, i);
        for (int t : members[i]) a -= outflow[t];
        return a;
    }
};

namespace detail {

inline void state_move(RoundingState& st, int point, int from, int to, double amt) {
    if (amt <= 0.0) return;
    st.frac.xat(from, point) -= amt;
    st.frac.xat(to, point) += amt;
    st.outflow[from] -= amt;
    st.outflow[to] += amt;
    st.trace.move(point, from, to, amt);
}

}  // namespace detail

inline RoundingState cluster_formation(const MetricInstance& inst,
                                       const FractionalSolution& frac_pre,
                                       const RoundingParams& params, TraceLog log = {}) {
    validate_rounding_params(params);
    const int n = frac_pre.n, m = frac_pre.m;
    const double alpha = params.alpha;

    RoundingState st;
    st.frac = frac_pre;
    st.frac_pre = frac_pre;
    st.params = params;
    st.trace = std::move(log);
    st.y_pre = st.frac.y;
    st.is_heavy1.assign(m, 0);
    st.is_light1.assign(m, 0);
    st.in_lambda.assign(m, 0);
    st.in_o.assign(m, 0);
    st.owner.assign(m, -1);
    st.members.assign(m, {});
    st.yacc.assign(m, 0.0);
    st.outflow.assign(m, 0.0);
    for (int i = 0; i < m; ++i) st.outflow[i] = st.frac.outflow(i);

    for (int i = 0; i < m; ++i) {
        if (std::abs(st.frac.y[i] - 1.0) <= kTol) {
            st.is_heavy1[i] = 1;
            st.heavy1.push_back(i);
        } else if (st.frac.y[i] > kTol) {
            check(st.frac.y[i] <= alpha + kTol,
                  "cluster formation: ball neither heavy nor light");
            st.is_light1[i] = 1;
            st.light1.push_back(i);
            st.in_lambda[i] = 1;
        }
    }

    const std::vector<int> canonical = balls_in_canonical_order(inst);
    auto served = [&](int b) { return st.frac.served_points(b); };
    auto has_other_lambda_server = [&](int point, int except) {
        for (int b = 0; b < m; ++b)
            if (b != except && st.in_lambda[b] && st.frac.xat(b, point) > kTol) return true;
        return false;
    };

    long long prev_k = std::numeric_limits<long long>::max();

    for (;;) {
        // Retire light balls whose served set drained away entirely;
        // selecting them would buy nothing.
        for (int t : st.light1)
            if (st.in_lambda[t] && st.outflow[t] <= 1e-7) {
                st.in_lambda[t] = 0;
                st.frac.y[t] = 0.0;
                st.trace.yset(t, 0.0);
                st.trace.drop(t);
            }

        // (a) Admit intersecting light balls into heavy clusters while
        // capacity allows; restart the scan after every admission.
        bool changed = true;
        while (changed) {
            changed = false;
            for (int i : st.heavy1) {
                for (int t = 0; t < m && !changed; ++t) {
                    if (!st.in_lambda[t]) continue;
                    double reach = st.frac.stage_slack[i] * inst.balls[i].radius +
                                   inst.balls[t].radius;
                    if (inst.distance(n + inst.balls[i].center, n + inst.balls[t].center) >
                        reach + kTol)
                        continue;
                    if (st.booked_avail(inst, i) < st.outflow[t] - kTol) continue;
                    st.trace.cluster_add(i, t);
                    // Points co-served by another waiting light ball keep
                    // their flow at t for now; it rides along at selection.
                    for (int p : served(t))
                        if (!has_other_lambda_server(p, t))
                            detail::state_move(st, p, t, i, st.frac.xat(t, p));
                    st.members[i].push_back(t);
                    st.owner[t] = i;
                    st.in_lambda[t] = 0;
                    st.yacc[i] -= st.y_pre[t];
                    changed = true;
                }
                if (changed) break;
            }
        }

        int pick = -1;
        long long pick_k = -1;
        for (int t = 0; t < m; ++t) {
            if (!st.in_lambda[t]) continue;
            long long a_t = static_cast<long long>(served(t).size());
            long long k_t = std::min<long long>(inst.balls[t].capacity, a_t);
            if (k_t > pick_k || (k_t == pick_k && ball_before(inst, t, pick))) {
                pick = t;
                pick_k = k_t;
            }
        }
        if (pick < 0) break;

        check(pick_k >= 1, "cluster formation: empty ball escaped the purge");
        check(pick_k <= prev_k, "cluster formation: selection k increased");
        prev_k = pick_k;
        st.in_lambda[pick] = 0;
        st.in_o[pick] = 1;
        st.trace.o_add(pick, pick_k);

        std::vector<double> credit(m, 0.0);
        auto drain_point = [&](int p, auto&& donor_ok, double cap_amount) {
            double moved = 0.0;
            for (int b : canonical) {
                if (b == pick || !donor_ok(b)) continue;
                double have = st.frac.xat(b, p);
                if (have <= kTol) continue;
                double take = std::min(have, cap_amount - moved);
                if (take <= 0.0) break;
                detail::state_move(st, p, b, pick, take);
                if (st.is_heavy1[b]) credit[b] += take;
                moved += take;
                if (moved >= cap_amount - kTol) break;
            }
            return moved;
        };
        auto non_o_donor = [&](int b) { return !st.in_o[b]; };

        const std::vector<int> a_pick = served(pick);
        const long long cap = inst.balls[pick].capacity;
        const double inf = std::numeric_limits<double>::infinity();

        if (static_cast<long long>(a_pick.size()) <= cap) {
            for (int p : a_pick) drain_point(p, non_o_donor, inf);
        } else if (cap > 1) {
            for (int p : a_pick) {
                double demand = 0.0;
                for (int b = 0; b < m; ++b)
                    if (b != pick && !st.in_o[b]) demand += st.frac.xat(b, p);
                if (st.outflow[pick] + demand > static_cast<double>(cap) + kTol) break;
                drain_point(p, non_o_donor, inf);
            }
        } else {
            const int p = a_pick.front();
            drain_point(p, [&](int b) { return static_cast<bool>(st.in_lambda[b]); }, inf);
            double heavy_inflow = 0.0;
            for (int b : st.heavy1) heavy_inflow += st.frac.xat(b, p);
            double amount = std::min(st.avail(inst, pick), heavy_inflow);
            if (amount > kTol)
                drain_point(p, [&](int b) { return static_cast<bool>(st.is_heavy1[b]); }, amount);
        }

        double freed = 0.0;
        for (int i : st.heavy1) freed += credit[i];
        st.o_list.push_back({pick, pick_k, freed});

        check(freed >= static_cast<double>(pick_k) / 5.0 - 1e-6,
              "cluster formation: freed flow below a fifth of k");
        for (int i : st.heavy1) {
            st.yacc[i] += credit[i] / static_cast<double>(pick_k);
            check(st.yacc[i] <= 1.0 + alpha + 1e-6,
                  "cluster formation: accumulation above 1+alpha");
            check(st.avail(inst, i) >= st.yacc[i] * static_cast<double>(pick_k) - 1e-6,
                  "cluster formation: available capacity below accumulation * k");
            check(st.booked_avail(inst, i) >= st.yacc[i] * static_cast<double>(pick_k) - 1e-6,
                  "cluster formation: booked capacity below accumulation * k");
        }
        check(st.outflow[pick] <= static_cast<double>(cap) + 1e-7,
              "cluster formation: selected ball over capacity");
    }

    for (const auto& e : st.o_list) {
        st.frac.y[e.ball] = 1.0;
        st.trace.yset(e.ball, 1.0);
    }
    st.trace.phase(1);

    double l1_mass = 0.0;
    for (int t : st.light1) l1_mass += st.y_pre[t];
    check(static_cast<double>(st.o_list.size()) <=
              5.0 * ((1.0 + alpha) * static_cast<double>(st.heavy1.size()) + l1_mass) + 1e-6,
          "cluster formation: selected set larger than its bound");
    for (int t : st.light1)
        check(st.owner[t] >= 0 || st.in_o[t] || st.frac.y[t] == 0.0,
              "cluster formation: light ball left unresolved");
    for (int j = 0; j < n; ++j)
        check(std::abs(st.frac.inflow(j) - 1.0) <= 1e-6,
              "cluster formation: point inflow drifted from 1");
    return st;
}

// ---------------------------------------------------------------------------
// Selection.
// ---------------------------------------------------------------------------

struct SelectionResult {
    std::vector<int> selected;
    double max_serve_factor = 0.0;  // realized factor over the fractional support
};

namespace detail {

inline double serve_radius(const MetricInstance& inst, const RoundingState& st, int ball) {
    double d = 0.0;
    for (int j = 0; j < st.frac.n; ++j)
        if (st.frac.xat(ball, j) > kTol) d = std::max(d, inst.center_dist(ball, j));
    return d;
}

// Move the whole cluster's flow (owner plus member residuals) onto the
// chosen ball.
inline void concentrate_cluster(RoundingState& st, int owner, int chosen,
                                const std::vector<int>& members) {
    if (chosen != owner)
        for (int p = 0; p < st.frac.n; ++p)
            state_move(st, p, owner, chosen, st.frac.xat(owner, p));
    for (int t : members) {
        if (t == chosen) continue;
        for (int p = 0; p < st.frac.n; ++p)
            state_move(st, p, t, chosen, st.frac.xat(t, p));
    }
}

inline std::vector<int> cluster_owners(const RoundingState& st) {
    std::vector<int> owners = st.heavy1;
    for (const auto& e : st.o_list) owners.push_back(e.ball);
    std::sort(owners.begin(), owners.end());
    return owners;
}

}  // namespace detail

inline SelectionResult select_objects_general(const MetricInstance& inst, RoundingState& st) {
    SelectionResult res;
    for (int owner : detail::cluster_owners(st)) {
        const auto& mem = st.members[owner];
        int chosen = owner;
        for (int t : mem)
            if (ball_before(inst, t, chosen)) chosen = t;
        detail::concentrate_cluster(st, owner, chosen, mem);
        st.trace.emit(owner, chosen);
        if (chosen != owner) {
            st.frac.y[owner] = 0.0;
            st.trace.yset(owner, 0.0);
            st.frac.y[chosen] = 1.0;
            st.trace.yset(chosen, 1.0);
        }
        for (int t : mem)
            if (t != chosen) {
                st.frac.y[t] = 0.0;
                st.trace.yset(t, 0.0);
            }
        check(st.outflow[chosen] <= static_cast<double>(inst.balls[chosen].capacity) + 1e-7,
              "selection: chosen ball over capacity");
        double sr = detail::serve_radius(inst, st, chosen);
        double r = inst.balls[chosen].radius;
        double factor = r > 0 ? sr / r : (sr <= kTol ? 1.0 : std::numeric_limits<double>::infinity());
        check(factor <= 9.0 + 1e-6, "selection: serving factor above 9");
        res.max_serve_factor = std::max(res.max_serve_factor, factor);
        res.selected.push_back(chosen);
    }
    st.trace.phase(2);
    return res;
}

// Equal-capacity variant. The case split compares the largest clustered
// light radius against the owner's slack-expanded radius; that is the
// reading under which the 3 + 2*sqrt(3) factor is actually achieved.
inline SelectionResult select_objects_uniform(const MetricInstance& inst, RoundingState& st) {
    if (!uniform_capacities(inst))
        throw input_error("uniform selection requires equal capacities");
    const double bound = 3.0 + 2.0 * std::sqrt(3.0);
    SelectionResult res;
    for (int owner : detail::cluster_owners(st)) {
        const auto& mem = st.members[owner];
        int chosen = owner;
        if (!mem.empty()) {
            int largest_light = mem.front();
            for (int t : mem)
                if (ball_before(inst, t, largest_light)) largest_light = t;
            double rho_h = st.frac.stage_slack[owner] * inst.balls[owner].radius;
            if (inst.balls[largest_light].radius >= rho_h / std::sqrt(3.0) - kTol)
                chosen = largest_light;
        }
        detail::concentrate_cluster(st, owner, chosen, mem);
        st.trace.emit(owner, chosen);
        if (chosen != owner) {
            st.frac.y[owner] = 0.0;
            st.trace.yset(owner, 0.0);
            st.frac.y[chosen] = 1.0;
            st.trace.yset(chosen, 1.0);
        }
        for (int t : mem)
            if (t != chosen) {
                st.frac.y[t] = 0.0;
                st.trace.yset(t, 0.0);
            }
        check(st.outflow[chosen] <= static_cast<double>(inst.balls[chosen].capacity) + 1e-7,
              "selection: chosen ball over capacity");
        double sr = detail::serve_radius(inst, st, chosen);
        double r = inst.balls[chosen].radius;
        double factor = r > 0 ? sr / r : (sr <= kTol ? 1.0 : std::numeric_limits<double>::infinity());
        check(factor <= bound + 1e-6, "uniform selection: serving factor above 3+2*sqrt(3)");
        res.max_serve_factor = std::max(res.max_serve_factor, factor);
        res.selected.push_back(chosen);
    }
    st.trace.phase(2);
    return res;
}

// ---------------------------------------------------------------------------
// Pipelines.
// ---------------------------------------------------------------------------

enum class MetricVariant { General, Uniform };

struct PipelineResult {
    RoundedSolution rounded;
    double lp_value = 0.0;
    double max_beta = 0.0;
    double cost_bound = 0.0;   // guaranteed cost multiple of the LP value
    double beta_bound = 0.0;   // guaranteed expansion factor
    long long h1_count = 0;
    double l1_mass = 0.0;
    long long o_count = 0;
    long long fallback_count = 0;
    FractionalSolution frac0;
    TraceLog trace;
    std::vector<long long> cluster_counts;        // selected balls per cluster
    std::vector<long long> cluster_count_bounds;  // matching construction bounds
};

inline RoundedSolution extract_rounded(const MetricInstance& inst,
                                       const std::vector<int>& selected,
                                       const FractionalSolution& frac) {
    RoundedSolution out;
    out.selected = selected;
    out.assignment = integral_assignment(inst, selected, frac);
    out.cost = static_cast<long long>(selected.size());
    out.expansion.assign(selected.size(), 1.0);
    for (size_t s = 0; s < selected.size(); ++s) {
        double worst = 0.0;
        for (int j = 0; j < inst.num_points(); ++j)
            if (out.assignment[j] == selected[s])
                worst = std::max(worst, inst.center_dist(selected[s], j));
        double r = inst.balls[selected[s]].radius;
        if (r > 0)
            out.expansion[s] = std::max(1.0, worst / r);
        else
            out.expansion[s] = worst <= kTol ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return out;
}

inline PipelineResult run_metric_pipeline(const MetricInstance& inst,
                                          const RoundingParams& params,
                                          MetricVariant variant = MetricVariant::General) {
    validate_rounding_params(params);
    if (!monotone_capacities(inst))
        throw input_error("metric rounding requires monotone capacities");
    if (variant == MetricVariant::Uniform && !uniform_capacities(inst))
        throw input_error("uniform variant requires equal capacities");

    PipelineResult res;
    res.frac0 = solve_relaxation(inst);
    res.lp_value = res.frac0.lp_value;

    TraceLog log;
    FractionalSolution pre = preprocess(inst, res.frac0, params, &log);
    RoundingState st = cluster_formation(inst, pre, params, std::move(log));
    res.h1_count = static_cast<long long>(st.heavy1.size());
    for (int t : st.light1) res.l1_mass += st.y_pre[t];
    res.o_count = static_cast<long long>(st.o_list.size());

    SelectionResult sel = variant == MetricVariant::General
                              ? select_objects_general(inst, st)
                              : select_objects_uniform(inst, st);

    res.rounded = extract_rounded(inst, sel.selected, st.frac);
    res.trace = std::move(st.trace);
    for (double b : res.rounded.expansion) res.max_beta = std::max(res.max_beta, b);

    res.beta_bound = variant == MetricVariant::General ? 9.0 : 3.0 + 2.0 * std::sqrt(3.0);
    res.cost_bound = (6.0 + 5.0 * params.alpha) / params.alpha;
    check(static_cast<double>(res.rounded.cost) <= res.cost_bound * res.lp_value + 1e-6,
          "pipeline: cost above its bound");
    check(res.max_beta <= res.beta_bound + 1e-9, "pipeline: expansion above its bound");
    return res;
}

// ---------------------------------------------------------------------------
// Soft capacities: after the merge loop (no lift), open ceil(y/(1-alpha))
// copies of every non-light ball, rescale their flow, trim to unit inflow
// and extract an integral assignment.
// ---------------------------------------------------------------------------

struct SoftResult {
    SoftSolution soft;
    double lp_value = 0.0;
};

inline SoftResult solve_soft(const MetricInstance& inst, double alpha = 0.5) {
    if (!(alpha > 0.0 && alpha <= 0.5 + 1e-12))
        throw input_error("soft variant needs alpha in (0, 1/2]");
    if (!monotone_capacities(inst))
        throw input_error("soft rounding requires monotone capacities");

    SoftResult res;
    FractionalSolution frac = solve_soft_relaxation(inst);
    res.lp_value = frac.lp_value;
    FractionalSolution f = preprocess_merge(inst, frac, alpha, 3.0, false, nullptr);

    const int n = f.n, m = f.m;
    res.soft.copies.assign(m, 0);
    std::vector<char> open(m, 0);
    for (int i = 0; i < m; ++i)
        if (f.y[i] > alpha + kTol) {
            res.soft.copies[i] =
                static_cast<long long>(std::ceil(f.y[i] / (1.0 - alpha) - 1e-12));
            res.soft.total_copies += res.soft.copies[i];
            open[i] = 1;
        }

    // Rescaled non-light flow, trimmed to exactly one unit per point.
    FractionalSolution trimmed = FractionalSolution::zeros(m, n);
    trimmed.stage_slack = f.stage_slack;
    const std::vector<int> canonical = balls_in_canonical_order(inst);
    for (int j = 0; j < n; ++j) {
        double need = 1.0;
        for (int i : canonical) {
            if (!open[i] || need <= 0.0) continue;
            double scaled = f.xat(i, j) / (1.0 - alpha);
            if (scaled <= kTol) continue;
            double take = std::min(scaled, need);
            trimmed.xat(i, j) = take;
            need -= take;
        }
        check(need <= 1e-6, "soft: point cannot be served by open balls");
    }

    std::vector<int> selected;
    std::vector<long long> caps(m, 0);
    for (int i = 0; i < m; ++i)
        if (open[i]) {
            selected.push_back(i);
            caps[i] = res.soft.copies[i] * inst.balls[i].capacity;
        }
    res.soft.assignment = integral_assignment(inst, selected, trimmed, &caps);

    for (int j = 0; j < n; ++j) {
        int i = res.soft.assignment[j];
        double r = inst.balls[i].radius;
        double d = inst.center_dist(i, j);
        double b = r > 0 ? d / r : (d <= kTol ? 1.0 : std::numeric_limits<double>::infinity());
        res.soft.max_beta = std::max(res.soft.max_beta, std::max(1.0, b));
    }
    check(res.soft.max_beta <= 3.0 + 1e-9, "soft: expansion above 3");
    check(static_cast<double>(res.soft.total_copies) <= 4.0 * res.lp_value + 1e-6,
          "soft: copies above four times the LP value");
    return res;
}

}  // namespace capcover
