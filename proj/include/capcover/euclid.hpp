#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "capcover/core.hpp"
#include "capcover/instance.hpp"
#include "capcover/rounding.hpp"

namespace capcover {

struct EuclidParams {
    double epsilon = 0.5;
    double alpha = 0.375;
    double case_constant_c = 2.0;
};

inline void validate_euclid_params(const EuclidParams& p) {
    if (!(p.epsilon > 0.0)) throw input_error("epsilon must be positive");
    if (!(p.alpha > 0.0 && p.alpha <= 0.375 + 1e-12))
        throw input_error("alpha must lie in (0, 3/8]");
    if (!(p.case_constant_c > 1.0)) throw input_error("case constant must exceed 1");
}

namespace euclid_detail {

// Grid diagonals must stay below eps times the smallest admitted radius;
// in up to four dimensions the construction's granularities already do,
// beyond that they shrink with sqrt(d).
inline double granularity_adjust(int dim) {
    return std::min(1.0, 2.0 / std::sqrt(static_cast<double>(dim)));
}

struct Grid {
    double granularity = 1.0;
    std::vector<double> anchor;
    std::map<std::vector<long long>, std::vector<int>> cells;  // cell -> ball ids

    std::vector<long long> key(const std::vector<double>& c) const {
        std::vector<long long> k(c.size());
        for (size_t d = 0; d < c.size(); ++d)
            k[d] = static_cast<long long>(std::floor((c[d] - anchor[d]) / granularity));
        return k;
    }
};

inline Grid bucket_centers(const MetricInstance& inst, const std::vector<int>& balls,
                           double granularity) {
    const auto& g = inst.euclid();
    Grid grid;
    grid.granularity = granularity;
    grid.anchor.assign(g.dim, std::numeric_limits<double>::infinity());
    for (int b : balls) {
        const auto& c = g.centers[inst.balls[b].center];
        for (int d = 0; d < g.dim; ++d) grid.anchor[d] = std::min(grid.anchor[d], c[d]);
    }
    for (int b : balls) grid.cells[grid.key(g.centers[inst.balls[b].center])].push_back(b);
    return grid;
}

inline int cell_winner(const MetricInstance& inst, const std::vector<int>& cell) {
    int w = cell.front();
    for (int b : cell)
        if (ball_before(inst, b, w)) w = b;
    return w;
}

}  // namespace euclid_detail

inline long long euclid_class_count_bound(double eps) {
    return static_cast<long long>(std::ceil(std::log2(std::max(1.0, 1.0 / eps)))) + 2;
}

inline double euclid_cells_per_class_bound(double eps, int dim) {
    double per_dim = std::ceil(16.0 / (eps * euclid_detail::granularity_adjust(dim)));
    return std::pow(per_dim, dim);
}

// Euclidean preprocessing: the same light-mass merge loop as the metric
// variant, but each merge keeps one ball per radius class per grid cell,
// so receivers only ever reach (1+eps) times their radius.
inline FractionalSolution euclid_preprocess(const MetricInstance& inst,
                                            const FractionalSolution& frac,
                                            const EuclidParams& params,
                                            TraceLog* tr = nullptr) {
    validate_euclid_params(params);
    if (!inst.euclidean()) throw input_error("euclidean preprocessing needs coordinates");
    const double eps = params.epsilon;
    const double alpha = params.alpha;
    const int dim = inst.euclid().dim;
    const double adj = euclid_detail::granularity_adjust(dim);

    FractionalSolution f = frac;
    const int n = f.n, m = f.m;
    const double in_cost = f.cost();

    auto move_all_flow = [&](int from, int to, double reach) {
        for (int p = 0; p < n; ++p) {
            double amt = f.xat(from, p);
            if (amt <= 0.0) continue;
            f.xat(from, p) = 0.0;
            f.xat(to, p) += amt;
            if (tr) tr->move(p, from, to, amt);
            check(inst.center_dist(to, p) <= reach + 1e-7,
                  "euclidean preprocess: merged flow beyond the receiver's reach");
        }
        f.y[from] = 0.0;
        if (tr) tr->yset(from, 0.0);
    };

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
        std::vector<int> group;
        double mass = 0.0;
        for (int b : servers) {
            group.push_back(b);
            mass += f.y[b];
            if (mass > alpha + kTol) break;
        }
        check(mass > alpha + kTol, "euclidean preprocess: group never crossed alpha");

        const double r = inst.balls[group.front()].radius;
        bool all_equal = true;
        for (int b : group)
            if (inst.balls[b].radius != r) all_equal = false;

        std::vector<char> selected(m, 0);
        std::vector<int> winner_of(m, -1);  // kept ball -> its cell winner

        if (all_equal && r > 0.0) {
            // Single grid; every ball shares the common radius.
            auto grid = euclid_detail::bucket_centers(inst, group, eps * r / 4.0 * adj);
            for (const auto& [key, cell] : grid.cells) {
                int w = euclid_detail::cell_winner(inst, cell);
                selected[w] = 1;
                for (int b : cell) winner_of[b] = w;
            }
        } else {
            // Radius classes over [r*eps/2, r]; smaller balls are later
            // folded into the overall maximum-radius ball's cell winner.
            std::vector<std::vector<int>> classes;
            for (int b : group) {
                double rb = inst.balls[b].radius;
                if (rb < r * eps / 2.0) continue;
                double ratio = std::max(0.5, rb / (r * eps));
                int cls = std::max(0, static_cast<int>(std::floor(std::log2(ratio))) + 1);
                if (static_cast<size_t>(cls) >= classes.size()) classes.resize(cls + 1);
                classes[cls].push_back(b);
            }
            for (size_t cls = 0; cls < classes.size(); ++cls) {
                if (classes[cls].empty()) continue;
                double g = std::ldexp(r * eps * eps, static_cast<int>(cls) - 2) * adj;
                auto grid = euclid_detail::bucket_centers(inst, classes[cls], g);
                for (const auto& [key, cell] : grid.cells) {
                    int w = euclid_detail::cell_winner(inst, cell);
                    selected[w] = 1;
                    for (int b : cell) winner_of[b] = w;
                }
            }
        }

        // The group's canonical head has the maximum radius, so its cell
        // winner also has radius r and absorbs the discarded dwarfs.
        int top_receiver = winner_of[group.front()];
        check(top_receiver >= 0, "euclidean preprocess: top class lost its receiver");

        for (int b : group) {
            if (winner_of[b] < 0) winner_of[b] = top_receiver;
            if (selected[b]) continue;
            int w = winner_of[b];
            move_all_flow(b, w, (1.0 + eps) * inst.balls[w].radius);
        }
        for (int b : group)
            if (selected[b]) {
                f.y[b] = 1.0;
                f.stage_slack[b] = 1.0 + eps;
                if (tr) {
                    tr->yset(b, 1.0);
                    tr->slack(b, 1.0 + eps);
                }
                check(f.outflow(b) <= static_cast<double>(inst.balls[b].capacity) + 1e-7,
                      "euclidean preprocess: winner over capacity");
            }
    }

    for (int i = 0; i < m; ++i)
        if (f.y[i] > alpha + kTol && f.y[i] < 1.0) {
            f.y[i] = 1.0;
            if (tr) tr->yset(i, 1.0);
        }

    const double k_merge = static_cast<double>(euclid_class_count_bound(eps)) *
                           euclid_cells_per_class_bound(eps, dim);
    check(f.cost() <= (1.0 / alpha + k_merge / (alpha * alpha)) * in_cost + 1e-6,
          "euclidean preprocess: cost above its construction bound");
    check_fractional(inst, f, true);
    for (int j = 0; j < n; ++j)
        check(detail::light_mass_at(f, j, alpha) <= alpha + 1e-6,
              "euclidean preprocess: point keeps too much light mass");
    if (tr) tr->phase(0);
    return f;
}

// ---------------------------------------------------------------------------
// Selection for the Euclidean pipeline.
// ---------------------------------------------------------------------------

struct EuclidClusterReport {
    int owner = -1;
    int case_id = 0;  // 0 owner-only/all-small, 1..3 grid cases
    long long emitted = 0;
    long long bound = 1;
};

struct EuclidSelection {
    std::vector<int> selected;
    std::vector<EuclidClusterReport> clusters;
    long long fallback_count = 0;
    double max_serve_factor = 0.0;
};

inline EuclidSelection euclid_select(const MetricInstance& inst, RoundingState& st,
                                     const EuclidParams& params) {
    validate_euclid_params(params);
    if (!inst.euclidean()) throw input_error("euclidean selection needs coordinates");
    const double eps = params.epsilon;
    const double cc = params.case_constant_c;
    const int dim = inst.euclid().dim;
    const double adj = euclid_detail::granularity_adjust(dim);
    const int n = st.frac.n;

    EuclidSelection out;

    for (int owner : detail::cluster_owners(st)) {
        const std::vector<int>& mem = st.members[owner];
        EuclidClusterReport rep;
        rep.owner = owner;

        const double slack_h = st.frac.stage_slack[owner];
        const double r_h = inst.balls[owner].radius;
        // Total slack this cluster's routing may spend: the owner's
        // preprocessing slack plus this stage's epsilon.
        const double eps_total = (slack_h - 1.0) + eps;

        std::vector<int> chosen;  // the emitted set for this cluster
        if (mem.empty()) {
            chosen.push_back(owner);
            rep.case_id = 0;
            rep.bound = 1;
        } else {
            double r_m = 0.0;
            for (int t : mem) r_m = std::max(r_m, inst.balls[t].radius);

            if (r_m <= r_h * eps / 2.0) {
                chosen.push_back(owner);
                rep.case_id = 0;
                rep.bound = 1;
            } else {
                double thresh, g;
                bool with_owner;
                if (r_h < r_m * eps / 4.0) {
                    rep.case_id = 1;
                    thresh = r_m * eps / 4.0;
                    g = r_m * eps * eps / 8.0 * adj;
                    with_owner = false;
                } else if (r_h >= r_m / cc) {
                    rep.case_id = 3;
                    thresh = r_m * eps / (2.0 * cc);
                    g = r_m * eps * eps / (4.0 * cc) * adj;
                    with_owner = true;
                } else {
                    rep.case_id = 2;
                    thresh = r_h * eps / 4.0;
                    g = r_h * eps * eps / 8.0 * adj;
                    with_owner = true;
                }
                std::vector<int> candidates;
                for (int t : mem)
                    if (inst.balls[t].radius >= thresh - kTol) candidates.push_back(t);
                if (!with_owner && inst.balls[owner].radius >= thresh - kTol)
                    candidates.push_back(owner);
                std::vector<char> in_chosen(st.frac.m, 0);
                if (!candidates.empty()) {
                    auto grid = euclid_detail::bucket_centers(inst, candidates, g);
                    for (const auto& [key, cell] : grid.cells) {
                        int w = euclid_detail::cell_winner(inst, cell);
                        if (!in_chosen[w]) {
                            in_chosen[w] = 1;
                            chosen.push_back(w);
                        }
                    }
                }
                if (with_owner && !in_chosen[owner]) {
                    in_chosen[owner] = 1;
                    chosen.push_back(owner);
                }
                std::sort(chosen.begin(), chosen.end());

                // Construction bound: candidate centers span at most twice
                // (slack_h * r_h + r_m), one grid cell per dimension spare.
                double span = 2.0 * (slack_h * r_h + r_m);
                double per_dim = std::ceil(span / g) + 1.0;
                rep.bound = static_cast<long long>(
                                std::min(std::pow(per_dim, dim), 9.0e18)) +
                            (with_owner ? 1 : 0);
            }
        }

        // Route the cluster's flow onto the chosen set, capacity-aware.
        std::vector<int> cluster_all = mem;
        cluster_all.push_back(owner);
        std::sort(cluster_all.begin(), cluster_all.end());
        std::vector<char> is_chosen(st.frac.m, 0);
        for (int w : chosen) is_chosen[w] = 1;

        long long cluster_fallbacks = 0;
        auto budget = [&](int b) { return (1.0 + eps_total) * inst.balls[b].radius; };
        // Largest capacity first, canonical order breaking ties.
        std::vector<int> route_order = chosen;
        std::sort(route_order.begin(), route_order.end(), [&](int a, int b) {
            if (inst.balls[a].capacity != inst.balls[b].capacity)
                return inst.balls[a].capacity > inst.balls[b].capacity;
            return ball_before(inst, a, b);
        });

        for (int p = 0; p < n; ++p) {
            double demand = 0.0;
            for (int h : cluster_all) {
                double have = st.frac.xat(h, p);
                if (have <= kTol) continue;
                if (is_chosen[h] && inst.center_dist(h, p) <= budget(h) + kTol) continue;
                demand += have;
            }
            if (demand <= kTol) continue;

            for (int w : route_order) {
                if (demand <= kTol) break;
                if (inst.center_dist(w, p) > budget(w) + kTol) continue;
                double room = static_cast<double>(inst.balls[w].capacity) - st.outflow[w];
                if (room <= kTol) continue;
                for (int h : cluster_all) {
                    if (room <= kTol || demand <= kTol) break;
                    if (h == w) continue;
                    double have = st.frac.xat(h, p);
                    if (have <= kTol) continue;
                    if (is_chosen[h] && inst.center_dist(h, p) <= budget(h) + kTol) continue;
                    double take = std::min({have, room, demand});
                    detail::state_move(st, p, h, w, take);
                    room -= take;
                    demand -= take;
                }
            }

            if (demand > kTol) {
                // Hand the remainder back to the point's original servers,
                // capped per server by its preprocessed load at this point;
                // the cluster's flow here never grew, so this always fits.
                for (int h : cluster_all) {
                    if (demand <= kTol) break;
                    double headroom = st.frac_pre.xat(h, p) - st.frac.xat(h, p);
                    if (headroom <= kTol) continue;
                    if (!is_chosen[h]) {
                        is_chosen[h] = 1;
                        chosen.push_back(h);
                        route_order.push_back(h);
                        st.trace.fallback(owner, h);
                        ++cluster_fallbacks;
                    }
                    for (int h2 : cluster_all) {
                        if (headroom <= kTol || demand <= kTol) break;
                        if (h2 == h) continue;
                        double have = st.frac.xat(h2, p);
                        if (have <= kTol) continue;
                        if (is_chosen[h2] && inst.center_dist(h2, p) <= budget(h2) + kTol)
                            continue;
                        double take = std::min({have, headroom, demand});
                        detail::state_move(st, p, h2, h, take);
                        headroom -= take;
                        demand -= take;
                    }
                }
                check(demand <= 1e-6, "euclidean selection: stranded flow at a point");
            }
        }

        // Winners that ended up serving nothing are not worth opening.
        {
            std::vector<int> kept;
            for (int w : chosen) {
                if (st.outflow[w] > 1e-7)
                    kept.push_back(w);
                else
                    is_chosen[w] = 0;
            }
            chosen.swap(kept);
        }
        for (int b : cluster_all) {
            if (is_chosen[b]) continue;
            check(st.outflow[b] <= 1e-6,
                  "euclidean selection: unselected cluster ball still serves flow");
            if (st.frac.y[b] != 0.0) {
                st.frac.y[b] = 0.0;
                st.trace.yset(b, 0.0);
            }
        }
        for (int w : chosen) {
            if (st.frac.y[w] != 1.0) {
                st.frac.y[w] = 1.0;
                st.trace.yset(w, 1.0);
            }
            st.trace.emit(owner, w);
            check(st.outflow[w] <= static_cast<double>(inst.balls[w].capacity) + 1e-7,
                  "euclidean selection: chosen ball over capacity");
            double sr = detail::serve_radius(inst, st, w);
            double r = inst.balls[w].radius;
            double factor =
                r > 0 ? sr / r : (sr <= kTol ? 1.0 : std::numeric_limits<double>::infinity());
            check(factor <= 1.0 + eps_total + 1e-6,
                  "euclidean selection: serving factor above its budget");
            out.max_serve_factor = std::max(out.max_serve_factor, factor);
            out.selected.push_back(w);
        }
        rep.emitted = static_cast<long long>(chosen.size());
        out.fallback_count += cluster_fallbacks;
        check(rep.emitted <= rep.bound + cluster_fallbacks,
              "euclidean selection: more balls than the construction bound");
        out.clusters.push_back(rep);
    }
    std::sort(out.selected.begin(), out.selected.end());
    st.trace.phase(2);
    return out;
}

inline PipelineResult run_euclid_pipeline(const MetricInstance& inst,
                                          const EuclidParams& params) {
    validate_euclid_params(params);
    if (!inst.euclidean()) throw input_error("euclidean pipeline needs coordinates");
    if (!monotone_capacities(inst))
        throw input_error("euclidean rounding requires monotone capacities");

    const double eps = params.epsilon;
    EuclidParams half = params;
    half.epsilon = eps / 2.0;  // preprocessing and selection split the budget
    RoundingParams rp;
    rp.alpha = params.alpha;

    PipelineResult res;
    res.frac0 = solve_relaxation(inst);
    res.lp_value = res.frac0.lp_value;

    TraceLog log;
    FractionalSolution pre = euclid_preprocess(inst, res.frac0, half, &log);
    RoundingState st = cluster_formation(inst, pre, rp, std::move(log));
    res.h1_count = static_cast<long long>(st.heavy1.size());
    for (int t : st.light1) res.l1_mass += st.y_pre[t];
    res.o_count = static_cast<long long>(st.o_list.size());

    EuclidSelection sel = euclid_select(inst, st, half);
    res.fallback_count = sel.fallback_count;
    for (const auto& c : sel.clusters) {
        res.cluster_counts.push_back(c.emitted);
        res.cluster_count_bounds.push_back(c.bound);
    }

    res.rounded = extract_rounded(inst, sel.selected, st.frac);
    res.trace = std::move(st.trace);
    for (double b : res.rounded.expansion) res.max_beta = std::max(res.max_beta, b);

    res.beta_bound = 1.0 + eps;
    const int dim = inst.euclid().dim;
    const double k_merge = static_cast<double>(euclid_class_count_bound(half.epsilon)) *
                           euclid_cells_per_class_bound(half.epsilon, dim);
    const double k_pre = 1.0 / rp.alpha + k_merge / (rp.alpha * rp.alpha);
    double k_sel = 1.0;
    for (const auto& c : sel.clusters)
        k_sel = std::max(k_sel, static_cast<double>(c.bound));
    res.cost_bound = k_pre * (6.0 + 5.0 * rp.alpha) * k_sel;

    check(res.max_beta <= res.beta_bound + 1e-9, "euclidean pipeline: expansion above 1+eps");
    check(static_cast<double>(res.rounded.cost) <= res.cost_bound * res.lp_value + 1e-6,
          "euclidean pipeline: cost above its construction certificate");
    return res;
}

}  // namespace capcover
