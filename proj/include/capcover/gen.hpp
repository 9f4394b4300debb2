#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "capcover/core.hpp"
#include "capcover/exactsol.hpp"
#include "capcover/instance.hpp"
#include "capcover/solution.hpp"

namespace capcover {

namespace genrand {

inline double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
inline double range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
}
inline long long irange(std::mt19937_64& rng, long long lo, long long hi) {
    return lo + static_cast<long long>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace genrand

enum class CapacityMode { Uniform, MonotoneRandom };

struct RandomSpec {
    uint64_t seed = 1;
    int n = 20;
    int m = 8;
    int d = 2;
    double rmin = 0.05;
    double rmax = 0.3;
    CapacityMode mode = CapacityMode::MonotoneRandom;
    long long uniform_capacity = 3;
    long long cap_min = 1;
    long long cap_max = 6;
};

namespace detail_gen {

// Inflate the closest ball of every uncovered point so coverage holds at
// beta = 1. Runs before capacities are assigned, keeping monotonicity.
inline void repair_coverage(MetricInstance& inst) {
    for (int j = 0; j < inst.num_points(); ++j) {
        bool covered = false;
        for (int i = 0; i < inst.num_balls() && !covered; ++i)
            if (inst.contains(i, j, 1.0)) covered = true;
        if (covered) continue;
        int best = 0;
        double best_d = inst.center_dist(0, j);
        for (int i = 1; i < inst.num_balls(); ++i) {
            double d = inst.center_dist(i, j);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        inst.balls[best].radius = std::max(inst.balls[best].radius, best_d);
    }
}

inline void assign_capacities(MetricInstance& inst, const RandomSpec& spec,
                              std::mt19937_64& rng) {
    const int m = inst.num_balls();
    if (spec.mode == CapacityMode::Uniform) {
        for (auto& b : inst.balls) b.capacity = spec.uniform_capacity;
        return;
    }
    std::vector<long long> caps(m);
    for (auto& c : caps) c = genrand::irange(rng, spec.cap_min, spec.cap_max);
    std::sort(caps.begin(), caps.end());
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (inst.balls[a].radius != inst.balls[b].radius)
            return inst.balls[a].radius < inst.balls[b].radius;
        return a < b;
    });
    for (int i = 0; i < m; ++i) inst.balls[order[i]].capacity = caps[i];
}

}  // namespace detail_gen

inline MetricInstance gen_random_euclidean(const RandomSpec& spec) {
    if (spec.n < 1 || spec.m < 1 || spec.d < 1 || spec.rmin < 0 || spec.rmax < spec.rmin)
        throw input_error("random euclidean generator: impossible parameters");
    std::mt19937_64 rng(spec.seed);
    MetricInstance inst;
    EuclideanGeometry g;
    g.dim = spec.d;
    for (int j = 0; j < spec.n; ++j) {
        std::vector<double> p(spec.d);
        for (double& v : p) v = genrand::unit(rng);
        g.points.push_back(std::move(p));
    }
    for (int i = 0; i < spec.m; ++i) {
        std::vector<double> c(spec.d);
        for (double& v : c) v = genrand::unit(rng);
        g.centers.push_back(std::move(c));
    }
    inst.geometry = std::move(g);
    for (int i = 0; i < spec.m; ++i)
        inst.balls.push_back({i, genrand::range(rng, spec.rmin, spec.rmax), 1});
    detail_gen::repair_coverage(inst);
    detail_gen::assign_capacities(inst, spec, rng);
    return inst;
}

// Random shortest-path metric: a random connected weighted graph over
// points and centers, distances by Dijkstra, radii sampled from realized
// center-to-point distances.
inline MetricInstance gen_random_metric(const RandomSpec& spec) {
    if (spec.n < 1 || spec.m < 1)
        throw input_error("random metric generator: impossible parameters");
    std::mt19937_64 rng(spec.seed);
    const int nn = spec.n + spec.m;

    std::vector<std::vector<std::pair<int, double>>> adj(nn);
    auto add_edge = [&](int a, int b, double w) {
        adj[a].push_back({b, w});
        adj[b].push_back({a, w});
    };
    for (int v = 1; v < nn; ++v)
        add_edge(v, static_cast<int>(genrand::irange(rng, 0, v - 1)),
                 genrand::range(rng, 0.5, 2.0));
    for (int e = 0; e < nn; ++e) {
        int a = static_cast<int>(genrand::irange(rng, 0, nn - 1));
        int b = static_cast<int>(genrand::irange(rng, 0, nn - 1));
        if (a != b) add_edge(a, b, genrand::range(rng, 0.5, 2.0));
    }

    std::vector<double> dist(static_cast<size_t>(nn) * nn,
                             std::numeric_limits<double>::infinity());
    for (int s = 0; s < nn; ++s) {
        std::vector<double> d(nn, std::numeric_limits<double>::infinity());
        std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                            std::greater<>> pq;
        d[s] = 0.0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > d[u]) continue;
            for (auto [v, w] : adj[u])
                if (du + w < d[v]) {
                    d[v] = du + w;
                    pq.push({d[v], v});
                }
        }
        for (int t = 0; t < nn; ++t) dist[static_cast<size_t>(s) * nn + t] = d[t];
    }

    MetricInstance inst;
    ExplicitGeometry g;
    for (int j = 0; j < spec.n; ++j) g.point_names.push_back("p" + std::to_string(j));
    for (int i = 0; i < spec.m; ++i) g.center_names.push_back("c" + std::to_string(i));
    g.dist = std::move(dist);
    inst.geometry = std::move(g);
    for (int i = 0; i < spec.m; ++i) {
        int probe = static_cast<int>(genrand::irange(rng, 0, spec.n - 1));
        double base = inst.distance(spec.n + i, probe);
        inst.balls.push_back({i, base * genrand::range(rng, 0.3, 0.8), 1});
    }
    detail_gen::repair_coverage(inst);
    detail_gen::assign_capacities(inst, spec, rng);
    return inst;
}

// ---------------------------------------------------------------------------
// Hardness gadget: a bounded three-dimensional matching instance rendered
// as a covering instance over a shortest-path metric, uniform capacity 3,
// two radii, with a canonical solution per triple cover.
// ---------------------------------------------------------------------------

struct GadgetSpec3DM {
    int N = 1;
    std::vector<std::array<int, 3>> triples;  // (x, y, z), 0-based per side
    double c = 1.0;

    long long p() const {
        return static_cast<long long>(std::ceil(c * (c + 1.0) / 2.0 - 1e-12)) + 1;
    }
    long long element_balls() const { return 3LL * N * (4 * p() + 1); }
};

inline void validate_gadget_spec(const GadgetSpec3DM& spec) {
    if (spec.N < 1) throw input_error("gadget: N must be positive");
    if (spec.c < 1.0) throw input_error("gadget: expansion constant below 1");
    std::vector<int> mult(3 * spec.N, 0);
    for (const auto& t : spec.triples) {
        for (int s = 0; s < 3; ++s)
            if (t[s] < 0 || t[s] >= spec.N) throw input_error("gadget: triple index out of range");
        ++mult[t[0]];
        ++mult[spec.N + t[1]];
        ++mult[2 * spec.N + t[2]];
    }
    for (int e = 0; e < 3 * spec.N; ++e)
        if (mult[e] < 1 || mult[e] > 3)
            throw input_error("gadget: element " + std::to_string(e) +
                              " occurs in " + std::to_string(mult[e]) + " triples");
}

struct GadgetInstance {
    MetricInstance inst;
    long long p = 0;
    std::vector<int> element_ball_ids;
    std::vector<int> triple_ball_ids;                // parallel to spec.triples
    std::vector<std::array<int, 3>> ideal_points;    // per element gadget
    std::vector<std::array<int, 3>> attach_points;   // per triple, point ids used
    std::vector<std::array<long long, 3>> edges;     // (u, v, scaled weight)
};

inline GadgetInstance gen_3dm_gadget(const GadgetSpec3DM& spec) {
    validate_gadget_spec(spec);
    const long long scale = 1'000'000;
    const long long w_small = scale;
    const long long w_large = std::llround(spec.c * static_cast<double>(scale));
    if (std::abs(static_cast<double>(w_large) / scale - spec.c) > 1e-9)
        throw input_error("gadget: expansion constant needs at most 6 decimals");

    const long long p = spec.p();
    const long long k_clusters = 4 * p + 1;
    const int elements = 3 * spec.N;

    GadgetInstance out;
    out.p = p;

    // Element gadget layout per element: chain positions 0..4p, large
    // clusters at positions p and 3p, ideal bottoms at 0, 2p, 4p.
    int num_points = 0;

    struct PendingBall {
        int center_vertex;
        bool large;
    };
    std::vector<PendingBall> pending;
    std::vector<std::array<long long, 3>> edges;

    // Vertex ids: all point vertices first (chain, tops, bottoms per
    // element, in element order), centers afterwards. We build with
    // provisional ids and remap at the end.
    int next_vertex = 0;
    auto new_vertex = [&]() { return next_vertex++; };

    std::vector<int> point_vertices;
    std::vector<int> center_vertices;

    for (int e = 0; e < elements; ++e) {
        std::vector<int> chain(k_clusters + 1), tops(k_clusters), bottoms(k_clusters);
        for (auto& v : chain) {
            v = new_vertex();
            point_vertices.push_back(v);
        }
        for (long long k = 0; k < k_clusters; ++k) {
            tops[k] = new_vertex();
            point_vertices.push_back(tops[k]);
            bottoms[k] = new_vertex();
            point_vertices.push_back(bottoms[k]);
        }
        for (long long k = 0; k < k_clusters; ++k) {
            int center = new_vertex();
            center_vertices.push_back(center);
            bool large = (k == p) || (k == 3 * p);
            long long w = large ? w_large : w_small;
            edges.push_back({center, chain[k], w});
            edges.push_back({center, chain[k + 1], w});
            edges.push_back({center, tops[k], w});
            edges.push_back({center, bottoms[k], w});
            pending.push_back({center, large});
        }
        out.ideal_points.push_back({bottoms[0], bottoms[2 * p], bottoms[4 * p]});
    }

    // Triple gadgets: one large-radius ball whose three spokes attach to
    // per-element ideal points, a fresh one per incidence.
    std::vector<int> ideal_used(elements, 0);
    std::vector<PendingBall> triple_pending;
    for (const auto& t : spec.triples) {
        int center = new_vertex();
        center_vertices.push_back(center);
        std::array<int, 3> attach{};
        const std::array<int, 3> elem_idx = {t[0], spec.N + t[1], 2 * spec.N + t[2]};
        for (int s = 0; s < 3; ++s) {
            int e = elem_idx[s];
            check(ideal_used[e] < 3, "gadget: element out of ideal points");
            attach[s] = out.ideal_points[e][ideal_used[e]++];
            edges.push_back({center, attach[s], w_large});
        }
        out.attach_points.push_back(attach);
        triple_pending.push_back({center, true});
    }

    // Remap: points keep relative order and squeeze to 0..P-1; centers
    // follow as P..P+C-1.
    const int total_vertices = next_vertex;
    std::vector<int> remap(total_vertices, -1);
    int pid = 0;
    for (int v : point_vertices) remap[v] = pid++;
    num_points = pid;
    int cid = 0;
    for (int v : center_vertices) remap[v] = num_points + cid++;
    const int num_centers = cid;
    const int nn = num_points + num_centers;

    std::vector<std::vector<std::pair<int, long long>>> adj(nn);
    for (auto& [u, v, w] : edges) {
        int a = remap[static_cast<int>(u)];
        int b = remap[static_cast<int>(v)];
        adj[a].push_back({b, w});
        adj[b].push_back({a, w});
        out.edges.push_back({a, b, w});
    }
    for (auto& ip : out.ideal_points)
        for (int s = 0; s < 3; ++s) ip[s] = remap[ip[s]];
    for (auto& ap : out.attach_points)
        for (int s = 0; s < 3; ++s) ap[s] = remap[ap[s]];

    // Exact integer shortest paths.
    std::vector<double> dist(static_cast<size_t>(nn) * nn, 0.0);
    const long long inf = std::numeric_limits<long long>::max() / 4;
    for (int s = 0; s < nn; ++s) {
        std::vector<long long> d(nn, inf);
        std::priority_queue<std::pair<long long, int>,
                            std::vector<std::pair<long long, int>>, std::greater<>> pq;
        d[s] = 0;
        pq.push({0, s});
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > d[u]) continue;
            for (auto [v, w] : adj[u])
                if (du + w < d[v]) {
                    d[v] = du + w;
                    pq.push({d[v], v});
                }
        }
        for (int t = 0; t < nn; ++t) {
            check(d[t] < inf, "gadget: graph not connected");
            dist[static_cast<size_t>(s) * nn + t] =
                static_cast<double>(d[t]) / static_cast<double>(scale);
        }
    }

    ExplicitGeometry g;
    for (int j = 0; j < num_points; ++j) g.point_names.push_back("v" + std::to_string(j));
    for (int i = 0; i < num_centers; ++i) g.center_names.push_back("c" + std::to_string(i));
    g.dist = std::move(dist);
    out.inst.geometry = std::move(g);

    auto push_ball = [&](const PendingBall& pb) {
        int id = static_cast<int>(out.inst.balls.size());
        double radius = pb.large ? static_cast<double>(w_large) / scale : 1.0;
        out.inst.balls.push_back({remap[pb.center_vertex] - num_points, radius, 3});
        return id;
    };
    for (const auto& pb : pending) out.element_ball_ids.push_back(push_ball(pb));
    for (const auto& pb : triple_pending) out.triple_ball_ids.push_back(push_ball(pb));

    check(static_cast<long long>(out.element_ball_ids.size()) == spec.element_balls(),
          "gadget: element ball count mismatch");
    return out;
}

// The canonical solution for a triple cover: all element balls plus the
// cover's triple balls, with a witness assignment extracted by max-flow.
inline RoundedSolution gadget_canonical_solution(const GadgetInstance& gadget,
                                                 const std::vector<int>& cover) {
    std::vector<int> selected = gadget.element_ball_ids;
    for (int t : cover) {
        if (t < 0 || t >= static_cast<int>(gadget.triple_ball_ids.size()))
            throw input_error("gadget: cover references unknown triple");
        selected.push_back(gadget.triple_ball_ids[t]);
    }
    std::sort(selected.begin(), selected.end());

    const MetricInstance& inst = gadget.inst;
    const int n = inst.num_points();
    FractionalSolution support = FractionalSolution::zeros(inst.num_balls(), n);
    for (int i : selected)
        for (int j = 0; j < n; ++j)
            if (inst.contains(i, j, 1.0)) support.xat(i, j) = 1.0;

    RoundedSolution sol;
    sol.selected = selected;
    sol.assignment = integral_assignment(inst, selected, support);
    sol.cost = static_cast<long long>(selected.size());
    sol.expansion.assign(selected.size(), 1.0);
    return sol;
}

}  // namespace capcover
