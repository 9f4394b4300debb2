#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "capcover/core.hpp"

namespace capcover {

// A capacitated ball: center is an index into the instance's center list.
struct Ball {
    int center = 0;
    double radius = 0.0;
    long long capacity = 1;
};

// Node ids address points first, then centers: point j is node j,
// center k is node n + k.
struct EuclideanGeometry {
    int dim = 0;
    std::vector<std::vector<double>> points;
    std::vector<std::vector<double>> centers;
};

struct ExplicitGeometry {
    std::vector<std::string> point_names;
    std::vector<std::string> center_names;
    std::vector<double> dist;  // (n+m)^2 row-major over points++centers
};

class MetricInstance {
public:
    std::variant<EuclideanGeometry, ExplicitGeometry> geometry;
    std::vector<Ball> balls;

    bool euclidean() const { return std::holds_alternative<EuclideanGeometry>(geometry); }
    const EuclideanGeometry& euclid() const { return std::get<EuclideanGeometry>(geometry); }
    const ExplicitGeometry& metric() const { return std::get<ExplicitGeometry>(geometry); }

    int num_points() const {
        if (euclidean()) return static_cast<int>(euclid().points.size());
        return static_cast<int>(metric().point_names.size());
    }
    int num_centers() const {
        if (euclidean()) return static_cast<int>(euclid().centers.size());
        return static_cast<int>(metric().center_names.size());
    }
    int num_balls() const { return static_cast<int>(balls.size()); }
    int num_nodes() const { return num_points() + num_centers(); }

    double distance(int a, int b) const {
        const int nn = num_nodes();
        if (a < 0 || b < 0 || a >= nn || b >= nn)
            throw input_error("distance: unknown node id");
        if (a == b) return 0.0;
        if (euclidean()) {
            const auto& ca = node_coords(a);
            const auto& cb = node_coords(b);
            double s = 0.0;
            for (size_t t = 0; t < ca.size(); ++t) {
                double d = ca[t] - cb[t];
                s += d * d;
            }
            return std::sqrt(s);
        }
        return metric().dist[static_cast<size_t>(a) * nn + b];
    }

    // Distance from a ball's center to point j.
    double center_dist(int ball_id, int point) const {
        return distance(num_points() + balls[ball_id].center, point);
    }

    bool contains(int ball_id, int point, double beta) const {
        return center_dist(ball_id, point) <= beta * balls[ball_id].radius + kTol;
    }

    const std::vector<double>& node_coords(int node) const {
        const auto& g = euclid();
        int n = static_cast<int>(g.points.size());
        return node < n ? g.points[node] : g.centers[node - n];
    }
};

// Canonical ball ordering used everywhere a deterministic choice among
// balls is needed: radius desc, capacity desc, id asc.
inline bool ball_before(const MetricInstance& inst, int a, int b) {
    const Ball& ba = inst.balls[a];
    const Ball& bb = inst.balls[b];
    if (ba.radius != bb.radius) return ba.radius > bb.radius;
    if (ba.capacity != bb.capacity) return ba.capacity > bb.capacity;
    return a < b;
}

inline std::vector<int> balls_in_canonical_order(const MetricInstance& inst) {
    std::vector<int> order(inst.balls.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ball_before(inst, a, b); });
    return order;
}

struct Violation {
    std::string kind;
    std::string detail;
};

struct ValidationReport {
    bool is_valid = true;
    std::vector<Violation> violations;

    void add(std::string kind, std::string detail) {
        is_valid = false;
        violations.push_back({std::move(kind), std::move(detail)});
    }
    bool has(const std::string& kind) const {
        for (const auto& v : violations)
            if (v.kind == kind) return true;
        return false;
    }
};

struct ValidationOptions {
    // The full triangle-inequality scan is cubic; skip it past this size
    // unless forced.
    int triangle_node_limit = 400;
    bool force_triangle = false;
};

inline ValidationReport validate_instance(const MetricInstance& inst,
                                           ValidationOptions opts = {}) {
    ValidationReport rep;
    const int n = inst.num_points();
    const int m = inst.num_balls();
    const int nn = inst.num_nodes();

    for (int i = 0; i < m; ++i) {
        const Ball& b = inst.balls[i];
        if (b.center < 0 || b.center >= inst.num_centers())
            rep.add("center", "ball " + std::to_string(i) + " has unknown center");
        if (b.radius < 0)
            rep.add("radius", "ball " + std::to_string(i) + " has negative radius");
        if (b.capacity < 1)
            rep.add("capacity", "ball " + std::to_string(i) + " has capacity < 1");
    }

    if (inst.euclidean()) {
        const auto& g = inst.euclid();
        for (const auto& p : g.points)
            if (static_cast<int>(p.size()) != g.dim)
                rep.add("dimension", "point coordinate arity != dimension");
        for (const auto& c : g.centers)
            if (static_cast<int>(c.size()) != g.dim)
                rep.add("dimension", "center coordinate arity != dimension");
    } else {
        const auto& g = inst.metric();
        if (g.dist.size() != static_cast<size_t>(nn) * nn) {
            rep.add("matrix", "metric matrix has wrong shape");
            return rep;
        }
        for (int a = 0; a < nn; ++a) {
            if (std::abs(g.dist[static_cast<size_t>(a) * nn + a]) > kTol)
                rep.add("diagonal", "d(" + std::to_string(a) + "," + std::to_string(a) + ") != 0");
            for (int b = a + 1; b < nn; ++b) {
                double dab = g.dist[static_cast<size_t>(a) * nn + b];
                double dba = g.dist[static_cast<size_t>(b) * nn + a];
                if (dab < -kTol) rep.add("negative", "negative distance entry");
                if (std::abs(dab - dba) > kTol)
                    rep.add("symmetry", "d(" + std::to_string(a) + "," + std::to_string(b) +
                                            ") asymmetric");
            }
        }
        if (opts.force_triangle || nn <= opts.triangle_node_limit) {
            for (int a = 0; a < nn && !rep.has("triangle"); ++a)
                for (int b = 0; b < nn && !rep.has("triangle"); ++b)
                    for (int c = 0; c < nn; ++c) {
                        double ab = g.dist[static_cast<size_t>(a) * nn + b];
                        double bc = g.dist[static_cast<size_t>(b) * nn + c];
                        double ac = g.dist[static_cast<size_t>(a) * nn + c];
                        if (ac > ab + bc + kTol) {
                            rep.add("triangle",
                                    "d(" + std::to_string(a) + "," + std::to_string(c) +
                                        ") > d(.," + std::to_string(b) + ") sum");
                            break;
                        }
                    }
        }
    }

    // Monotone capacities: a strictly larger radius may not have a
    // strictly smaller capacity. Reported as its own kind so callers can
    // route instances to modes that do not need it.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (inst.balls[i].radius > inst.balls[j].radius + kTol &&
                inst.balls[i].capacity < inst.balls[j].capacity) {
                rep.add("monotonicity", "balls " + std::to_string(i) + "," + std::to_string(j));
                goto mono_done;
            }
mono_done:

    for (int j = 0; j < n; ++j) {
        bool covered = false;
        for (int i = 0; i < m && !covered; ++i)
            if (inst.contains(i, j, 1.0)) covered = true;
        if (!covered) rep.add("coverage", "point " + std::to_string(j) + " lies in no ball");
    }

    return rep;
}

inline bool monotone_capacities(const MetricInstance& inst) {
    for (size_t i = 0; i < inst.balls.size(); ++i)
        for (size_t j = 0; j < inst.balls.size(); ++j)
            if (inst.balls[i].radius > inst.balls[j].radius + kTol &&
                inst.balls[i].capacity < inst.balls[j].capacity)
                return false;
    return true;
}

inline bool uniform_capacities(const MetricInstance& inst) {
    for (const auto& b : inst.balls)
        if (b.capacity != inst.balls[0].capacity) return false;
    return true;
}

}  // namespace capcover
