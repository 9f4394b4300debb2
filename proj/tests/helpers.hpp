#pragma once

#include <vector>

#include "capcover/exactsol.hpp"
#include "capcover/instance.hpp"
#include "capcover/relax.hpp"

namespace testutil {

using namespace capcover;

// Random instances may lack the capacity for any unit-expansion
// assignment; bump all capacities together until one exists.
inline MetricInstance ensure_feasible(MetricInstance inst) {
    std::vector<int> all(inst.num_balls());
    for (int i = 0; i < inst.num_balls(); ++i) all[i] = i;
    while (!feasible_assignment_exists(inst, all, 1.0))
        for (auto& b : inst.balls) b.capacity += 1;
    return inst;
}

// One-dimensional euclidean instance builder: centers and points on a line.
inline MetricInstance line_instance(const std::vector<double>& points,
                                    const std::vector<double>& centers,
                                    const std::vector<std::pair<double, long long>>& balls) {
    MetricInstance inst;
    EuclideanGeometry g;
    g.dim = 1;
    for (double p : points) g.points.push_back({p});
    for (double c : centers) g.centers.push_back({c});
    inst.geometry = std::move(g);
    for (size_t i = 0; i < balls.size(); ++i)
        inst.balls.push_back({static_cast<int>(i), balls[i].first, balls[i].second});
    return inst;
}

inline MetricInstance plane_instance(const std::vector<std::vector<double>>& points,
                                     const std::vector<std::vector<double>>& centers,
                                     const std::vector<std::pair<double, long long>>& balls) {
    MetricInstance inst;
    EuclideanGeometry g;
    g.dim = 2;
    g.points = points;
    g.centers = centers;
    inst.geometry = std::move(g);
    for (size_t i = 0; i < balls.size(); ++i)
        inst.balls.push_back({static_cast<int>(i), balls[i].first, balls[i].second});
    return inst;
}

}  // namespace testutil
