#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "capcover/exactsol.hpp"
#include "capcover/gen.hpp"
#include "capcover/io.hpp"
#include "capcover/relax.hpp"

using namespace capcover;

TEST_CASE("random euclidean generator is deterministic, monotone and coverable") {
    RandomSpec spec;
    spec.seed = 42;
    spec.n = 20;
    spec.m = 8;
    spec.d = 2;
    MetricInstance a = gen_random_euclidean(spec);
    MetricInstance b = gen_random_euclidean(spec);
    CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());

    ValidationReport rep = validate_instance(a);
    CHECK(rep.is_valid);
    for (int j = 0; j < a.num_points(); ++j) {
        bool covered = false;
        for (int i = 0; i < a.num_balls(); ++i)
            if (a.contains(i, j, 1.0)) covered = true;
        CHECK(covered);
    }
}

TEST_CASE("random metric generator is deterministic and triangle-clean") {
    RandomSpec spec;
    spec.seed = 7;
    spec.n = 12;
    spec.m = 5;
    MetricInstance a = gen_random_metric(spec);
    MetricInstance b = gen_random_metric(spec);
    CHECK(a.metric().dist == b.metric().dist);
    ValidationReport rep = validate_instance(a);  // includes the triangle scan
    CHECK(rep.is_valid);
}

TEST_CASE("uniform capacity mode") {
    RandomSpec spec;
    spec.seed = 3;
    spec.mode = CapacityMode::Uniform;
    spec.uniform_capacity = 4;
    MetricInstance inst = gen_random_euclidean(spec);
    for (const auto& b : inst.balls) CHECK(b.capacity == 4);
}

TEST_CASE("gadget arithmetic for the unit expansion constant") {
    GadgetSpec3DM spec;
    spec.N = 1;
    spec.c = 1.0;
    spec.triples = {{0, 0, 0}};
    CHECK(spec.p() == 2);
    CHECK(spec.element_balls() == 27);

    GadgetInstance g = gen_3dm_gadget(spec);
    CHECK(g.inst.num_balls() == 28);  // 27 element balls + 1 triple ball
    CHECK(g.inst.num_points() == 3 * (3 * 9 + 1));
    std::set<double> radii;
    for (const auto& b : g.inst.balls) {
        CHECK(b.capacity == 3);
        radii.insert(b.radius);
    }
    CHECK(radii == std::set<double>{1.0});

    // Independent structural count walked over the built graph: every
    // element-ball center has degree 4, every triple-ball center degree 3.
    std::vector<int> degree(g.inst.num_nodes(), 0);
    for (const auto& [u, v, w] : g.edges) {
        ++degree[u];
        ++degree[v];
    }
    const int np = g.inst.num_points();
    for (int id : g.element_ball_ids)
        CHECK(degree[np + g.inst.balls[id].center] == 4);
    for (int id : g.triple_ball_ids)
        CHECK(degree[np + g.inst.balls[id].center] == 3);
    long long vertex_count = 0;
    std::set<int> seen;
    for (const auto& [u, v, w] : g.edges) {
        seen.insert(static_cast<int>(u));
        seen.insert(static_cast<int>(v));
    }
    vertex_count = static_cast<long long>(seen.size());
    CHECK(vertex_count == g.inst.num_nodes());
}

TEST_CASE("canonical gadget solution is feasible at beta one") {
    GadgetSpec3DM spec;
    spec.N = 1;
    spec.c = 1.0;
    spec.triples = {{0, 0, 0}};
    GadgetInstance g = gen_3dm_gadget(spec);
    RoundedSolution canon = gadget_canonical_solution(g, {0});
    CHECK(canon.cost == 28);
    ValidationReport rep = verify_solution(g.inst, canon, 1.0);
    if (!rep.is_valid)
        FAIL(rep.violations.front().kind + ": " + rep.violations.front().detail);

    FractionalSolution f = solve_relaxation(g.inst);
    CHECK(f.lp_value <= 28.0 + 1e-6);
}

TEST_CASE("gadget with a larger expansion constant keeps two radii") {
    GadgetSpec3DM spec;
    spec.N = 1;
    spec.c = 2.0;
    spec.triples = {{0, 0, 0}};
    CHECK(spec.p() == 4);  // ceil(2*3/2) + 1
    GadgetInstance g = gen_3dm_gadget(spec);
    std::set<double> radii;
    for (const auto& b : g.inst.balls) radii.insert(b.radius);
    CHECK(radii == std::set<double>{1.0, 2.0});
    CHECK(static_cast<long long>(g.element_ball_ids.size()) == 3 * (4 * 4 + 1));
    RoundedSolution canon = gadget_canonical_solution(g, {0});
    CHECK(verify_solution(g.inst, canon, 1.0).is_valid);
}

TEST_CASE("gadget with several elements and triples") {
    GadgetSpec3DM spec;
    spec.N = 2;
    spec.c = 1.0;
    spec.triples = {{0, 0, 0}, {1, 1, 1}, {0, 1, 0}};
    GadgetInstance g = gen_3dm_gadget(spec);
    CHECK(g.inst.num_balls() == 54 + 3);
    ValidationReport rep = validate_instance(g.inst, {.triangle_node_limit = 250});
    CHECK(rep.is_valid);
    // All three triples together form a cover.
    RoundedSolution canon = gadget_canonical_solution(g, {0, 1, 2});
    CHECK(canon.cost == 54 + 3);
    CHECK(verify_solution(g.inst, canon, 1.0).is_valid);
}

TEST_CASE("gadget specs are validated") {
    GadgetSpec3DM four;
    four.N = 1;
    four.c = 1.0;
    four.triples = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    CHECK_THROWS_AS(gen_3dm_gadget(four), input_error);

    GadgetSpec3DM none;
    none.N = 2;
    none.c = 1.0;
    none.triples = {{0, 0, 0}};  // element 1 uncovered
    CHECK_THROWS_AS(gen_3dm_gadget(none), input_error);
}
