#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "capcover/lp.hpp"
#include "capcover/relax.hpp"
#include "helpers.hpp"

using namespace capcover;

TEST_CASE("forced variable") {
    LpProblem lp = LpProblem::with_vars(1);
    lp.objective = {1.0};
    lp.hi[0] = 1.0;
    lp.add_row({1.0}, Rel::Ge, 1.0);
    LpSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Catch::Approx(1.0));
    CHECK(sol.assignment[0] == Catch::Approx(1.0));
}

TEST_CASE("contradictory bounds are infeasible") {
    LpProblem lp = LpProblem::with_vars(2);
    lp.objective = {1.0, 1.0};
    lp.hi[0] = 1.0;
    lp.add_row({1.0, 0.0}, Rel::Ge, 2.0);
    CHECK(simplex_solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded detection") {
    LpProblem lp = LpProblem::with_vars(1);
    lp.objective = {-1.0};
    lp.add_row({1.0}, Rel::Ge, 0.0);
    CHECK(simplex_solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("oracle basics") {
    LpProblem lp = LpProblem::with_vars(1);
    lp.objective = {1.0};
    lp.hi[0] = 1.0;
    lp.add_row({1.0}, Rel::Ge, 1.0);
    OracleResult r = vertex_enum_oracle(lp);
    REQUIRE(r.feasible);
    CHECK(r.value == Catch::Approx(1.0));

    LpProblem facet = LpProblem::with_vars(2);
    facet.objective = {1.0, 1.0};
    facet.hi = {1.0, 1.0};
    facet.add_row({1.0, 1.0}, Rel::Ge, 1.0);
    OracleResult rf = vertex_enum_oracle(facet);
    REQUIRE(rf.feasible);
    CHECK(rf.value == Catch::Approx(1.0));
}

static LpProblem random_tiny_lp(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };
    const int nvars = pick(1, 5);
    const int nrows = pick(1, std::min(6, 16 - 2 * nvars));
    LpProblem lp = LpProblem::with_vars(nvars);
    for (int v = 0; v < nvars; ++v) {
        lp.objective[v] = pick(-3, 3);
        lp.hi[v] = pick(1, 2);
    }
    for (int r = 0; r < nrows; ++r) {
        std::vector<double> a(nvars);
        for (double& x : a) x = pick(-3, 3);
        Rel rel = std::array{Rel::Le, Rel::Eq, Rel::Ge}[pick(0, 2)];
        lp.add_row(std::move(a), rel, pick(-2, 4));
    }
    return lp;
}

TEST_CASE("simplex agrees with the enumeration oracle on random tiny LPs") {
    std::mt19937_64 rng(20240517);
    int optimal_seen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        LpProblem lp = random_tiny_lp(rng);
        OracleResult oracle = vertex_enum_oracle(lp);
        LpSolution sol = simplex_solve(lp);
        if (oracle.feasible) {
            REQUIRE(sol.status == LpStatus::Optimal);
            CHECK(sol.value == Catch::Approx(oracle.value).margin(1e-6));
            ++optimal_seen;
        } else {
            CHECK(sol.status == LpStatus::Infeasible);
        }
    }
    CHECK(optimal_seen >= 20);
}

TEST_CASE("optimal solutions satisfy their rows") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        LpProblem lp = random_tiny_lp(rng);
        LpSolution sol = simplex_solve(lp);
        if (sol.status != LpStatus::Optimal) continue;
        for (const auto& row : lp.rows) {
            double lhs = 0;
            for (int v = 0; v < lp.num_vars(); ++v) lhs += row.coeffs[v] * sol.assignment[v];
            if (row.rel == Rel::Le) CHECK(lhs <= row.rhs + 1e-7);
            if (row.rel == Rel::Ge) CHECK(lhs >= row.rhs - 1e-7);
            if (row.rel == Rel::Eq) CHECK(lhs == Catch::Approx(row.rhs).margin(1e-7));
        }
        double obj = 0;
        for (int v = 0; v < lp.num_vars(); ++v) obj += lp.objective[v] * sol.assignment[v];
        CHECK(obj == Catch::Approx(sol.value).margin(1e-7));
    }
}

TEST_CASE("identical inputs give identical pivots and output") {
    std::mt19937_64 rng(99);
    LpProblem lp = random_tiny_lp(rng);
    LpSolution a = simplex_solve(lp);
    LpSolution b = simplex_solve(lp);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
        CHECK(a.assignment == b.assignment);
        CHECK(a.basis == b.basis);
        CHECK(a.value == b.value);
    }
}

TEST_CASE("two-ball covering relaxation agrees with the oracle") {
    // Two identical unit balls of capacity 1 and two points inside both:
    // total flow 2 forces y1 + y2 = 2.
    MetricInstance inst = testutil::plane_instance({{0.0, 0.1}, {0.0, -0.1}},
                                                   {{0.0, 0.0}, {0.0, 0.0}},
                                                   {{1.0, 1}, {1.0, 1}});
    MmccLp built = build_mmcc_lp(inst);
    OracleResult oracle = vertex_enum_oracle(built.lp);
    REQUIRE(oracle.feasible);
    CHECK(oracle.value == Catch::Approx(2.0).margin(1e-9));
    LpSolution sol = simplex_solve(built.lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("oracle size caps") {
    LpProblem lp = LpProblem::with_vars(13);
    lp.objective.assign(13, 1.0);
    CHECK_THROWS_AS(vertex_enum_oracle(lp), input_error);
}
