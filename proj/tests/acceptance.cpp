// End-to-end acceptance suite: one line per criterion, nonzero exit on any
// failure. Seeds are fixed; every bound is checked at its stated tolerance.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "capcover/euclid.hpp"
#include "capcover/exactsol.hpp"
#include "capcover/gen.hpp"
#include "capcover/instance.hpp"
#include "capcover/io.hpp"
#include "capcover/lp.hpp"
#include "capcover/relax.hpp"
#include "capcover/rounding.hpp"
#include "capcover/trace.hpp"

using namespace capcover;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
long long g_replays = 0;
long long g_replay_violations = 0;
std::string g_replay_detail;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int idx, const std::string& name, bool pass, const std::string& detail,
            double secs) {
    std::printf("[%s] criterion %d: %s — %s (%.1fs)\n", pass ? "PASS" : "FAIL", idx,
                name.c_str(), detail.c_str(), secs);
    if (!pass) ++g_failures;
}

// Seeded instance family shared by the pipeline criteria. Capacities are
// bumped uniformly until a unit-expansion assignment exists, so the
// relaxation is always feasible.
MetricInstance seeded_instance(uint64_t seed, int max_n, int max_m, bool euclid_geom,
                               bool uniform_caps, int dim = 2) {
    std::mt19937_64 rng(seed * 77 + 13);
    auto pick = [&](long long lo, long long hi) {
        return lo + static_cast<long long>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };
    RandomSpec spec;
    spec.seed = seed;
    spec.n = static_cast<int>(pick(std::min(8, max_n), max_n));
    spec.m = static_cast<int>(pick(std::min(4, max_m), max_m));
    spec.d = dim;
    spec.rmin = 0.03 + 0.02 * static_cast<double>(pick(0, 3));
    spec.rmax = spec.rmin + 0.1 + 0.05 * static_cast<double>(pick(0, 5));
    if (uniform_caps) {
        spec.mode = CapacityMode::Uniform;
        spec.uniform_capacity = pick(1, 5);
    } else {
        spec.cap_min = 1;
        spec.cap_max = pick(3, 6);
    }
    MetricInstance inst = euclid_geom ? gen_random_euclidean(spec) : gen_random_metric(spec);

    std::vector<int> all(inst.num_balls());
    for (int i = 0; i < inst.num_balls(); ++i) all[i] = i;
    while (!feasible_assignment_exists(inst, all, 1.0))
        for (auto& b : inst.balls) b.capacity += 1;
    return inst;
}

// Tightly clumped points under many overlapping low-capacity balls; this
// shape puts real pressure on the merge and selection machinery.
MetricInstance clumped_instance(uint64_t seed, bool uniform_caps) {
    std::mt19937_64 rng(seed);
    auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };
    MetricInstance inst;
    EuclideanGeometry g;
    g.dim = 2;
    int sites = pick(2, 4);
    std::vector<std::pair<double, double>> spots;
    for (int s = 0; s < sites; ++s) spots.push_back({0.2 + 0.6 * uni(), 0.2 + 0.6 * uni()});
    int per = pick(4, 8);
    for (int s = 0; s < sites; ++s)
        for (int i = 0; i < per; ++i)
            g.points.push_back({spots[s].first + 0.04 * (uni() - 0.5),
                                spots[s].second + 0.04 * (uni() - 0.5)});
    int m = pick(12, 28);
    for (int i = 0; i < m; ++i) {
        int s = pick(0, sites - 1);
        g.centers.push_back({spots[s].first + 0.08 * (uni() - 0.5),
                             spots[s].second + 0.08 * (uni() - 0.5)});
    }
    inst.geometry = std::move(g);
    for (int i = 0; i < m; ++i) inst.balls.push_back({i, 0.05 + 0.1 * uni(), 1});
    for (int j = 0; j < inst.num_points(); ++j) {
        bool cov = false;
        for (int i = 0; i < m && !cov; ++i) cov = inst.contains(i, j, 1.0);
        if (cov) continue;
        int best = 0;
        double bd = inst.center_dist(0, j);
        for (int i = 1; i < m; ++i)
            if (inst.center_dist(i, j) < bd) {
                bd = inst.center_dist(i, j);
                best = i;
            }
        inst.balls[best].radius = std::max(inst.balls[best].radius, bd);
    }
    if (uniform_caps) {
        long long cap = pick(1, 2);
        for (auto& b : inst.balls) b.capacity = cap;
    } else {
        std::vector<long long> caps(m);
        for (auto& c : caps) c = pick(1, 2);
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
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    while (!feasible_assignment_exists(inst, all, 1.0))
        for (auto& b : inst.balls) b.capacity += 1;
    return inst;
}

void record_replay(const MetricInstance& inst, const PipelineResult& res, double alpha) {
    ++g_replays;
    ValidationReport rep = replay_verify(inst, res.frac0, res.trace, alpha);
    if (!rep.is_valid) {
        g_replay_violations += static_cast<long long>(rep.violations.size());
        if (g_replay_detail.empty())
            g_replay_detail = rep.violations.front().kind + ": " + rep.violations.front().detail;
    }
}

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    double worst_ratio = 0.0, worst_beta = 0.0;
    for (uint64_t seed = 1; seed <= 500 && pass; ++seed) {
        MetricInstance inst = seed <= 400
                                  ? seeded_instance(seed, 120, 40, seed % 2 == 0, false)
                                  : clumped_instance(seed, false);
        try {
            PipelineResult res = run_metric_pipeline(inst, {});
            ValidationReport v = verify_solution(inst, res.rounded, 9.0);
            if (!v.is_valid) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": " + v.violations.front().kind;
            }
            if (static_cast<double>(res.rounded.cost) > 21.0 * res.lp_value + 1e-6) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": cost above 21 * lp";
            }
            worst_ratio = std::max(worst_ratio, static_cast<double>(res.rounded.cost) /
                                                    res.lp_value);
            worst_beta = std::max(worst_beta, res.max_beta);
            record_replay(inst, res, 0.375);
        } catch (const std::exception& e) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": " + e.what();
        }
    }
    if (pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "500 instances, beta <= 9 and cost <= 21*lp; worst ratio %.3f, worst beta %.3f",
                      worst_ratio, worst_beta);
        detail = buf;
    }
    report(1, "general metric rounding bounds", pass, detail, seconds_since(t0));
}

void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (uint64_t seed = 1; seed <= 100 && pass; ++seed) {
        MetricInstance inst = seeded_instance(seed + 9000, 16, 10, seed % 2 == 1, false);
        try {
            PipelineResult res = run_metric_pipeline(inst, {});
            BruteForceResult opt = brute_force_opt(inst);
            if (opt.opt < 1) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": no exact optimum";
                break;
            }
            double o = static_cast<double>(opt.opt);
            if (res.lp_value > o + 1e-6 || o > static_cast<double>(res.rounded.cost) + 1e-6 ||
                static_cast<double>(res.rounded.cost) > 21.0 * o + 1e-6) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": sandwich violated";
            }
        } catch (const std::exception& e) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": " + e.what();
        }
    }
    if (pass) detail = "100 instances, lp <= opt <= cost <= 21*opt";
    report(2, "exact-oracle sandwich", pass, detail, seconds_since(t0));
}

void criterion_3() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    double worst_beta = 0.0;
    for (uint64_t seed = 1; seed <= 200 && pass; ++seed) {
        MetricInstance inst = seed <= 150
                                  ? seeded_instance(seed + 20000, 60, 25, seed % 2 == 0, true)
                                  : clumped_instance(seed + 20000, true);
        try {
            PipelineResult res = run_metric_pipeline(inst, {}, MetricVariant::Uniform);
            ValidationReport v = verify_solution(inst, res.rounded, 6.47);
            if (!v.is_valid) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": " + v.violations.front().kind;
            }
            worst_beta = std::max(worst_beta, res.max_beta);
            record_replay(inst, res, 0.375);
        } catch (const std::exception& e) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": " + e.what();
        }
    }
    if (pass) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "200 equal-capacity instances, beta <= 6.47; worst %.3f",
                      worst_beta);
        detail = buf;
    }
    report(3, "uniform-capacity selection", pass, detail, seconds_since(t0));
}

void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    uint64_t seed_base = 40000;
    for (double eps : {1.0, 0.5, 0.25}) {
        for (int d = 1; d <= 3 && pass; ++d) {
            for (uint64_t s = 1; s <= 50 && pass; ++s) {
                seed_base += 17;
                MetricInstance inst = seeded_instance(seed_base + s, 60, 25, true, false, d);
                try {
                    EuclidParams params;
                    params.epsilon = eps;
                    PipelineResult res = run_euclid_pipeline(inst, params);
                    if (res.max_beta > 1.0 + eps + 1e-9) {
                        pass = false;
                        detail = "eps " + std::to_string(eps) + " d " + std::to_string(d) +
                                 ": beta above 1+eps";
                    }
                    ValidationReport v = verify_solution(inst, res.rounded, 1.0 + eps);
                    if (!v.is_valid) {
                        pass = false;
                        detail = "verify: " + v.violations.front().kind;
                    }
                    for (size_t c = 0; c < res.cluster_counts.size(); ++c)
                        if (res.cluster_counts[c] >
                            res.cluster_count_bounds[c] + res.fallback_count) {
                            pass = false;
                            detail = "cluster count above its grid bound";
                        }
                    record_replay(inst, res, params.alpha);
                } catch (const std::exception& e) {
                    pass = false;
                    detail = "eps " + std::to_string(eps) + " d " + std::to_string(d) +
                             " seed " + std::to_string(s) + ": " + e.what();
                }
            }
        }
    }
    if (pass) detail = "450 runs over eps in {1, 1/2, 1/4}, d in {1,2,3}; beta <= 1+eps";
    report(4, "euclidean expansion and grid bounds", pass, detail, seconds_since(t0));
}

void criterion_5() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    double worst_ratio = 0.0;
    for (uint64_t seed = 1; seed <= 200 && pass; ++seed) {
        MetricInstance inst = seeded_instance(seed + 60000, 60, 25, seed % 2 == 0, false);
        try {
            SoftResult res = solve_soft(inst);
            if (static_cast<double>(res.soft.total_copies) > 4.0 * res.lp_value + 1e-6) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": copies above 4*lp";
            }
            if (res.soft.max_beta > 3.0 + 1e-9) {
                pass = false;
                detail = "seed " + std::to_string(seed) + ": beta above 3";
            }
            worst_ratio = std::max(worst_ratio,
                                   static_cast<double>(res.soft.total_copies) / res.lp_value);
        } catch (const std::exception& e) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": " + e.what();
        }
    }
    if (pass) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "200 instances, copies <= 4*lp and beta <= 3; worst ratio %.3f",
                      worst_ratio);
        detail = buf;
    }
    report(5, "soft-capacity variant", pass, detail, seconds_since(t0));
}

void criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = g_replay_violations == 0 && g_replays > 0;
    std::string detail = "replayed " + std::to_string(g_replays) + " pipeline traces, " +
                         std::to_string(g_replay_violations) + " violations";
    if (!g_replay_detail.empty()) detail += " (" + g_replay_detail + ")";
    report(6, "trace invariants replay", pass, detail, seconds_since(t0));
}

void criterion_7() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
        GadgetSpec3DM spec;
        spec.N = 1;
        spec.c = 1.0;
        spec.triples = {{0, 0, 0}};
        if (spec.p() != 2 || spec.element_balls() != 27) {
            pass = false;
            detail = "constants off";
        }
        GadgetInstance g = gen_3dm_gadget(spec);
        for (const auto& b : g.inst.balls)
            if (b.capacity != 3 || b.radius != 1.0) {
                pass = false;
                detail = "ball shape off";
            }
        RoundedSolution canon = gadget_canonical_solution(g, {0});
        if (canon.cost != 28) {
            pass = false;
            detail = "canonical size " + std::to_string(canon.cost);
        }
        ValidationReport v = verify_solution(g.inst, canon, 1.0);
        if (!v.is_valid) {
            pass = false;
            detail = "canonical invalid: " + v.violations.front().kind;
        }
        FractionalSolution f = solve_relaxation(g.inst);
        if (f.lp_value > 28.0 + 1e-6) {
            pass = false;
            detail = "lp above the canonical cost";
        }
        if (pass)
            detail = "p=2, 27 element balls, canonical cost 28, lp " +
                     std::to_string(f.lp_value);
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(7, "hardness gadget fidelity", pass, detail, seconds_since(t0));
}

void criterion_8() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    std::mt19937_64 rng(555);
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };
    int compared = 0;
    for (int trial = 0; trial < 80 && pass; ++trial) {
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
        OracleResult oracle = vertex_enum_oracle(lp);
        LpSolution sol = simplex_solve(lp);
        if (oracle.feasible) {
            ++compared;
            if (sol.status != LpStatus::Optimal ||
                std::abs(sol.value - oracle.value) > 1e-6) {
                pass = false;
                detail = "trial " + std::to_string(trial) + " disagrees";
            }
        } else if (sol.status == LpStatus::Optimal) {
            pass = false;
            detail = "trial " + std::to_string(trial) + ": oracle says infeasible";
        }
    }
    if (compared < 20 && pass) {
        pass = false;
        detail = "only " + std::to_string(compared) + " optimal comparisons";
    }

    // The three hand relaxations must reach values 1, 2 and 1.
    auto check_value = [&](const MetricInstance& inst, double expect, const char* label) {
        MmccLp built = build_mmcc_lp(inst);
        LpSolution sol = simplex_solve(built.lp);
        OracleResult oracle = vertex_enum_oracle(built.lp);
        if (sol.status != LpStatus::Optimal || std::abs(sol.value - expect) > 1e-6 ||
            !oracle.feasible || std::abs(oracle.value - expect) > 1e-6) {
            pass = false;
            detail = std::string(label) + " value off";
        }
    };
    {
        MetricInstance one;
        EuclideanGeometry g;
        g.dim = 1;
        g.points = {{0.0}};
        g.centers = {{0.0}};
        one.geometry = g;
        one.balls = {{0, 1.0, 5}};
        check_value(one, 1.0, "single-ball");

        MetricInstance two;
        EuclideanGeometry g2;
        g2.dim = 2;
        g2.points = {{0.0, 0.1}, {0.0, -0.1}};
        g2.centers = {{0.0, 0.0}, {0.0, 0.0}};
        two.geometry = g2;
        two.balls = {{0, 1.0, 1}, {1, 1.0, 1}};
        check_value(two, 2.0, "two-ball");

        MetricInstance filled;
        EuclideanGeometry g3;
        g3.dim = 1;
        g3.points = {{-0.2}, {0.2}};
        g3.centers = {{0.0}};
        filled.geometry = g3;
        filled.balls = {{0, 1.0, 2}};
        check_value(filled, 1.0, "filled-ball");
    }
    if (pass)
        detail = std::to_string(compared) + " random LPs plus hand relaxations match the oracle";
    report(8, "simplex versus enumeration oracle", pass, detail, seconds_since(t0));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    fs::path dir = fs::temp_directory_path() / "capcover_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string bin = CAPCOVER_BIN;
    auto run = [&](const std::string& args, const fs::path& out) {
        std::string cmd = bin + " " + args + " > " + out.string() + " 2> /dev/null";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    fs::path inst = dir / "inst.json";
    if (run("gen random-euclid --seed 77 --n 20 --m 9 --cap-min 3 --cap-max 6 --ensure-feasible --output " + inst.string(),
            dir / "g1.txt") != 0)
        pass = false;
    if (run("gen random-euclid --seed 77 --n 20 --m 9 --cap-min 3 --cap-max 6 --ensure-feasible --output " + (dir / "inst2.json").string(),
            dir / "g2.txt") != 0)
        pass = false;
    if (slurp(inst) != slurp(dir / "inst2.json")) {
        pass = false;
        detail = "generator output differs between runs";
    }

    for (std::string mode : {"metric", "uniform", "euclid", "soft"}) {
        std::string inst_path = inst.string();
        if (mode == "uniform") {
            if (run("gen random-euclid --seed 78 --n 20 --m 9 --cap-mode uniform --capacity 4 --ensure-feasible "
                    "--output " + (dir / "uni.json").string(), dir / "gu.txt") != 0)
                pass = false;
            inst_path = (dir / "uni.json").string();
        }
        fs::path s1 = dir / (mode + "_1.json");
        fs::path s2 = dir / (mode + "_2.json");
        fs::path o1 = dir / (mode + "_1.txt");
        fs::path o2 = dir / (mode + "_2.txt");
        int c1 = run("solve --input " + inst_path + " --mode " + mode + " --output " + s1.string(), o1);
        int c2 = run("solve --input " + inst_path + " --mode " + mode + " --output " + s2.string(), o2);
        if (c1 != 0 || c2 != 0) {
            pass = false;
            detail = mode + " solve failed";
        }
        if (slurp(s1) != slurp(s2) || slurp(o1) != slurp(o2)) {
            pass = false;
            detail = mode + " output differs between runs";
        }
    }
    if (pass) detail = "gen and all four solve modes byte-identical across reruns";
    report(9, "command determinism", pass, detail, seconds_since(t0));
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("acceptance total: %.1fs, %d failure(s)\n", seconds_since(t0), g_failures);
    return g_failures == 0 ? 0 : 1;
}
