#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capcover/core.hpp"
#include "capcover/euclid.hpp"
#include "capcover/exactsol.hpp"
#include "capcover/gen.hpp"
#include "capcover/instance.hpp"
#include "capcover/io.hpp"
#include "capcover/relax.hpp"
#include "capcover/report.hpp"
#include "capcover/rounding.hpp"
#include "capcover/svg.hpp"
#include "capcover/trace.hpp"

namespace {

using namespace capcover;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct SolveOpts {
    std::string input, output, trace_path;
    std::string mode = "metric";
    double alpha = 0.375;
    double epsilon = 0.5;
};

int cmd_solve(const SolveOpts& o) {
    MetricInstance inst = load_instance(o.input);
    ValidationReport val = validate_instance(inst);
    for (const auto& v : val.violations) {
        // Monotonicity is checked by the pipelines themselves; uncovered
        // points surface as a coverage error from the relaxation.
        if (v.kind == "monotonicity" || v.kind == "coverage") continue;
        throw input_error("invalid instance: " + v.kind + ": " + v.detail);
    }

    RunReport rep;
    rep.instance_label = std::filesystem::path(o.input).filename().string();
    rep.n = inst.num_points();
    rep.m = inst.num_balls();
    rep.geometry = geometry_label(inst);
    rep.mode = o.mode;

    double t0 = now_ms();
    SolutionFile sol_file;
    TraceLog* trace = nullptr;
    PipelineResult pipe;

    if (o.mode == "metric" || o.mode == "uniform" || o.mode == "euclid") {
        if (o.mode == "euclid") {
            EuclidParams ep;
            ep.epsilon = o.epsilon;
            ep.alpha = o.alpha;
            pipe = run_euclid_pipeline(inst, ep);
        } else {
            RoundingParams rp;
            rp.alpha = o.alpha;
            pipe = run_metric_pipeline(inst, rp,
                                       o.mode == "uniform" ? MetricVariant::Uniform
                                                           : MetricVariant::General);
        }
        rep.lp_value = pipe.lp_value;
        rep.cost = pipe.rounded.cost;
        rep.max_beta = pipe.max_beta;
        rep.beta_bound = pipe.beta_bound;
        rep.cost_bound = pipe.cost_bound;
        ValidationReport replay = replay_verify(inst, pipe.frac0, pipe.trace, o.alpha);
        rep.invariants_ok = replay.is_valid;
        sol_file.rounded = pipe.rounded;
        sol_file.lp_value = pipe.lp_value;
        trace = &pipe.trace;
    } else if (o.mode == "soft") {
        SoftResult soft = solve_soft(inst);
        rep.lp_value = soft.lp_value;
        rep.cost = soft.soft.total_copies;
        rep.max_beta = soft.soft.max_beta;
        rep.beta_bound = 3.0;
        rep.cost_bound = 4.0;
        sol_file.lp_value = soft.lp_value;
        sol_file.copies = soft.soft.copies;
        sol_file.rounded.assignment = soft.soft.assignment;
        sol_file.rounded.cost = soft.soft.total_copies;
        for (int i = 0; i < inst.num_balls(); ++i)
            if (soft.soft.copies[i] > 0) {
                sol_file.rounded.selected.push_back(i);
                double worst = 0.0;
                for (int j = 0; j < inst.num_points(); ++j)
                    if (soft.soft.assignment[j] == i)
                        worst = std::max(worst, inst.center_dist(i, j));
                double r = inst.balls[i].radius;
                sol_file.rounded.expansion.push_back(r > 0 ? std::max(1.0, worst / r) : 1.0);
            }
    } else {
        throw input_error("unknown mode " + o.mode);
    }
    double t1 = now_ms();

    if (!o.output.empty()) write_file(o.output, solution_to_json(sol_file).dump(1) + "\n");
    if (!o.trace_path.empty() && trace) write_file(o.trace_path, trace->dump());
    std::cout << rep.text();
    std::fprintf(stderr, "solve time: %.1f ms\n", t1 - t0);
    if (!rep.invariants_ok) throw assertion_error("trace replay found violations");
    return 0;
}

int cmd_exact(const std::string& input, int max_balls, const std::string& output) {
    MetricInstance inst = load_instance(input);
    BruteForceResult r = brute_force_opt(inst, max_balls);
    if (r.opt < 0) {
        std::cout << "opt: infeasible\n";
        return 2;
    }
    std::printf("opt: %lld\n", r.opt);
    std::string subset = "subset:";
    for (int i : r.subset) subset += " " + std::to_string(i);
    std::cout << subset << "\n";
    if (!output.empty()) {
        SolutionFile s;
        s.rounded.selected = r.subset;
        s.rounded.assignment = r.assignment;
        s.rounded.cost = r.opt;
        s.rounded.expansion.assign(r.subset.size(), 1.0);
        s.lp_value = 0.0;
        write_file(output, solution_to_json(s).dump(1) + "\n");
    }
    return 0;
}

int cmd_verify(const std::string& input, const std::string& solution, double beta) {
    MetricInstance inst = load_instance(input);
    SolutionFile s = load_solution(solution);
    if (s.copies) {
        // Soft solutions open multiple copies; scale capacities accordingly.
        for (int i = 0; i < inst.num_balls(); ++i)
            if ((*s.copies)[i] > 0) inst.balls[i].capacity *= (*s.copies)[i];
    }
    ValidationReport rep = verify_solution(inst, s.rounded, beta);
    if (rep.is_valid) {
        std::cout << "valid: cost " << s.rounded.cost << " within beta " << beta << "\n";
        return 0;
    }
    for (const auto& v : rep.violations)
        std::cout << "violation: " << v.kind << ": " << v.detail << "\n";
    return 2;
}

struct GenOpts {
    std::string kind;
    std::string output;
    std::string solution_output;
    uint64_t seed = 1;
    int n = 20, m = 8, d = 2;
    double rmin = 0.05, rmax = 0.3;
    std::string cap_mode = "monotone";
    long long capacity = 3, cap_min = 1, cap_max = 6;
    bool ensure_feasible = false;
    int gadget_n = 1;
    double gadget_c = 1.0;
    std::string triples;
    std::string cover;
};

std::vector<std::array<int, 3>> parse_triples(const std::string& s, int n) {
    std::vector<std::array<int, 3>> out;
    if (s.empty()) {
        for (int i = 0; i < n; ++i) out.push_back({i, i, i});
        return out;
    }
    std::array<int, 3> cur{};
    int field = 0;
    std::string tok;
    auto flush_tok = [&](bool end_triple) {
        if (tok.empty() || field > 2) throw input_error("bad --triples syntax");
        cur[field++] = std::stoi(tok);
        tok.clear();
        if (end_triple) {
            if (field != 3) throw input_error("triple needs three indices");
            out.push_back(cur);
            field = 0;
        }
    };
    for (char ch : s) {
        if (ch == ',')
            flush_tok(false);
        else if (ch == ';')
            flush_tok(true);
        else
            tok += ch;
    }
    flush_tok(true);
    return out;
}

int cmd_gen(const GenOpts& o) {
    MetricInstance inst;
    if (o.kind == "random-euclid" || o.kind == "random-metric") {
        RandomSpec spec;
        spec.seed = o.seed;
        spec.n = o.n;
        spec.m = o.m;
        spec.d = o.d;
        spec.rmin = o.rmin;
        spec.rmax = o.rmax;
        spec.mode = o.cap_mode == "uniform" ? CapacityMode::Uniform : CapacityMode::MonotoneRandom;
        spec.uniform_capacity = o.capacity;
        spec.cap_min = o.cap_min;
        spec.cap_max = o.cap_max;
        inst = o.kind == "random-euclid" ? gen_random_euclidean(spec) : gen_random_metric(spec);
        if (o.ensure_feasible) {
            std::vector<int> all(inst.num_balls());
            for (int i = 0; i < inst.num_balls(); ++i) all[i] = i;
            while (!feasible_assignment_exists(inst, all, 1.0))
                for (auto& b : inst.balls) b.capacity += 1;
        }
    } else if (o.kind == "gadget-3dm") {
        GadgetSpec3DM spec;
        spec.N = o.gadget_n;
        spec.c = o.gadget_c;
        spec.triples = parse_triples(o.triples, o.gadget_n);
        GadgetInstance gadget = gen_3dm_gadget(spec);
        inst = gadget.inst;
        if (!o.solution_output.empty()) {
            std::vector<int> cover;
            if (o.cover.empty()) {
                for (size_t t = 0; t < spec.triples.size(); ++t)
                    cover.push_back(static_cast<int>(t));
            } else {
                std::string tok;
                for (char ch : o.cover + ",") {
                    if (ch == ',') {
                        if (!tok.empty()) cover.push_back(std::stoi(tok));
                        tok.clear();
                    } else
                        tok += ch;
                }
            }
            RoundedSolution canon = gadget_canonical_solution(gadget, cover);
            SolutionFile s;
            s.rounded = canon;
            s.lp_value = 0.0;
            write_file(o.solution_output, solution_to_json(s).dump(1) + "\n");
        }
    } else {
        throw input_error("unknown generator " + o.kind);
    }
    std::string text = instance_to_json(inst).dump(1) + "\n";
    if (o.output.empty())
        std::cout << text;
    else
        write_file(o.output, text);
    return 0;
}

struct BenchOpts {
    std::string input_dir, output;
    std::string mode = "metric";
    double alpha = 0.375;
    double epsilon = 0.5;
    int max_balls = 10;
    bool with_times = false;
};

int cmd_bench(const BenchOpts& o) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(o.input_dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw input_error("no .json instances in " + o.input_dir);

    std::string csv = "name,n,m,lp_value,cost,opt,max_beta,cost_over_lp";
    if (o.with_times) csv += ",time_ms";
    csv += "\n";
    for (const auto& path : files) {
        MetricInstance inst = load_instance(path.string());
        double t0 = now_ms();
        PipelineResult pipe;
        if (o.mode == "euclid") {
            EuclidParams ep;
            ep.epsilon = o.epsilon;
            ep.alpha = o.alpha;
            pipe = run_euclid_pipeline(inst, ep);
        } else {
            RoundingParams rp;
            rp.alpha = o.alpha;
            pipe = run_metric_pipeline(inst, rp,
                                       o.mode == "uniform" ? MetricVariant::Uniform
                                                           : MetricVariant::General);
        }
        double t1 = now_ms();
        std::string opt_text;
        if (inst.num_balls() <= o.max_balls) {
            BruteForceResult r = brute_force_opt(inst, o.max_balls);
            if (r.opt >= 0) opt_text = std::to_string(r.opt);
        }
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.9f,%lld,%s,%.9f,%.9f",
                      path.filename().string().c_str(), inst.num_points(), inst.num_balls(),
                      pipe.lp_value, pipe.rounded.cost, opt_text.c_str(), pipe.max_beta,
                      static_cast<double>(pipe.rounded.cost) / pipe.lp_value);
        csv += buf;
        if (o.with_times) {
            std::snprintf(buf, sizeof buf, ",%.1f", t1 - t0);
            csv += buf;
        }
        csv += "\n";
    }
    if (o.output.empty())
        std::cout << csv;
    else
        write_file(o.output, csv);
    return 0;
}

int cmd_plot(const std::string& input, const std::string& solution, const std::string& output) {
    MetricInstance inst = load_instance(input);
    std::optional<SolutionFile> s;
    if (!solution.empty()) s = load_solution(solution);
    std::string svg = render_svg(inst, s ? &s->rounded : nullptr);
    if (output.empty())
        std::cout << svg;
    else
        write_file(output, svg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacitated ball covering: solve, verify, generate, benchmark"};
    app.require_subcommand(1);

    SolveOpts so;
    auto* solve = app.add_subcommand("solve", "round an instance to an integral covering");
    solve->add_option("--input", so.input)->required();
    solve->add_option("--output", so.output);
    solve->add_option("--mode", so.mode)->check(CLI::IsMember({"metric", "uniform", "euclid", "soft"}));
    solve->add_option("--alpha", so.alpha);
    solve->add_option("--epsilon", so.epsilon);
    solve->add_option("--trace", so.trace_path);

    std::string ex_input, ex_output;
    int ex_max_balls = 12;
    auto* exact = app.add_subcommand("exact", "brute-force optimum for tiny instances");
    exact->add_option("--input", ex_input)->required();
    exact->add_option("--max-balls", ex_max_balls);
    exact->add_option("--output", ex_output);

    std::string v_input, v_solution;
    double v_beta = 1.0;
    auto* verify = app.add_subcommand("verify", "check a solution file against an instance");
    verify->add_option("--input", v_input)->required();
    verify->add_option("--solution", v_solution)->required();
    verify->add_option("--beta", v_beta)->required();

    GenOpts go;
    auto* gen = app.add_subcommand("gen", "generate instances");
    gen->add_option("kind", go.kind)->required()
        ->check(CLI::IsMember({"random-euclid", "random-metric", "gadget-3dm"}));
    gen->add_option("--seed", go.seed);
    gen->add_option("--n", go.n);
    gen->add_option("--m", go.m);
    gen->add_option("--d", go.d);
    gen->add_option("--rmin", go.rmin);
    gen->add_option("--rmax", go.rmax);
    gen->add_option("--cap-mode", go.cap_mode)->check(CLI::IsMember({"uniform", "monotone"}));
    gen->add_option("--capacity", go.capacity);
    gen->add_option("--cap-min", go.cap_min);
    gen->add_option("--cap-max", go.cap_max);
    gen->add_flag("--ensure-feasible", go.ensure_feasible,
                  "bump capacities until a unit-expansion assignment exists");
    gen->add_option("--N", go.gadget_n);
    gen->add_option("--c", go.gadget_c);
    gen->add_option("--triples", go.triples);
    gen->add_option("--cover", go.cover);
    gen->add_option("--output", go.output);
    gen->add_option("--solution-output", go.solution_output);

    BenchOpts bo;
    auto* bench = app.add_subcommand("bench", "sweep a directory of instances");
    bench->add_option("--input-dir", bo.input_dir)->required();
    bench->add_option("--output", bo.output);
    bench->add_option("--mode", bo.mode)->check(CLI::IsMember({"metric", "uniform", "euclid"}));
    bench->add_option("--alpha", bo.alpha);
    bench->add_option("--epsilon", bo.epsilon);
    bench->add_option("--max-balls", bo.max_balls);
    bench->add_flag("--times", bo.with_times, "append wall-clock times to the table");

    std::string p_input, p_solution, p_output;
    auto* plot = app.add_subcommand("plot", "render a planar instance to SVG");
    plot->add_option("--input", p_input)->required();
    plot->add_option("--solution", p_solution);
    plot->add_option("--output", p_output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*solve) return cmd_solve(so);
        if (*exact) return cmd_exact(ex_input, ex_max_balls, ex_output);
        if (*verify) return cmd_verify(v_input, v_solution, v_beta);
        if (*gen) return cmd_gen(go);
        if (*bench) return cmd_bench(bo);
        if (*plot) return cmd_plot(p_input, p_solution, p_output);
    } catch (const capcover::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const capcover::coverage_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const capcover::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const capcover::assertion_error& e) {
        std::cerr << "internal invariant failure: " << e.what() << "\n";
        return 3;
    } catch (const capcover::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
