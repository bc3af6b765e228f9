#include "ldp/interval.hpp"
#include "ldp/message_passing.hpp"
#include "ldp/oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

namespace {

constexpr int exit_input = 2;
constexpr int exit_config = 3;

void add_solver_flags(CLI::App& cmd, ldp::SolverConfig& cfg)
{
    cmd.add_option("--max-iter", cfg.max_iter, "iterations");
    cmd.add_option("--sep-interval", cfg.sep_interval, "separation every k iterations");
    cmd.add_option("--primal-interval", cfg.primal_interval, "primal rounding every l iterations");
    cmd.add_option("--sep-epsilon", cfg.sep_epsilon, "separation threshold");
    cmd.add_option("--max-new-factor-ratio", cfg.max_new_factor_ratio, "new factors per round, relative to flow factors");
    cmd.add_option("--tau", cfg.tau, "merge threshold of local search");
    cmd.add_option("--cut-ends-budget", cfg.cut_ends_budget, "nodes removable by cut-ends");
    cmd.add_flag("--verbose", cfg.verbose, "progress on stderr");
}

struct InputFailure {
    std::string what;
};

ldp::Instance read_instance(const std::string& path)
{
    try {
        return ldp::load_instance_file(path);
    } catch (const ldp::InstanceError& e) {
        throw InputFailure{e.what()};
    }
}

int solve_command(const std::string& file, ldp::SolverConfig cfg, int interval_length, int max_edge_frames,
                  bool oracle)
{
    const ldp::Instance inst = read_instance(file);
    ldp::validate_config(cfg);
    std::cout.precision(17);
    ldp::Solution sol;
    double lb = -INFINITY;
    if (interval_length > 0) {
        ldp::IntervalPlan plan{interval_length, max_edge_frames > 0 ? max_edge_frames : inst.max_edge_gap()};
        ldp::validate_plan(plan);
        sol = ldp::solve_intervals(inst, plan, cfg);
    } else {
        const ldp::SolverReport rep = ldp::run(inst, cfg);
        sol = rep.solution;
        lb = rep.lower_bound;
    }
    std::cout << ldp::format_solution(sol);
    std::cout << "lb " << lb << "\nub " << sol.objective << "\ngap " << sol.objective - lb << '\n';
    if (oracle) {
        try {
            const ldp::Solution best = ldp::exact_ldp(inst);
            std::cout << "oracle " << best.objective << "\noracle_diff " << sol.objective - best.objective << '\n';
        } catch (const std::length_error& e) {
            std::cerr << e.what() << '\n';
            return exit_config;
        }
    }
    return 0;
}

int bench_command(const std::string& file, ldp::GeneratorConfig gen, ldp::SolverConfig cfg)
{
    const ldp::Instance inst = file.empty() ? ldp::generate_instance(gen).instance : read_instance(file);
    cfg.gap_tolerance = -1;   // run all iterations
    const ldp::SolverReport rep = ldp::run(inst, cfg);
    std::cout.precision(17);
    std::cout << "iter,lb,ub,gap,factors,seconds\n";
    for (const auto& it : rep.iterations)
        std::cout << it.iter << ',' << it.lower_bound << ',' << it.best_primal << ','
                  << it.best_primal - it.lower_bound << ',' << it.factors << ',' << it.elapsed << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Approximate lifted disjoint paths solver"};
    app.require_subcommand(1);

    ldp::SolverConfig cfg;
    std::string file, out_file;
    int interval_length = 0, max_edge_frames = 0;
    bool oracle = false;
    auto* solve = app.add_subcommand("solve", "solve an instance file");
    solve->add_option("instance", file, "instance file")->required();
    add_solver_flags(*solve, cfg);
    solve->add_option("--interval-length", interval_length, "frames per window; enables interval mode");
    solve->add_option("--max-edge-frames", max_edge_frames, "longest edge in frames for interval mode");
    solve->add_flag("--oracle", oracle, "compare with the exact optimum (tiny instances)");

    ldp::GeneratorConfig gen;
    auto* generate = app.add_subcommand("generate", "write a synthetic instance");
    auto add_gen_flags = [&](CLI::App* cmd) {
        cmd->add_option("--frames", gen.frames);
        cmd->add_option("--detections", gen.detections_per_frame);
        cmd->add_option("--trajectories", gen.trajectories);
        cmd->add_option("--noise", gen.noise);
        cmd->add_option("--seed", gen.seed);
        cmd->add_option("--max-frame-gap", gen.max_frame_gap);
    };
    add_gen_flags(generate);
    generate->add_option("-o,--output", out_file, "output file, stdout if omitted");

    auto* bench = app.add_subcommand("bench", "per-iteration bound CSV");
    bench->add_option("instance", file, "instance file; a generated instance if omitted");
    add_solver_flags(*bench, cfg);
    add_gen_flags(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*solve) return solve_command(file, cfg, interval_length, max_edge_frames, oracle);
        if (*generate) {
            if (gen.trajectories > gen.detections_per_frame || gen.frames < 1 || gen.detections_per_frame < 1 ||
                gen.max_frame_gap < 1 || gen.trajectories < 0)
                throw std::invalid_argument("invalid generator settings");
            const std::string text = ldp::format_instance(ldp::generate_instance(gen).instance);
            if (out_file.empty()) { std::cout << text; return 0; }
            std::ofstream out(out_file);
            if (!out) throw InputFailure{"cannot write " + out_file};
            out << text;
            return 0;
        }
        if (*bench) {
            ldp::validate_config(cfg);
            return bench_command(file, gen, cfg);
        }
    } catch (const InputFailure& e) {
        std::cerr << "error: " << e.what << '\n';
        return exit_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
