// Serial reference vs OpenMP kernels on a generated instance.
// usage: ldp_bench [frames] [detections] [repeats]
#include "ldp/interval.hpp"
#include "ldp/message_passing.hpp"
#include "ldp/separation.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

template <class F>
double seconds(int repeats, F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

} // namespace

int main(int argc, char** argv)
{
    ldp::GeneratorConfig gen;
    gen.frames = argc > 1 ? std::atoi(argv[1]) : 40;
    gen.detections_per_frame = argc > 2 ? std::atoi(argv[2]) : 12;
    gen.trajectories = gen.detections_per_frame / 2;
    gen.max_frame_gap = 4;
    gen.seed = 3;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

    const ldp::Instance inst = ldp::generate_instance(gen).instance;
    ldp::Decomposition dec(inst);
    for (int i = 0; i < 3; ++i) ldp::message_passing_iteration(dec);
    std::printf("nodes=%zu base=%zu lifted=%zu threads=%d\n", inst.num_nodes(), inst.base_edges().size(),
                inst.lifted_edges().size(), omp_get_max_threads());
    std::printf("kernel,serial_s,parallel_s,speedup,equal\n");

    auto report = [](const char* name, double s, double p, bool equal) {
        std::printf("%s,%.6f,%.6f,%.2f,%s\n", name, s, p, s / p, equal ? "yes" : "no");
    };

    // lower bound: factor caches are dropped by copying the thetas into a fresh decomposition
    auto fresh = [&] {
        ldp::Decomposition d = dec;
        for (ldp::NodeId v = 0; v < d.num_nodes(); ++v) {
            d.add_theta({ldp::FactorKind::inflow, v, 0}, 0.0);
            d.add_theta({ldp::FactorKind::outflow, v, 0}, 0.0);
        }
        return d;
    };
    {
        double lb_s = 0, lb_p = 0;
        const double ts = seconds(repeats, [&] { lb_s = ldp::lower_bound_serial(fresh()).lower_bound; });
        const double tp = seconds(repeats, [&] { lb_p = ldp::lower_bound(fresh()).lower_bound; });
        report("lower_bound", ts, tp, lb_s == lb_p);
    }
    {
        ldp::McfNetwork a, b;
        const double ts = seconds(repeats, [&] { a = ldp::init_mcf(dec, ldp::Execution::serial); });
        const double tp = seconds(repeats, [&] { b = ldp::init_mcf(dec, ldp::Execution::parallel); });
        bool equal = a.source_cost == b.source_cost && a.sink_cost == b.sink_cost;
        for (std::size_t k = 0; equal && k < a.edges.size(); ++k) equal = a.edges[k].cost() == b.edges[k].cost();
        report("init_mcf", ts, tp, equal);
    }
    {
        ldp::SeparationCosts a, b;
        const double ts = seconds(repeats, [&] { a = ldp::extract_separation_costs(dec, ldp::Execution::serial); });
        const double tp = seconds(repeats, [&] { b = ldp::extract_separation_costs(dec, ldp::Execution::parallel); });
        report("separation_costs", ts, tp, a.base == b.base && a.lifted == b.lifted);
    }
    {
        ldp::SolverConfig cs, cp;
        cs.exec = ldp::Execution::serial;
        cs.max_iter = cp.max_iter = 20;
        const ldp::IntervalPlan plan{10, 2};
        ldp::Solution a, b;
        const double ts = seconds(1, [&] { a = ldp::solve_intervals(inst, plan, cs); });
        const double tp = seconds(1, [&] { b = ldp::solve_intervals(inst, plan, cp); });
        report("interval_windows", ts, tp, ldp::format_solution(a) == ldp::format_solution(b));
    }
    return 0;
}
