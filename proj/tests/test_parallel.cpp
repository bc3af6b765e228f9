#include "ldp/interval.hpp"
#include "ldp/primal.hpp"
#include "ldp/separation.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace ldp;

namespace {

// A decomposition away from the initial split, with some separated factors.
Decomposition worked(const Instance& inst)
{
    Decomposition dec(inst);
    for (int i = 0; i < 3; ++i) message_passing_iteration(dec);
    const SeparationCosts c = extract_separation_costs(dec, Execution::serial);
    install_candidates(dec, c, separate(c, inst, 1e-4, 20));
    message_passing_iteration(dec);
    return dec;
}

} // namespace

TEST_CASE("parallel kernels equal the serial ones")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Instance inst = generate_instance(8, 6, 4, 0.3, seed).instance;
        const Decomposition dec = worked(inst);

        const DualReport a = lower_bound(dec, Execution::parallel), b = lower_bound_serial(dec);
        CHECK(a.per_factor == b.per_factor);
        CHECK(a.lower_bound == b.lower_bound);

        const McfNetwork p = init_mcf(dec, Execution::parallel), s = init_mcf(dec, Execution::serial);
        CHECK(p.source_cost == s.source_cost);
        CHECK(p.sink_cost == s.sink_cost);
        REQUIRE(p.edges.size() == s.edges.size());
        for (std::size_t i = 0; i < p.edges.size(); ++i) {
            CHECK(p.edges[i].id == s.edges[i].id);
            CHECK(p.edges[i].alpha_out == s.edges[i].alpha_out);
            CHECK(p.edges[i].alpha_in == s.edges[i].alpha_in);
        }

        const SeparationCosts x = extract_separation_costs(dec, Execution::parallel);
        const SeparationCosts y = extract_separation_costs(dec, Execution::serial);
        CHECK(x.base_out == y.base_out);
        CHECK(x.base_in == y.base_in);
        CHECK(x.lifted_out == y.lifted_out);
        CHECK(x.lifted_in == y.lifted_in);
    }
}

TEST_CASE("parallel runs are reproducible")
{
    const Instance inst = generate_instance(12, 4, 3, 0.3, 9).instance;
    SolverConfig cfg;
    cfg.sep_interval = 5;
    const std::string a = format_report(run(inst, cfg));
    for (int r = 0; r < 3; ++r) CHECK(format_report(run(inst, cfg)) == a);

    const std::string w = format_solution(solve_intervals(inst, {6, 2}, cfg));
    cfg.exec = Execution::serial;
    CHECK(format_solution(solve_intervals(inst, {6, 2}, cfg)) == w);
}
