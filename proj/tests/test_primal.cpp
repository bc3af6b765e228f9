#include "ldp/oracle.hpp"
#include "ldp/primal.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace ldp;
using ldp::test::Rng;
using Paths = std::vector<std::vector<NodeId>>;

namespace {

const McfEdge& edge_of(const McfNetwork& net, const Instance& inst, NodeId a, NodeId b)
{
    const EdgeId e = *inst.find_base(a, b);
    for (const McfEdge& m : net.edges)
        if (m.id == e) return m;
    throw std::logic_error("no such edge");
}

// The MCF network as an instance without lifted edges, for the exhaustive oracle.
Instance as_instance(const Instance& inst, const McfNetwork& net)
{
    std::vector<int> frames(inst.num_nodes());
    for (NodeId v = 0; v < inst.num_nodes(); ++v) frames[v] = inst.frame(v);
    std::vector<Edge> base;
    const NodeId s = inst.source(), t = inst.sink();
    for (NodeId v = 0; v < inst.num_nodes(); ++v) {
        base.push_back({s, v, net.source_cost[v]});
        base.push_back({v, t, net.sink_cost[v]});
    }
    for (const McfEdge& m : net.edges) base.push_back({m.tail, m.head, m.cost()});
    return Instance::build(frames, std::vector<double>(inst.num_nodes(), 0.0), base, {});
}

double flow_cost(const McfNetwork& net, const Instance& inst, const Paths& paths)
{
    double sum = 0;
    for (const auto& p : paths) {
        sum += net.source_cost[p.front()] + net.sink_cost[p.back()];
        for (std::size_t i = 1; i < p.size(); ++i) sum += edge_of(net, inst, p[i - 1], p[i]).cost();
    }
    return sum;
}

} // namespace

TEST_CASE("init_mcf on T2 and on the zero instance")
{
    const Instance inst = test::t2();
    Decomposition dec(inst);
    const McfNetwork net = init_mcf(dec);
    const McfEdge& ab = edge_of(net, inst, 0, 1);
    CHECK(ab.alpha_out == -1.0);
    CHECK(ab.alpha_in == -0.5);
    CHECK(ab.cost() == -1.5);

    const Instance zero = test::zero_instance();
    Decomposition dz(zero);
    const McfNetwork nz = init_mcf(dz);
    for (const McfEdge& m : nz.edges) CHECK(m.cost() == 0.0);
    for (double c : nz.source_cost) CHECK(c == 0.0);
    for (double c : nz.sink_cost) CHECK(c == 0.0);
}

TEST_CASE("without lifted edges init_mcf reproduces additive costs")
{
    Rng rng(71);
    for (int k = 0; k < 20; ++k) {
        test::RandomSpec spec;
        spec.lifted = false;
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        const McfNetwork net = init_mcf(dec);
        for (const McfEdge& m : net.edges)
            CHECK(m.cost() == doctest::Approx(inst.base(m.id).cost + 0.5 * (inst.node_cost(m.tail) + inst.node_cost(m.head))));
        for (NodeId v = 0; v < inst.num_nodes(); ++v) {
            CHECK(net.source_cost[v] == doctest::Approx(inst.base(inst.source_edge(v)).cost + 0.5 * inst.node_cost(v)));
            CHECK(net.sink_cost[v] == doctest::Approx(inst.base(inst.sink_edge(v)).cost + 0.5 * inst.node_cost(v)));
        }
    }
}

TEST_CASE("solve_mcf examples")
{
    const Instance inst = test::t1();
    Decomposition dec(inst);
    const McfResult res = solve_mcf(init_mcf(dec));
    CHECK(res.paths == Paths{{0, 1}});
    CHECK(res.cost == -1.0);

    const Instance pos = parse_instance("nodes 2\nnode 0 1 0\nnode 1 2 0\nbase 0 1 1\n");
    Decomposition dp(pos);
    const McfResult rp = solve_mcf(init_mcf(dp));
    CHECK(rp.paths.empty());
    CHECK(rp.cost == 0.0);
}

TEST_CASE("solve_mcf is optimal over the synthesized costs")
{
    Rng rng(72);
    for (int k = 0; k < 40; ++k) {
        test::RandomSpec spec;
        spec.nodes = 8;
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        // perturb the factors so the network is not just the initial split
        for (NodeId v = 0; v < inst.num_nodes(); ++v) {
            for (std::size_t j = 0; j < dec.outflow(v).num_lifted(); ++j) {
                const Variable var = dec.outflow(v).variable(dec.outflow(v).lifted_slot(j));
                apply_message(dec, *dec.out_site(var), *dec.in_site(var), rng.cost());
            }
        }
        const McfNetwork net = init_mcf(dec);
        const McfResult res = solve_mcf(net);
        CHECK(res.cost == doctest::Approx(exact_ldp(as_instance(inst, net)).objective).epsilon(1e-12));
        CHECK(res.cost == doctest::Approx(flow_cost(net, inst, res.paths)).epsilon(1e-12));
        CHECK_FALSE(validate_solution(inst, adjust_lifted(inst, res.paths)).has_value());
    }
}

TEST_CASE("adjust_lifted")
{
    const Instance inst = test::t2();
    const Solution s = adjust_lifted(inst, {{0, 1, 2}});
    CHECK(s.lifted_active[0]);
    CHECK(s.objective == -1.5);
    CHECK(path_cost(inst, {0, 1, 2}) == -1.5);

    const Solution e = adjust_lifted(inst, {});
    CHECK(e.objective == 0.0);
    CHECK(std::none_of(e.base_active.begin(), e.base_active.end(), [](bool b) { return b; }));

    const Solution two = adjust_lifted(inst, {{0}, {2}});
    CHECK_FALSE(two.lifted_active[0]);
    CHECK(two.objective == 0.0);
    CHECK_FALSE(validate_solution(inst, two).has_value());
}

TEST_CASE("validate_solution catches broken solutions")
{
    const Instance inst = test::t2();
    Solution s = adjust_lifted(inst, {{0, 1, 2}});
    Solution wrong_obj = s;
    wrong_obj.objective = 0;
    CHECK(validate_solution(inst, wrong_obj).has_value());
    Solution wrong_lifted = s;
    wrong_lifted.lifted_active[0] = false;
    CHECK(validate_solution(inst, wrong_lifted).has_value());
    Solution twice = s;
    twice.paths.push_back({1});
    CHECK(validate_solution(inst, twice).has_value());
    Solution gap = adjust_lifted(inst, {{0}, {2}});
    gap.paths = {{0, 2}};
    CHECK(validate_solution(inst, gap).has_value());
}

TEST_CASE("split removes an expensive lifted edge")
{
    const Instance inst = parse_instance("nodes 3\nnode 0 1 0\nnode 1 2 0\nnode 2 3 0\n"
                                         "base 0 1 -1\nbase 1 2 -1\nlifted 0 2 5\n");
    CHECK(split_paths(inst, {{0, 1, 2}}) == Paths{{0}, {1, 2}});
    const Solution out = local_search(inst, adjust_lifted(inst, {{0, 1, 2}}));
    CHECK(out.paths == Paths{{0}, {1, 2}});
    CHECK(out.objective == -1.0);
}

TEST_CASE("local search fixpoint and merge")
{
    const Instance t2 = test::t2();
    const Solution opt = adjust_lifted(t2, {{0, 1, 2}});
    const Solution same = local_search(t2, opt);
    CHECK(same.paths == opt.paths);
    CHECK(same.objective == opt.objective);

    const Instance t1 = test::t1();
    CHECK(merge_paths(t1, {{0}, {1}}, 0.5) == Paths{{0, 1}});
    CHECK(local_search(t1, adjust_lifted(t1, {{0}, {1}})).paths == Paths{{0, 1}});

    // a positive lifted edge across the pair blocks the merge
    const Instance blocked = parse_instance("nodes 3\nnode 0 1 0\nnode 1 2 0\nnode 2 3 0\n"
                                            "base 0 1 -1\nbase 1 2 -1\nlifted 0 2 1\n");
    CHECK(merge_paths(blocked, {{0}, {1, 2}}, 0.5) == Paths{{0}, {1, 2}});
}

TEST_CASE("cut-ends joins paths through a shortened end")
{
    // paths 0-1 and 2-3; 0->3 via 1 is impossible, but dropping 1 gives the bridge 0->2
    const Instance inst = parse_instance("nodes 4\nnode 0 1 0\nnode 1 2 0\nnode 2 2 0\nnode 3 3 0\n"
                                         "base 0 1 -0.1\nbase 0 2 -0.1\nbase 2 3 -0.1\nbase 1 3 0.1\n"
                                         "lifted 0 3 -2\n");
    const Paths out = cut_ends(inst, {{0, 1}, {2, 3}}, 0.5, 5);
    const Solution before = adjust_lifted(inst, {{0, 1}, {2, 3}});
    const Solution after = adjust_lifted(inst, out);
    CHECK(after.objective < before.objective);
    CHECK_FALSE(validate_solution(inst, after).has_value());
}

TEST_CASE("local search never worsens random solutions")
{
    Rng rng(73);
    for (int k = 0; k < 100; ++k) {
        test::RandomSpec spec;
        spec.nodes = rng.integer(2, 12);
        spec.frames = rng.integer(2, 5);
        const Instance inst = test::random_instance(rng, spec);
        const Solution in = adjust_lifted(inst, test::random_paths(inst, rng));
        const Solution out = local_search(inst, in, {rng.uniform(0.1, 1.0), rng.integer(0, 5)});
        CHECK(out.objective <= in.objective + 1e-12);
        CHECK_FALSE(validate_solution(inst, out).has_value());
    }
}

TEST_CASE("trim keeps the cheapest prefix or suffix")
{
    // 0 -> 1 -> 2 where the prefix 0 -> 1 costs more than it brings
    const Instance inst = parse_instance("nodes 3\nnode 0 1 1\nnode 1 2 0\nnode 2 3 0\n"
                                         "base 0 1 -0.25\nbase 1 2 -1\n");
    CHECK(trim_paths(inst, {{0, 1, 2}}) == Paths{{1, 2}});
    CHECK(trim_paths(inst, {{1, 2}}) == Paths{{1, 2}});
    // a path with positive cost is dropped
    CHECK(trim_paths(inst, {{0}}).empty());
    CHECK(local_search(inst, adjust_lifted(inst, {{0, 1, 2}})).paths == Paths{{1, 2}});
}

TEST_CASE("uncovered nodes can join a path")
{
    // node 0 is not covered; attaching it to 1 -> 2 pays off through the lifted edge 0 -> 2
    const Instance inst = parse_instance("nodes 3\nnode 0 1 0.25\nnode 1 2 0\nnode 2 3 0\n"
                                         "base 0 1 0\nbase 1 2 -1\nlifted 0 2 -0.5\n");
    const Solution out = local_search(inst, adjust_lifted(inst, {{1, 2}}));
    CHECK(out.paths == Paths{{0, 1, 2}});
    CHECK(out.objective == -1.25);
}
