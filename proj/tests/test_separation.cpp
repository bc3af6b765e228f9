#include "ldp/message_passing.hpp"
#include "ldp/separation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <queue>

using namespace ldp;
using ldp::test::Rng;

namespace {

SeparationCosts zero_costs(const Instance& inst)
{
    SeparationCosts c;
    c.base.assign(inst.base_edges().size(), 0.0);
    c.base_out = c.base_in = c.base;
    c.lifted.assign(inst.lifted_edges().size(), 0.0);
    c.lifted_out = c.lifted_in = c.lifted;
    return c;
}

void set_base(SeparationCosts& c, const Instance& inst, NodeId a, NodeId b, double x)
{
    const EdgeId e = *inst.find_base(a, b);
    c.base[e] = x;
    c.base_out[e] = c.base_in[e] = x / 2;
}

void set_lifted(SeparationCosts& c, const Instance& inst, NodeId a, NodeId b, double x)
{
    const EdgeId e = *inst.find_lifted(a, b);
    c.lifted[e] = x;
    c.lifted_out[e] = c.lifted_in[e] = x / 2;
}

const Instance& chain()
{
    static const Instance inst = parse_instance("nodes 3\nnode 0 1 0\nnode 1 2 0\nnode 2 3 0\n"
                                                "base 0 1 -1\nbase 1 2 -1\nlifted 0 2 0.4\n");
    return inst;
}

bool base_reaches_without(const Instance& inst, NodeId u, NodeId v, const CutFactor& f)
{
    std::vector<char> cut(inst.base_edges().size(), 0), seen(inst.num_nodes() + 2, 0);
    for (const CutEdge& e : f.cut_edges()) cut[e.id] = 1;
    std::queue<NodeId> q;
    q.push(u);
    seen[u] = 1;
    while (!q.empty()) {
        const NodeId a = q.front();
        q.pop();
        if (a == v) return true;
        for (EdgeId e : inst.out_base(a)) {
            const NodeId b = inst.base(e).head;
            if (cut[e] || !inst.is_inner(b) || seen[b]) continue;
            seen[b] = 1;
            q.push(b);
        }
    }
    return false;
}

} // namespace

TEST_CASE("separation costs on the fixtures")
{
    Decomposition dz(test::zero_instance());
    const SeparationCosts z = extract_separation_costs(dz);
    for (double x : z.base) CHECK(x == 0.0);
    for (double x : z.lifted) CHECK(x == 0.0);

    const Instance inst = test::t2();
    Decomposition dec(inst);
    const double lb = lower_bound(dec).lower_bound;
    const SeparationCosts c = extract_separation_costs(dec);
    CHECK(c.lifted[0] < 0);
    CHECK(lower_bound(dec).lower_bound == lb);
    for (std::size_t e = 0; e < c.base.size(); ++e) CHECK(c.base[e] == c.base_out[e] + c.base_in[e]);
}

TEST_CASE("path separation on a chain")
{
    const Instance& inst = chain();
    SeparationCosts c = zero_costs(inst);
    set_base(c, inst, 0, 1, -1);
    set_base(c, inst, 1, 2, -1);
    set_lifted(c, inst, 0, 2, 0.4);
    const auto cands = separate_paths(c, inst, 1e-4, 10);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].priority == doctest::Approx(0.4));
    const auto& f = std::get<PathFactor>(cands[0].factor);
    CHECK(f.size() == 3);
    CHECK(f.from() == 0);
    CHECK(f.to() == 2);
    CHECK(f.edge(f.closing_slot()).var.kind == VarKind::lifted);

    set_lifted(c, inst, 0, 2, -1);
    CHECK(separate_paths(c, inst, 1e-4, 10).empty());
    CHECK(separate_paths(zero_costs(inst), inst, 1e-4, 10).empty());
}

TEST_CASE("cut separation on a chain")
{
    const Instance& inst = chain();
    SeparationCosts c = zero_costs(inst);
    set_base(c, inst, 0, 1, 0.7);
    set_base(c, inst, 1, 2, -0.5);
    set_lifted(c, inst, 0, 2, -2);
    auto cands = separate_cuts(c, inst, 1e-4, 10);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].priority == doctest::Approx(0.7));
    const auto& f = std::get<CutFactor>(cands[0].factor);
    CHECK(f.u() == 0);
    CHECK(f.v() == 2);
    CHECK(f.num_cut() == 1);
    CHECK(f.cut_edge(0).id == *inst.find_base(0, 1));

    set_base(c, inst, 0, 1, 3);
    cands = separate_cuts(c, inst, 1e-4, 10);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].priority == doctest::Approx(2));

    set_lifted(c, inst, 0, 2, 1);
    CHECK(separate_cuts(c, inst, 1e-4, 10).empty());
}

TEST_CASE("separated factors are well formed on random instances")
{
    Rng rng(81);
    for (int k = 0; k < 60; ++k) {
        test::RandomSpec spec;
        spec.nodes = rng.integer(3, 12);
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        const SeparationCosts c = extract_separation_costs(dec);
        for (const auto& cand : separate(c, inst, 1e-4, 50)) {
            CHECK(cand.priority > 0);
            if (cand.kind == CandidateKind::cut) {
                const auto& f = std::get<CutFactor>(cand.factor);
                CHECK(base_reaches_without(inst, f.u(), f.v(), CutFactor(f.lifted_edge(), f.u(), f.v(), {})));
                CHECK_FALSE(base_reaches_without(inst, f.u(), f.v(), f));
            } else {
                const auto& f = std::get<PathFactor>(cand.factor);
                for (std::size_t s = 1; s + 1 < f.size(); ++s) CHECK(f.edge(s - 1).head == f.edge(s).tail);
                CHECK(f.edge(0).tail == f.from());
                CHECK(f.edge(f.size() - 2).head == f.to());
            }
        }
    }
}

TEST_CASE("limit and priority order")
{
    Rng rng(82);
    for (int k = 0; k < 30; ++k) {
        test::RandomSpec spec;
        spec.nodes = 12;
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        const SeparationCosts c = extract_separation_costs(dec);
        const auto all = separate(c, inst, 1e-4, 1000);
        const auto few = separate(c, inst, 1e-4, 2);
        CHECK(few.size() == std::min<std::size_t>(2, all.size()));
        for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].priority >= all[i].priority);
    }
}

TEST_CASE("installing a candidate raises the bound by its priority")
{
    const Instance& inst = chain();
    Decomposition dec(inst);
    const double before = lower_bound(dec).lower_bound;
    const SeparationCosts c = extract_separation_costs(dec);
    const auto cands = separate(c, inst, 1e-4, 10);
    REQUIRE_FALSE(cands.empty());
    CHECK(install_candidates(dec, c, {cands.front()}) == 1);
    CHECK(lower_bound(dec).lower_bound >= before + cands.front().priority - 1e-9);
    CHECK(dec.conservation_residual() <= 1e-12);
    // a second install of the same factor is a no-op
    CHECK(install_candidates(dec, c, {cands.front()}) == 0);
}

TEST_CASE("installing candidates keeps costs and never lowers the bound")
{
    Rng rng(83);
    for (int k = 0; k < 60; ++k) {
        test::RandomSpec spec;
        spec.nodes = rng.integer(3, 12);
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        const double before = lower_bound(dec).lower_bound;
        const SeparationCosts c = extract_separation_costs(dec);
        const auto cands = separate(c, inst, 1e-4, 6);
        const std::size_t added = install_candidates(dec, c, cands);
        CHECK(added == cands.size());
        CHECK(dec.conservation_residual() <= 1e-9);
        CHECK(lower_bound(dec).lower_bound >= before - 1e-9);
    }
}

TEST_CASE("the top candidate raises the bound by its priority on random states")
{
    Rng rng(84);
    int tried = 0;
    for (int k = 0; k < 800; ++k) {
        test::RandomSpec spec;
        spec.nodes = rng.integer(3, 12);
        spec.frames = rng.integer(3, 5);
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        const int iterations = rng.integer(0, 6);
        for (int i = 0; i < iterations; ++i) message_passing_iteration(dec);
        const double before = lower_bound(dec).lower_bound;
        const SeparationCosts c = extract_separation_costs(dec);
        const auto top = separate(c, inst, 1e-4, 1);
        if (top.empty()) continue;
        ++tried;
        install_candidates(dec, c, top);
        CHECK(lower_bound(dec).lower_bound >= before + top.front().priority - 1e-9);
    }
    CHECK(tried > 100);
}
