#include "ldp/decomposition.hpp"
#include "ldp/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace ldp;
using ldp::test::Rng;

namespace {

double theta_of(const Decomposition& dec, const FlowFactor& f, FactorKind kind, Variable var)
{
    return dec.theta({kind, f.center(), *f.slot_of(var)});
}

} // namespace

TEST_CASE("T2 initialization splits costs in half")
{
    const Instance inst = test::t2();
    Decomposition dec(inst);
    const Variable ab{VarKind::base, *inst.find_base(0, 1)};
    const Variable ac{VarKind::lifted, 0};
    const Variable at{VarKind::base, inst.sink_edge(0)};
    const Variable sb{VarKind::base, inst.source_edge(1)};
    CHECK(dec.outflow(0).node_theta() == 0.0);
    CHECK(theta_of(dec, dec.outflow(0), FactorKind::outflow, ab) == -0.5);
    CHECK(theta_of(dec, dec.outflow(0), FactorKind::outflow, at) == 0.0);
    CHECK(theta_of(dec, dec.outflow(0), FactorKind::outflow, ac) == -0.5);
    CHECK(theta_of(dec, dec.inflow(1), FactorKind::inflow, ab) == -0.5);
    CHECK(theta_of(dec, dec.inflow(1), FactorKind::inflow, sb) == 0.0);
    CHECK(dec.conservation_residual() == 0.0);
    CHECK(dec.num_factors() == 6);
}

TEST_CASE("terminal edges are carried by one flow factor")
{
    const Instance inst = parse_instance("nodes 2\nnode 0 1 0.5\nnode 1 2 0\nbase S 0 2\nbase 0 T 3\nbase 0 1 1\n");
    Decomposition dec(inst);
    const Variable s0{VarKind::base, inst.source_edge(0)};
    const Variable t0{VarKind::base, inst.sink_edge(0)};
    CHECK(dec.theta(*dec.in_site(s0)) == 2.0);
    CHECK_FALSE(dec.out_site(s0).has_value());
    CHECK(dec.theta(*dec.out_site(t0)) == 3.0);
    CHECK_FALSE(dec.in_site(t0).has_value());
    CHECK(dec.inflow(0).node_theta() == 0.25);
    CHECK(dec.outflow(0).node_theta() == 0.25);
}

TEST_CASE("T2 lower bound")
{
    const Instance inst = test::t2();
    Decomposition dec(inst);
    const DualReport rep = lower_bound(dec);
    // outflow(a) -1, inflow(b) -0.5, inflow(c): b->c at 0.25 plus lifted -0.5
    CHECK(rep.lower_bound == -1.75);
    CHECK(rep.per_factor[0] == 0.0);
    CHECK(rep.per_factor[1] == -0.5);
    CHECK(rep.per_factor[2] == -0.25);
    CHECK(rep.per_factor[3] == -1.0);
    CHECK(rep.lower_bound <= exact_ldp(inst).objective);
}

TEST_CASE("zero instance has a zero bound")
{
    Decomposition dec(test::zero_instance());
    CHECK(lower_bound(dec).lower_bound == 0.0);
}

TEST_CASE("apply_message conserves costs")
{
    const Instance inst = test::t2();
    Decomposition dec(inst);
    const Variable ab{VarKind::base, *inst.find_base(0, 1)};
    const double before = lower_bound(dec).lower_bound;
    apply_message(dec, *dec.out_site(ab), *dec.in_site(ab), 0.0);
    CHECK(lower_bound(dec).lower_bound == before);
    apply_message(dec, *dec.out_site(ab), *dec.in_site(ab), -0.5);
    CHECK(dec.theta(*dec.out_site(ab)) == 0.0);
    CHECK(dec.theta(*dec.in_site(ab)) == -1.0);
    CHECK(dec.conservation_residual() == 0.0);
}

TEST_CASE("min-marginal messages never lower the bound")
{
    Rng rng(51);
    for (int k = 0; k < 60; ++k) {
        test::RandomSpec spec;
        spec.nodes = rng.integer(2, 8);
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        for (int step = 0; step < 20; ++step) {
            const NodeId v = static_cast<NodeId>(rng.integer(0, int(inst.num_nodes()) - 1));
            const bool out = rng.coin(0.5);
            const FlowFactor& f = out ? dec.outflow(v) : dec.inflow(v);
            const std::size_t slot = static_cast<std::size_t>(rng.integer(0, int(f.num_slots()) - 1));
            const Variable var = f.variable(slot);
            const auto to = out ? dec.in_site(var) : dec.out_site(var);
            if (!to) continue;
            const double before = lower_bound(dec).lower_bound;
            const double w = rng.uniform(0, 1);
            const double m = min_marginal_naive(f, slot);
            apply_message(dec, {out ? FactorKind::outflow : FactorKind::inflow, v, slot}, *to, w * m);
            CHECK(lower_bound(dec).lower_bound >= before - 1e-9);
        }
        CHECK(dec.conservation_residual() <= 1e-9);
    }
}

TEST_CASE("weak duality at initialization")
{
    Rng rng(52);
    for (int k = 0; k < 40; ++k) {
        test::RandomSpec spec;
        spec.nodes = rng.integer(1, 10);
        const Instance inst = test::random_instance(rng, spec);
        Decomposition dec(inst);
        CHECK(lower_bound(dec).lower_bound <= exact_ldp(inst).objective + 1e-9);
    }
}

TEST_CASE("duplicate separated factors are rejected")
{
    const Instance inst = test::t2();
    Decomposition dec(inst);
    const PathEdge ab{{VarKind::base, *inst.find_base(0, 1)}, 0, 1, true};
    const PathEdge bc{{VarKind::base, *inst.find_base(1, 2)}, 1, 2, true};
    const PathEdge ac{{VarKind::lifted, 0}, 0, 2, true};
    CHECK(dec.add_path(PathFactor({ab, bc}, ac)));
    CHECK_FALSE(dec.add_path(PathFactor({ab, bc}, ac)));
    CHECK(dec.extra_sites(ab.var).size() == 1);
    CHECK(dec.sites(ac.var).size() == 3);
    CHECK(dec.conservation_residual() == 0.0);
    CHECK(lower_bound(dec).lower_bound == -1.75);
}
