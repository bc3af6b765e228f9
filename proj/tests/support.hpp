#pragma once
// Small fixed instances and hand-rolled random generators shared by the tests.

#include "ldp/cut_factor.hpp"
#include "ldp/decomposition.hpp"
#include "ldp/instance.hpp"
#include "ldp/path_factor.hpp"
#include "ldp/solution.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace ldp::test {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * ((g_() >> 11) * 0x1.0p-53); }
    int integer(int lo, int hi) { return lo + static_cast<int>(g_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin(double p) { return uniform(0, 1) < p; }
    // costs on a coarse grid keep sums exact in double arithmetic
    double cost(double lo = -1, double hi = 1) { return std::round(uniform(lo, hi) * 16) / 16; }
    std::mt19937_64& engine() { return g_; }

private:
    std::mt19937_64 g_;
};

// a@1 -> b@2 with cost -1
inline Instance t1() { return parse_instance("nodes 2\nnode 0 1 0\nnode 1 2 0\nbase 0 1 -1\n"); }

// a@1 -> b@2 -> c@3, base -1 and +0.5, lifted a -> c -1
inline Instance t2()
{
    return parse_instance("nodes 3\nnode 0 1 0\nnode 1 2 0\nnode 2 3 0\n"
                          "base 0 1 -1\nbase 1 2 0.5\nlifted 0 2 -1\n");
}

inline Instance zero_instance()
{
    return parse_instance("nodes 3\nnode 0 1 0\nnode 1 2 0\nnode 2 3 0\n"
                          "base 0 1 0\nbase 1 2 0\nlifted 0 2 0\n");
}

struct RandomSpec {
    int nodes = 8;
    int frames = 4;
    double base_prob = 0.5;
    double lifted_prob = 0.5;
    int max_gap = 2;
    bool lifted = true;
    bool node_costs = true;
    bool terminal_costs = true;
};

// Random DAG over frames 1..frames, every frame non-empty when possible.
inline Instance random_instance(Rng& rng, const RandomSpec& spec)
{
    const int n = spec.nodes;
    std::vector<int> frames(n);
    for (int v = 0; v < n; ++v) frames[v] = v < spec.frames ? v + 1 : rng.integer(1, spec.frames);
    std::shuffle(frames.begin(), frames.end(), rng.engine());
    std::vector<double> node_costs(n, 0.0);
    if (spec.node_costs)
        for (auto& d : node_costs) d = rng.cost(-0.5, 0.5);
    std::vector<Edge> base;
    const NodeId s = n, t = n + 1;
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
            const int gap = frames[w] - frames[v];
            if (gap >= 1 && gap <= spec.max_gap && rng.coin(spec.base_prob))
                base.push_back({NodeId(v), NodeId(w), rng.cost()});
        }
    if (spec.terminal_costs)
        for (int v = 0; v < n; ++v) {
            if (rng.coin(0.5)) base.push_back({s, NodeId(v), rng.cost(0, 0.5)});
            if (rng.coin(0.5)) base.push_back({NodeId(v), t, rng.cost(0, 0.5)});
        }
    std::vector<Edge> lifted;
    if (spec.lifted) {
        const Instance skeleton = Instance::build(frames, node_costs, base, {});
        const Reachability reach = full_reachability(skeleton);
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w)
                if (v != w && frames[v] < frames[w] && reach(v, w) && rng.coin(spec.lifted_prob))
                    lifted.push_back({NodeId(v), NodeId(w), rng.cost()});
    }
    return Instance::build(std::move(frames), std::move(node_costs), std::move(base), std::move(lifted));
}

inline void randomize(FlowFactor& f, Rng& rng)
{
    for (std::size_t s = 0; s < f.num_slots(); ++s) f.set_theta(s, rng.cost());
}

// Random path factor over nodes 0..len with a closing edge 0 -> len.
inline PathFactor random_path_factor(Rng& rng, int len)
{
    std::vector<PathEdge> path;
    for (int k = 0; k < len; ++k) {
        const bool lifted = rng.coin(0.4);
        path.push_back({{lifted ? VarKind::lifted : VarKind::base, std::size_t(k)}, NodeId(k), NodeId(k + 1),
                        lifted || rng.coin(0.5)});
    }
    const bool base_closing = rng.coin(0.2);
    PathEdge closing{{base_closing ? VarKind::base : VarKind::lifted, 100}, 0, NodeId(len), !base_closing};
    PathFactor f(std::move(path), closing);
    for (std::size_t s = 0; s < f.size(); ++s) f.set_theta(s, rng.cost(-2, 2));
    return f;
}

// Random cut factor: tails from {u, 2, 3}, heads from {v, 5, 6}, u = 0, v = 1.
inline CutFactor random_cut_factor(Rng& rng, int edges)
{
    const NodeId tails[] = {0, 2, 3}, heads[] = {1, 5, 6};
    std::vector<CutEdge> cut;
    std::vector<std::pair<NodeId, NodeId>> used;
    while (static_cast<int>(cut.size()) < edges) {
        const NodeId a = tails[rng.integer(0, 2)], b = heads[rng.integer(0, 2)];
        if (std::find(used.begin(), used.end(), std::make_pair(a, b)) != used.end()) continue;
        used.push_back({a, b});
        cut.push_back({cut.size(), a, b});
    }
    CutFactor f(7, 0, 1, std::move(cut));
    for (std::size_t s = 0; s < f.num_slots(); ++s) f.set_theta(s, rng.cost(-2, 2));
    return f;
}

// Random node-disjoint paths along base edges.
inline std::vector<std::vector<NodeId>> random_paths(const Instance& inst, Rng& rng)
{
    std::vector<char> used(inst.num_nodes(), 0);
    std::vector<std::vector<NodeId>> paths;
    for (NodeId v : inst.order()) {
        if (used[v] || !rng.coin(0.6)) continue;
        std::vector<NodeId> p{v};
        used[v] = 1;
        for (;;) {
            std::vector<NodeId> next;
            for (EdgeId e : inst.out_base(p.back())) {
                const NodeId w = inst.base(e).head;
                if (inst.is_inner(w) && !used[w]) next.push_back(w);
            }
            if (next.empty() || !rng.coin(0.7)) break;
            const NodeId w = next[rng.integer(0, int(next.size()) - 1)];
            used[w] = 1;
            p.push_back(w);
        }
        paths.push_back(std::move(p));
    }
    return paths;
}

inline double min_value(const std::vector<double>& xs) { return *std::min_element(xs.begin(), xs.end()); }

} // namespace ldp::test
