#include "ldp/interval.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ldp {

void validate_plan(const IntervalPlan& plan)
{
    if (plan.max_edge_length < 1) throw std::invalid_argument("max edge length must be at least 1");
    if (plan.interval_length < 3 * plan.max_edge_length)
        throw std::invalid_argument("interval length must be at least three times the max edge length");
}

Instance induced_instance(const Instance& inst, const std::vector<NodeId>& nodes)
{
    const std::size_t k = nodes.size();
    std::vector<std::size_t> local(inst.num_nodes(), k);
    for (std::size_t i = 0; i < k; ++i) local[nodes[i]] = i;
    std::vector<int> frames(k);
    std::vector<double> costs(k);
    for (std::size_t i = 0; i < k; ++i) {
        frames[i] = inst.frame(nodes[i]);
        costs[i] = inst.node_cost(nodes[i]);
    }
    auto map_end = [&](NodeId v) -> std::size_t {
        if (v == inst.source()) return k;
        if (v == inst.sink()) return k + 1;
        return local[v] == k ? k + 2 : local[v];
    };
    std::vector<Edge> base, lifted;
    for (const Edge& e : inst.base_edges()) {
        const std::size_t a = map_end(e.tail), b = map_end(e.head);
        if (a == k + 2 || b == k + 2) continue;
        base.push_back({a, b, e.cost});
    }
    const Instance skeleton = Instance::build(frames, costs, base, {});
    const Reachability reach = full_reachability(skeleton);
    // lifted edges whose connecting paths leave the node set are dropped
    for (const Edge& e : inst.lifted_edges()) {
        const std::size_t a = map_end(e.tail), b = map_end(e.head);
        if (a >= k || b >= k || !reach(a, b)) continue;
        lifted.push_back({a, b, e.cost});
    }
    return Instance::build(std::move(frames), std::move(costs), std::move(base), std::move(lifted));
}

namespace {

using Chain = std::vector<NodeId>;

// Joins left chains, free nodes and right chains of one stitch region.
void stitch(const Instance& inst, std::vector<Chain>& chains, const std::vector<std::size_t>& left,
            const std::vector<std::size_t>& right, const std::vector<NodeId>& free, const SolverConfig& cfg)
{
    // phase-2 nodes: left supers, free nodes, right supers
    const std::size_t nl = left.size(), nf = free.size(), nr = right.size();
    const std::size_t k = nl + nf + nr;
    if (k == 0) return;
    std::vector<int> frames(k);
    std::vector<double> costs(k, 0.0);
    for (std::size_t a = 0; a < nl; ++a) frames[a] = inst.frame(chains[left[a]].back());
    for (std::size_t a = 0; a < nf; ++a) {
        frames[nl + a] = inst.frame(free[a]);
        costs[nl + a] = inst.node_cost(free[a]);
    }
    for (std::size_t a = 0; a < nr; ++a) frames[nl + nf + a] = inst.frame(chains[right[a]].front());

    const NodeId s = k, t = k + 1;
    std::vector<Edge> base;
    for (std::size_t a = 0; a < nf; ++a) {
        const NodeId w = free[a];
        base.push_back({s, nl + a, inst.base(inst.source_edge(w)).cost});
        base.push_back({nl + a, t, inst.base(inst.sink_edge(w)).cost});
    }
    for (std::size_t a = 0; a < nl; ++a) {
        const NodeId last = chains[left[a]].back();
        const double drop = inst.base(inst.sink_edge(last)).cost;
        for (std::size_t b = 0; b < nf; ++b)
            if (auto e = inst.find_base(last, free[b])) base.push_back({a, nl + b, inst.base(*e).cost - drop});
        for (std::size_t b = 0; b < nr; ++b) {
            const NodeId first = chains[right[b]].front();
            if (auto e = inst.find_base(last, first))
                base.push_back({a, nl + nf + b, inst.base(*e).cost - drop - inst.base(inst.source_edge(first)).cost});
        }
    }
    for (std::size_t a = 0; a < nf; ++a) {
        for (std::size_t b = 0; b < nf; ++b)
            if (auto e = inst.find_base(free[a], free[b])) base.push_back({nl + a, nl + b, inst.base(*e).cost});
        for (std::size_t b = 0; b < nr; ++b) {
            const NodeId first = chains[right[b]].front();
            if (auto e = inst.find_base(free[a], first))
                base.push_back({nl + a, nl + nf + b, inst.base(*e).cost - inst.base(inst.source_edge(first)).cost});
        }
    }

    // lifted costs of a phase-2 node pair: sums over the members
    auto members = [&](std::size_t a) -> std::vector<NodeId> {
        if (a < nl) return chains[left[a]];
        if (a < nl + nf) return {free[a - nl]};
        return chains[right[a - nl - nf]];
    };
    const Instance skeleton = Instance::build(frames, costs, base, {});
    const Reachability reach = full_reachability(skeleton);
    std::vector<Edge> lifted;
    for (std::size_t a = 0; a < k; ++a) {
        const auto ma = members(a);
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b || frames[a] >= frames[b] || !reach(a, b)) continue;
            const auto mb = members(b);
            double sum = 0;
            bool any = false;
            for (NodeId x : ma)
                for (NodeId y : mb)
                    if (auto l = inst.find_lifted(x, y)) { sum += inst.lifted(*l).cost; any = true; }
            if (any) lifted.push_back({a, b, sum});
        }
    }
    const Instance sub = Instance::build(std::move(frames), std::move(costs), std::move(base), std::move(lifted));
    const Solution sol = run(sub, cfg).solution;

    std::vector<char> used(chains.size(), 0);
    std::vector<Chain> joined_chains;
    for (const auto& p : sol.paths) {
        Chain joined;
        for (NodeId a : p) {
            const Chain* part = nullptr;
            if (a < nl) part = &chains[left[a]], used[left[a]] = 1;
            else if (a >= nl + nf) part = &chains[right[a - nl - nf]], used[right[a - nl - nf]] = 1;
            if (part) joined.insert(joined.end(), part->begin(), part->end());
            else joined.push_back(free[a - nl]);
        }
        joined_chains.push_back(std::move(joined));
    }
    std::vector<Chain> kept;
    for (std::size_t c = 0; c < chains.size(); ++c)
        if (!used[c]) kept.push_back(std::move(chains[c]));
    for (auto& c : joined_chains) kept.push_back(std::move(c));
    chains = std::move(kept);
}

} // namespace

Solution solve_intervals(const Instance& inst, const IntervalPlan& plan, const SolverConfig& cfg)
{
    validate_plan(plan);
    const int l = plan.interval_length, tm = plan.max_edge_length;
    const int f0 = inst.min_frame();
    const int windows = inst.num_nodes() == 0 ? 1 : (inst.max_frame() - f0) / l + 1;
    if (windows == 1) return run(inst, cfg).solution;

    auto window_of = [&](NodeId v) { return (inst.frame(v) - f0) / l; };
    // freeze zone of window i in offsets from f0
    auto zone_lo = [&](int i) { return i == 0 ? 0 : i * l + tm; };
    auto zone_hi = [&](int i) { return i == windows - 1 ? l * windows : (i + 1) * l - tm - 1; };

    std::vector<std::vector<NodeId>> members(windows);
    for (NodeId v : inst.order()) members[window_of(v)].push_back(v);

    // phase 1: independent windows
    std::vector<std::vector<Chain>> fragments(windows);
    const long count = windows;
    // window solves run serially inside; only the windows themselves are spread over threads
    SolverConfig inner = cfg;
    inner.exec = Execution::serial;
#pragma omp parallel for schedule(dynamic, 1) if (cfg.exec == Execution::parallel)
    for (long i = 0; i < count; ++i) {
        const auto& nodes = members[i];
        if (nodes.empty()) continue;
        const Solution sol = run(induced_instance(inst, nodes), inner).solution;
        const int lo = zone_lo(static_cast<int>(i)), hi = zone_hi(static_cast<int>(i));
        for (const auto& p : sol.paths) {
            Chain frag;
            for (NodeId a : p) {
                const int off = inst.frame(nodes[a]) - f0;
                if (off >= lo && off <= hi) frag.push_back(nodes[a]);
            }
            if (!frag.empty()) fragments[i].push_back(std::move(frag));
        }
    }

    std::vector<char> frozen(inst.num_nodes(), 0);
    std::vector<Chain> chains;
    for (auto& fs : fragments)
        for (auto& f : fs) {
            for (NodeId v : f) frozen[v] = 1;
            chains.push_back(std::move(f));
        }

    // phase 2: stitch regions left to right
    auto zone_index = [&](NodeId v) {
        const int off = inst.frame(v) - f0;
        for (int i = 0; i < windows; ++i)
            if (off >= zone_lo(i) && off <= zone_hi(i)) return i;
        return -1;
    };
    for (int i = 0; i + 1 < windows; ++i) {
        const int lo = (i + 1) * l - tm, hi = (i + 1) * l + tm - 1;
        std::vector<NodeId> free;
        for (NodeId v : inst.order()) {
            const int off = inst.frame(v) - f0;
            if (off >= lo && off <= hi && !frozen[v]) free.push_back(v);
        }
        std::vector<std::size_t> left, right;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            if (zone_index(chains[c].back()) == i) left.push_back(c);
            if (zone_index(chains[c].front()) == i + 1) right.push_back(c);
        }
        // a chain cannot be joined to itself
        std::vector<std::size_t> r2;
        for (std::size_t c : right)
            if (std::find(left.begin(), left.end(), c) == left.end()) r2.push_back(c);
        stitch(inst, chains, left, r2, free, cfg);
        for (const auto& c : chains)
            for (NodeId v : c) frozen[v] = 1;
    }
    std::sort(chains.begin(), chains.end(), [&](const Chain& a, const Chain& b) {
        return std::make_pair(inst.frame(a.front()), a.front()) < std::make_pair(inst.frame(b.front()), b.front());
    });
    return adjust_lifted(inst, chains);
}

} // namespace ldp
