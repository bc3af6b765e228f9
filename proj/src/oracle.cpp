#include "ldp/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace ldp {

namespace {

struct Enumerator {
    const Instance& inst;
    std::vector<NodeId> order;
    std::vector<std::vector<NodeId>> paths;
    std::vector<int> path_of;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<NodeId>> best_paths;

    void run(std::size_t i, double cost)
    {
        if (i == order.size()) {
            double total = cost;
            for (const auto& p : paths) total += inst.base(inst.sink_edge(p.back())).cost;
            if (total < best) { best = total; best_paths = paths; }
            return;
        }
        const NodeId v = order[i];
        // v unused
        run(i + 1, cost);
        // v starts a path
        paths.push_back({v});
        path_of[v] = static_cast<int>(paths.size() - 1);
        run(i + 1, cost + inst.node_cost(v) + inst.base(inst.source_edge(v)).cost + lifted_into(v));
        paths.pop_back();
        // v continues a path
        for (std::size_t p = 0; p < paths.size(); ++p) {
            auto e = inst.find_base(paths[p].back(), v);
            if (!e) continue;
            path_of[v] = static_cast<int>(p);
            paths[p].push_back(v);
            run(i + 1, cost + inst.node_cost(v) + inst.base(*e).cost + lifted_into(v));
            paths[p].pop_back();
        }
        path_of[v] = -1;
    }

    // lifted costs from earlier members of v's path
    double lifted_into(NodeId v) const
    {
        double sum = 0;
        for (EdgeId e : inst.in_lifted(v)) {
            const NodeId x = inst.lifted(e).tail;
            if (path_of[x] >= 0 && path_of[x] == path_of[v]) sum += inst.lifted(e).cost;
        }
        return sum;
    }
};

} // namespace

Solution exact_ldp(const Instance& inst)
{
    if (inst.num_nodes() > 14) throw std::length_error("exact_ldp: more than 14 inner nodes");
    Enumerator en{inst, inst.order(), {}, std::vector<int>(inst.num_nodes(), -1), std::numeric_limits<double>::infinity(), {}};
    en.run(0, 0.0);
    return adjust_lifted(inst, en.best_paths);
}

std::vector<Labeling> enumerate_flow_factor(const Instance& inst, const FlowFactor& f)
{
    const bool out = f.direction() == Direction::out;
    auto next_edges = [&](NodeId v) { return out ? inst.out_base(v) : inst.in_base(v); };
    auto far_end = [&](EdgeId e) { return out ? inst.base(e).head : inst.base(e).tail; };

    // reachable set size check
    std::vector<char> seen(inst.num_nodes(), 0);
    std::vector<NodeId> stack{f.center()};
    std::size_t reachable = 0;
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (EdgeId e : next_edges(x)) {
            NodeId y = far_end(e);
            if (inst.is_inner(y) && !seen[y]) { seen[y] = 1; ++reachable; stack.push_back(y); }
        }
    }
    if (reachable > 10) throw std::length_error("enumerate_flow_factor: more than 10 reachable nodes");

    std::vector<Labeling> out_list;
    out_list.push_back({std::vector<bool>(f.num_slots(), false), 0.0});
    std::vector<NodeId> path;
    // depth first over all center-to-terminal paths
    auto emit = [&](EdgeId first) {
        Labeling l{std::vector<bool>(f.num_slots(), false), 0.0};
        l.y[0] = true;
        const std::size_t bs = *f.slot_of({VarKind::base, first});
        l.y[bs] = true;
        for (NodeId u : path) {
            auto le = out ? inst.find_lifted(f.center(), u) : inst.find_lifted(u, f.center());
            if (le) l.y[*f.slot_of({VarKind::lifted, *le})] = true;
        }
        for (std::size_t s = 0; s < f.num_slots(); ++s)
            if (l.y[s]) l.value += f.theta(s);
        out_list.push_back(std::move(l));
    };
    EdgeId first = 0;
    auto dfs = [&](auto&& self, NodeId x) -> void {
        for (EdgeId e : next_edges(x)) {
            if (x == f.center()) first = e;
            NodeId y = far_end(e);
            if (y == f.terminal()) { emit(first); continue; }
            path.push_back(y);
            self(self, y);
            path.pop_back();
        }
    };
    dfs(dfs, f.center());
    return out_list;
}

bool path_labeling_feasible(const PathFactor& f, const std::vector<bool>& y)
{
    std::size_t zeros = 0;
    for (bool b : y) zeros += !b;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (f.edge(k).constrained && !y[k] && zeros == 1) return false;
    return true;
}

bool cut_labeling_feasible(const CutFactor& f, const std::vector<bool>& y)
{
    const std::size_t m = f.num_cut();
    std::map<NodeId, int> tail_deg, head_deg;
    bool any = false;
    for (std::size_t k = 0; k < m; ++k) {
        if (!y[k]) continue;
        any = true;
        if (++tail_deg[f.cut_edge(k).tail] > 1 || ++head_deg[f.cut_edge(k).head] > 1) return false;
    }
    if (y[m] && !any) return false;
    if (f.uv_index() >= 0 && y[f.uv_index()] && !y[m]) return false;
    return true;
}

namespace {

template <class F, class Feasible>
std::vector<Labeling> enumerate_all(const F& f, std::size_t n, Feasible feasible)
{
    if (n > 16) throw std::length_error("enumeration limited to 16 variables");
    std::vector<Labeling> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<bool> y(n);
        double value = 0;
        for (std::size_t k = 0; k < n; ++k) {
            y[k] = mask >> k & 1;
            if (y[k]) value += f.theta(k);
        }
        if (feasible(f, y)) out.push_back({std::move(y), value});
    }
    return out;
}

} // namespace

std::vector<Labeling> enumerate_path_factor(const PathFactor& f)
{
    return enumerate_all(f, f.size(), path_labeling_feasible);
}

std::vector<Labeling> enumerate_cut_factor(const CutFactor& f)
{
    return enumerate_all(f, f.num_slots(), cut_labeling_feasible);
}

} // namespace ldp
