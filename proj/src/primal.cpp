#include "ldp/primal.hpp"

#include "ldp/min_cost_flow.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <sstream>

namespace ldp {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double tiny = 1e-12;
} // namespace

// ---- solutions

double path_cost(const Instance& inst, const std::vector<NodeId>& nodes)
{
    if (nodes.empty()) return 0;
    double cost = inst.base(inst.source_edge(nodes.front())).cost + inst.base(inst.sink_edge(nodes.back())).cost;
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        pos[nodes[i]] = i;
        cost += inst.node_cost(nodes[i]);
        if (i > 0) {
            auto e = inst.find_base(nodes[i - 1], nodes[i]);
            assert(e);
            cost += inst.base(*e).cost;
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (EdgeId e : inst.in_lifted(nodes[i])) {
            auto it = pos.find(inst.lifted(e).tail);
            if (it != pos.end() && it->second < i) cost += inst.lifted(e).cost;
        }
    return cost;
}

Solution adjust_lifted(const Instance& inst, const std::vector<std::vector<NodeId>>& paths)
{
    Solution sol;
    sol.base_active.assign(inst.base_edges().size(), false);
    sol.lifted_active.assign(inst.lifted_edges().size(), false);
    sol.node_active.assign(inst.num_nodes(), false);
    std::vector<int> path_of(inst.num_nodes(), -1);
    std::vector<std::size_t> pos(inst.num_nodes(), 0);
    for (const auto& p : paths) {
        if (p.empty()) continue;
        const int idx = static_cast<int>(sol.paths.size());
        sol.paths.push_back(p);
        sol.base_active[inst.source_edge(p.front())] = true;
        sol.base_active[inst.sink_edge(p.back())] = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            sol.node_active[p[i]] = true;
            path_of[p[i]] = idx;
            pos[p[i]] = i;
            if (i > 0) {
                auto e = inst.find_base(p[i - 1], p[i]);
                assert(e);
                sol.base_active[*e] = true;
            }
        }
    }
    for (EdgeId e = 0; e < inst.lifted_edges().size(); ++e) {
        const Edge& l = inst.lifted(e);
        sol.lifted_active[e] = path_of[l.tail] >= 0 && path_of[l.tail] == path_of[l.head] && pos[l.tail] < pos[l.head];
    }
    double obj = 0;
    for (NodeId v = 0; v < inst.num_nodes(); ++v)
        if (sol.node_active[v]) obj += inst.node_cost(v);
    for (EdgeId e = 0; e < inst.base_edges().size(); ++e)
        if (sol.base_active[e]) obj += inst.base(e).cost;
    for (EdgeId e = 0; e < inst.lifted_edges().size(); ++e)
        if (sol.lifted_active[e]) obj += inst.lifted(e).cost;
    sol.objective = obj;
    return sol;
}

std::optional<std::string> validate_solution(const Instance& inst, const Solution& sol)
{
    std::vector<int> path_of(inst.num_nodes(), -1);
    std::vector<std::size_t> pos(inst.num_nodes(), 0);
    std::vector<bool> base(inst.base_edges().size(), false);
    for (std::size_t p = 0; p < sol.paths.size(); ++p) {
        const auto& path = sol.paths[p];
        if (path.empty()) return "empty path";
        for (std::size_t i = 0; i < path.size(); ++i) {
            const NodeId v = path[i];
            if (v >= inst.num_nodes()) return "node out of range";
            if (path_of[v] >= 0) return "node " + std::to_string(v) + " used twice";
            path_of[v] = static_cast<int>(p);
            pos[v] = i;
            if (i > 0) {
                auto e = inst.find_base(path[i - 1], v);
                if (!e) return "missing base edge " + std::to_string(path[i - 1]) + "->" + std::to_string(v);
                base[*e] = true;
            }
        }
        base[inst.source_edge(path.front())] = true;
        base[inst.sink_edge(path.back())] = true;
    }
    if (sol.base_active != base) return "base indicators do not match the paths";
    for (NodeId v = 0; v < inst.num_nodes(); ++v)
        if (sol.node_active.size() != inst.num_nodes() || sol.node_active[v] != (path_of[v] >= 0))
            return "node indicators do not match the paths";
    double obj = 0;
    for (NodeId v = 0; v < inst.num_nodes(); ++v)
        if (path_of[v] >= 0) obj += inst.node_cost(v);
    for (EdgeId e = 0; e < base.size(); ++e)
        if (base[e]) obj += inst.base(e).cost;
    if (sol.lifted_active.size() != inst.lifted_edges().size()) return "lifted indicators have the wrong size";
    for (EdgeId e = 0; e < inst.lifted_edges().size(); ++e) {
        const Edge& l = inst.lifted(e);
        const bool on = path_of[l.tail] >= 0 && path_of[l.tail] == path_of[l.head] && pos[l.tail] < pos[l.head];
        if (sol.lifted_active[e] != on) return "lifted indicator of edge " + std::to_string(e) + " is wrong";
        if (on) obj += l.cost;
    }
    if (std::abs(obj - sol.objective) > 1e-9 * std::max(1.0, std::abs(obj))) {
        std::ostringstream msg;
        msg << "objective " << sol.objective << " differs from recomputed " << obj;
        return msg.str();
    }
    return std::nullopt;
}

// ---- min cost flow rounding

McfNetwork init_mcf(const Decomposition& dec, Execution exec)
{
    const std::size_t n = dec.num_nodes();
    std::vector<FactorOptResult> in(n), out(n);
    const long count = static_cast<long>(n);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long v = 0; v < count; ++v) {
            in[v] = optimize(dec.inflow(v));
            out[v] = optimize(dec.outflow(v));
        }
    } else {
        for (long v = 0; v < count; ++v) {
            in[v] = optimize(dec.inflow(v));
            out[v] = optimize(dec.outflow(v));
        }
    }
    const Instance& inst = dec.instance();
    McfNetwork net;
    net.num_nodes = n;
    net.source_cost.assign(n, 0.0);
    net.sink_cost.assign(n, 0.0);
    // alpha per base edge from either side
    std::vector<double> alpha_out(inst.base_edges().size(), 0.0), alpha_in(inst.base_edges().size(), 0.0);
    for (NodeId v = 0; v < n; ++v) {
        const FlowFactor& fo = dec.outflow(v);
        for (std::size_t j = 0; j < fo.num_base(); ++j) alpha_out[fo.base_edge(j)] = out[v].alpha[j];
        const FlowFactor& fi = dec.inflow(v);
        for (std::size_t j = 0; j < fi.num_base(); ++j) alpha_in[fi.base_edge(j)] = in[v].alpha[j];
    }
    for (EdgeId e = 0; e < inst.base_edges().size(); ++e) {
        const Edge& edge = inst.base(e);
        if (edge.tail == inst.source()) net.source_cost[edge.head] = alpha_in[e];
        else if (edge.head == inst.sink()) net.sink_cost[edge.tail] = alpha_out[e];
        else net.edges.push_back({e, edge.tail, edge.head, alpha_out[e], alpha_in[e]});
    }
    return net;
}

McfResult solve_mcf(const McfNetwork& net)
{
    const std::size_t n = net.num_nodes;
    const std::size_t s = 2 * n, t = 2 * n + 1;
    MinCostFlow mcf(2 * n + 2);
    std::vector<std::size_t> src(n), snk(n), node(n);
    for (NodeId u = 0; u < n; ++u) {
        node[u] = mcf.add_arc(2 * u, 2 * u + 1, 1, 0.0);
        src[u] = mcf.add_arc(s, 2 * u, 1, net.source_cost[u]);
        snk[u] = mcf.add_arc(2 * u + 1, t, 1, net.sink_cost[u]);
    }
    std::vector<std::size_t> arc(net.edges.size());
    for (std::size_t k = 0; k < net.edges.size(); ++k)
        arc[k] = mcf.add_arc(2 * net.edges[k].tail + 1, 2 * net.edges[k].head, 1, net.edges[k].cost());

    McfResult res;
    res.cost = mcf.solve(s, t);
    std::vector<NodeId> succ(n, n);
    for (std::size_t k = 0; k < net.edges.size(); ++k)
        if (mcf.flow(arc[k]) > 0) succ[net.edges[k].tail] = net.edges[k].head;
    for (NodeId u = 0; u < n; ++u) {
        if (mcf.flow(src[u]) == 0) continue;
        std::vector<NodeId> path{u};
        for (NodeId v = u; mcf.flow(snk[v]) == 0;) {
            v = succ[v];
            assert(v < n);
            path.push_back(v);
        }
        res.paths.push_back(std::move(path));
    }
    if (auto pi = mcf.potentials()) {
        res.pi_in.emplace(n);
        res.pi_out.emplace(n);
        for (NodeId u = 0; u < n; ++u) {
            (*res.pi_in)[u] = (*pi)[2 * u];
            (*res.pi_out)[u] = (*pi)[2 * u + 1];
        }
    }
    return res;
}

bool reparametrize_by_mcf(Decomposition& dec, const McfNetwork& net, const McfResult& res)
{
    if (!res.pi_in || !res.pi_out) return false;
    const auto& pin = *res.pi_in;
    const auto& pout = *res.pi_out;
    const std::size_t n = net.num_nodes;
    // shift[u] moves node cost from the outflow to the inflow side of u
    std::vector<double> shift(n);
    for (NodeId u = 0; u < n; ++u) shift[u] = -0.5 * (pin[u] + pout[u]);
    for (const McfEdge& e : net.edges) {
        const double r_node = pin[e.tail] - pout[e.tail];
        const double r_edge = e.cost() + pout[e.tail] - pin[e.head];
        const double target = 0.5 * r_node + 0.5 * r_edge;
        const double move = e.alpha_out - shift[e.tail] - target;
        const Variable var{VarKind::base, e.id};
        apply_message(dec, *dec.out_site(var), *dec.in_site(var), move);
    }
    for (NodeId u = 0; u < n; ++u) {
        const Variable var{VarKind::node, u};
        apply_message(dec, *dec.out_site(var), *dec.in_site(var), shift[u]);
    }
    return true;
}

// ---- local search

namespace {

using Paths = std::vector<std::vector<NodeId>>;

double base_cost(const Instance& inst, NodeId a, NodeId b)
{
    auto e = inst.find_base(a, b);
    return e ? inst.base(*e).cost : inf;
}

void split_recursive(const Instance& inst, const std::vector<NodeId>& p, Paths& out)
{
    const std::size_t len = p.size();
    if (len < 2) { out.push_back(p); return; }
    // cross[j]: lifted cost between p[..j] and p[j+1..]
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < len; ++i) pos[p[i]] = i;
    std::vector<double> diff(len + 1, 0.0);
    for (std::size_t i = 0; i < len; ++i)
        for (EdgeId e : inst.out_lifted(p[i])) {
            auto it = pos.find(inst.lifted(e).head);
            if (it == pos.end() || it->second <= i) continue;
            diff[i] += inst.lifted(e).cost;
            diff[it->second] -= inst.lifted(e).cost;
        }
    double cross = 0, best = 0;
    std::size_t arg = len;
    for (std::size_t j = 0; j + 1 < len; ++j) {
        cross += diff[j];
        const double split = -cross - base_cost(inst, p[j], p[j + 1]) + inst.base(inst.source_edge(p[j + 1])).cost
                             + inst.base(inst.sink_edge(p[j])).cost;
        if (split < best - tiny) { best = split; arg = j; }
    }
    if (arg == len) { out.push_back(p); return; }
    split_recursive(inst, std::vector<NodeId>(p.begin(), p.begin() + arg + 1), out);
    split_recursive(inst, std::vector<NodeId>(p.begin() + arg + 1, p.end()), out);
}

struct LiftedSums {
    double plus = 0, minus = 0;
};

// lifted costs from path a to path b, for all pairs that have any
std::map<std::pair<std::size_t, std::size_t>, LiftedSums> lifted_between(const Instance& inst, const Paths& paths)
{
    std::vector<std::size_t> path_of(inst.num_nodes(), paths.size());
    for (std::size_t p = 0; p < paths.size(); ++p)
        for (NodeId v : paths[p]) path_of[v] = p;
    std::map<std::pair<std::size_t, std::size_t>, LiftedSums> sums;
    for (const Edge& l : inst.lifted_edges()) {
        const std::size_t a = path_of[l.tail], b = path_of[l.head];
        if (a == paths.size() || b == paths.size() || a == b) continue;
        auto& s = sums[{a, b}];
        if (l.cost > 0) s.plus += l.cost;
        else s.minus += l.cost;
    }
    return sums;
}

// merge_tau minus the in/out costs that disappear; inf when not allowed
double merge_gain(const Instance& inst, const std::vector<NodeId>& a, const std::vector<NodeId>& b,
                  const LiftedSums& l, double tau)
{
    const double bridge = base_cost(inst, a.back(), b.front());
    if (bridge == inf || l.plus > tau * -l.minus) return inf;
    return bridge + l.plus + l.minus - inst.base(inst.sink_edge(a.back())).cost
           - inst.base(inst.source_edge(b.front())).cost;
}

} // namespace

std::vector<std::vector<NodeId>> split_paths(const Instance& inst, const std::vector<std::vector<NodeId>>& paths)
{
    Paths out;
    for (const auto& p : paths) split_recursive(inst, p, out);
    return out;
}

std::vector<std::vector<NodeId>> trim_paths(const Instance& inst, const std::vector<std::vector<NodeId>>& paths)
{
    Paths out;
    std::vector<std::size_t> pos(inst.num_nodes(), 0);
    std::vector<const std::vector<NodeId>*> owner(inst.num_nodes(), nullptr);
    auto src = [&](NodeId v) { return inst.base(inst.source_edge(v)).cost; };
    auto snk = [&](NodeId v) { return inst.base(inst.sink_edge(v)).cost; };
    for (const auto& p : paths) {
        const std::size_t m = p.size();
        for (std::size_t i = 0; i < m; ++i) {
            pos[p[i]] = i;
            owner[p[i]] = &p;
        }
        // pre[k]: cost of p[0..k), suf[k]: cost of p[k..m)
        std::vector<double> pre(m + 1, 0.0), suf(m + 1, 0.0);
        double inner = 0;   // p[0..k) without terminal edges
        for (std::size_t k = 0; k < m; ++k) {
            const NodeId v = p[k];
            inner += inst.node_cost(v) + (k ? base_cost(inst, p[k - 1], v) : 0.0);
            for (EdgeId e : inst.in_lifted(v)) {
                const NodeId a = inst.lifted(e).tail;
                if (owner[a] == &p && pos[a] < k) inner += inst.lifted(e).cost;
            }
            pre[k + 1] = inner + src(p.front()) + snk(v);
        }
        inner = 0;
        for (std::size_t k = m; k-- > 0;) {
            const NodeId v = p[k];
            inner += inst.node_cost(v) + (k + 1 < m ? base_cost(inst, v, p[k + 1]) : 0.0);
            for (EdgeId e : inst.out_lifted(v)) {
                const NodeId b = inst.lifted(e).head;
                if (owner[b] == &p && pos[b] > k) inner += inst.lifted(e).cost;
            }
            suf[k] = inner + src(v) + snk(p.back());
        }
        // whole path unless a strictly cheaper prefix, suffix or nothing exists
        double best = pre[m] - tiny;
        std::size_t lo = 0, hi = m;
        if (0.0 < best) { best = 0.0; lo = hi = 0; }
        for (std::size_t k = 1; k < m; ++k) {
            if (pre[k] < best) { best = pre[k]; lo = 0; hi = k; }
            if (suf[k] < best) { best = suf[k]; lo = k; hi = m; }
        }
        if (lo < hi) out.emplace_back(p.begin() + static_cast<long>(lo), p.begin() + static_cast<long>(hi));
        for (NodeId v : p) owner[v] = nullptr;
    }
    return out;
}

std::vector<std::vector<NodeId>> merge_paths(const Instance& inst, std::vector<std::vector<NodeId>> paths, double tau)
{
    while (paths.size() > 1) {
        const auto sums = lifted_between(inst, paths);
        double best = -tiny;
        std::size_t ba = 0, bb = 0;
        bool found = false;
        for (std::size_t a = 0; a < paths.size(); ++a)
            for (std::size_t b = 0; b < paths.size(); ++b) {
                if (a == b) continue;
                auto it = sums.find({a, b});
                const double g = merge_gain(inst, paths[a], paths[b], it == sums.end() ? LiftedSums{} : it->second, tau);
                if (g < best) { best = g; ba = a; bb = b; found = true; }
            }
        if (!found) break;
        paths[ba].insert(paths[ba].end(), paths[bb].begin(), paths[bb].end());
        paths.erase(paths.begin() + bb);
    }
    return paths;
}

std::vector<std::vector<NodeId>> cut_ends(const Instance& inst, std::vector<std::vector<NodeId>> paths, double tau,
                                          int budget)
{
    if (budget <= 0 || paths.size() < 2) return paths;
    const auto sums = lifted_between(inst, paths);
    std::vector<bool> touched(paths.size(), false);
    Paths extra;
    for (std::size_t a = 0; a < paths.size(); ++a) {
        if (touched[a]) continue;
        // most attractive partner with a direct bridge versus without one
        double best_bridged = inf, best_lifted = inf;
        std::size_t partner = paths.size();
        for (std::size_t b = 0; b < paths.size(); ++b) {
            if (a == b || touched[b]) continue;
            auto it = sums.find({a, b});
            const LiftedSums l = it == sums.end() ? LiftedSums{} : it->second;
            if (base_cost(inst, paths[a].back(), paths[b].front()) < inf)
                best_bridged = std::min(best_bridged, merge_gain(inst, paths[a], paths[b], l, tau));
            else if (l.plus + l.minus < best_lifted) { best_lifted = l.plus + l.minus; partner = b; }
        }
        if (partner == paths.size() || !(best_lifted < 0) || !(best_lifted < best_bridged)) continue;
        const auto& p1 = paths[a];
        const auto& p2 = paths[partner];
        const double before = path_cost(inst, p1) + path_cost(inst, p2);
        double best_delta = -tiny;
        std::size_t bi1 = 0, bi2 = 0;
        for (std::size_t i1 = 0; i1 < p1.size() && static_cast<int>(i1) <= budget; ++i1)
            for (std::size_t i2 = 0; i2 < p2.size() && static_cast<int>(i1 + i2) <= budget; ++i2) {
                if (i1 + i2 == 0) continue;
                const std::vector<NodeId> head(p1.begin(), p1.end() - i1);
                const std::vector<NodeId> tail(p2.begin() + i2, p2.end());
                if (base_cost(inst, head.back(), tail.front()) == inf) continue;
                // the shortened pair must pass the merge_tau test
                Paths pair{head, tail};
                const auto ps = lifted_between(inst, pair);
                auto it = ps.find({0, 1});
                if (merge_gain(inst, head, tail, it == ps.end() ? LiftedSums{} : it->second, tau) == inf) continue;
                std::vector<NodeId> merged = head;
                merged.insert(merged.end(), tail.begin(), tail.end());
                double after = path_cost(inst, merged);
                if (i1 > 0) after += path_cost(inst, std::vector<NodeId>(p1.end() - i1, p1.end()));
                if (i2 > 0) after += path_cost(inst, std::vector<NodeId>(p2.begin(), p2.begin() + i2));
                if (after - before < best_delta) { best_delta = after - before; bi1 = i1; bi2 = i2; }
            }
        if (bi1 + bi2 == 0) continue;
        std::vector<NodeId> merged(p1.begin(), p1.end() - bi1);
        merged.insert(merged.end(), p2.begin() + bi2, p2.end());
        if (bi1 > 0) extra.emplace_back(p1.end() - bi1, p1.end());
        if (bi2 > 0) extra.emplace_back(p2.begin(), p2.begin() + bi2);
        paths[a] = std::move(merged);
        paths[partner].clear();
        touched[a] = touched[partner] = true;
    }
    Paths out;
    for (auto& p : paths)
        if (!p.empty()) out.push_back(std::move(p));
    for (auto& p : extra) out.push_back(std::move(p));
    return out;
}

Solution local_search(const Instance& inst, const Solution& sol, const LocalSearchConfig& cfg)
{
    auto canonical = [&](Paths& paths) {
        std::sort(paths.begin(), paths.end(), [&](const auto& a, const auto& b) {
            return std::make_pair(inst.frame(a.front()), a.front()) < std::make_pair(inst.frame(b.front()), b.front());
        });
    };
    Solution best = sol;
    Paths paths = sol.paths;
    // repeat the split / cut-ends / merge round while it improves
    for (;;) {
        paths = trim_paths(inst, split_paths(inst, paths));
        paths = cut_ends(inst, std::move(paths), cfg.tau, cfg.cut_ends_budget);
        // uncovered nodes may join a path through a merge
        std::vector<char> covered(inst.num_nodes(), 0);
        for (const auto& p : paths)
            for (NodeId v : p) covered[v] = 1;
        for (NodeId v : inst.order())
            if (!covered[v]) paths.push_back({v});
        paths = merge_paths(inst, std::move(paths), cfg.tau);
        paths = trim_paths(inst, paths);
        canonical(paths);
        Solution out = adjust_lifted(inst, paths);
        if (out.objective > best.objective) break;   // only rounding noise can get here
        const bool progress = out.objective < best.objective - tiny;
        best = std::move(out);
        if (!progress) break;
    }
    return best;
}

} // namespace ldp
