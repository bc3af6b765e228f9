#include "ldp/separation.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <tuple>
#include <unordered_map>

namespace ldp {

namespace {

struct UnionEdge {
    Variable var;
    NodeId tail, head;
};

// Transitive closure of a growing edge set with one parent link per connected pair,
// enough to rebuild a path between any connected pair.
class Closure {
public:
    explicit Closure(std::size_t n) : n_(n), pred_(n), desc_(n), conn_(n * n, 0) {}

    bool connected(NodeId p, NodeId d) const { return p == d || conn_[p * n_ + d]; }
    const std::vector<NodeId>& pred(NodeId v) const { return pred_[v]; }
    const std::vector<NodeId>& desc(NodeId v) const { return desc_[v]; }

    std::vector<NodeId> with_pred(NodeId v) const
    {
        std::vector<NodeId> out{v};
        out.insert(out.end(), pred_[v].begin(), pred_[v].end());
        return out;
    }
    std::vector<NodeId> with_desc(NodeId v) const
    {
        std::vector<NodeId> out{v};
        out.insert(out.end(), desc_[v].begin(), desc_[v].end());
        return out;
    }

    void add(const UnionEdge& e)
    {
        const auto ps = with_pred(e.tail);
        const auto ds = with_desc(e.head);
        for (NodeId p : ps)
            for (NodeId d : ds) {
                if (connected(p, d)) continue;
                conn_[p * n_ + d] = 1;
                via_.emplace(p * n_ + d, e);
                desc_[p].push_back(d);
                pred_[d].push_back(p);
            }
    }

    void path(NodeId p, NodeId d, std::vector<UnionEdge>& out) const
    {
        if (p == d) return;
        const UnionEdge& e = via_.at(p * n_ + d);
        path(p, e.tail, out);
        out.push_back(e);
        path(e.head, d, out);
    }

private:
    std::size_t n_;
    std::vector<std::vector<NodeId>> pred_, desc_;
    std::vector<char> conn_;
    std::unordered_map<std::size_t, UnionEdge> via_;
};

// Membership marks that are cleared by bumping a stamp.
class Marks {
public:
    explicit Marks(std::size_t n) : stamp_(n, 0) {}
    void reset() { ++now_; }
    void set(NodeId v) { stamp_[v] = now_; }
    bool operator[](NodeId v) const { return stamp_[v] == now_; }

private:
    std::vector<unsigned> stamp_;
    unsigned now_ = 1;
};

struct Scored {
    double cost;
    int kind;   // 0 base, 1 lifted
    std::size_t id;
    bool operator<(const Scored& o) const { return std::tie(cost, kind, id) < std::tie(o.cost, o.kind, o.id); }
};

bool is_inner_edge(const Instance& inst, const Edge& e) { return inst.is_inner(e.tail) && inst.is_inner(e.head); }

std::vector<SeparationCandidate> best_first(std::vector<SeparationCandidate> cands, std::size_t limit)
{
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& a, const auto& b) { return a.priority > b.priority; });
    if (cands.size() > limit) cands.resize(limit);
    return cands;
}

} // namespace

SeparationCosts extract_separation_costs(const Decomposition& dec, Execution exec)
{
    const Instance& inst = dec.instance();
    SeparationCosts c;
    c.base_out.assign(inst.base_edges().size(), 0.0);
    c.base_in = c.base_out;
    c.lifted_out.assign(inst.lifted_edges().size(), 0.0);
    c.lifted_in = c.lifted_out;

    const std::size_t n = dec.num_nodes();
    // per factor: base then lifted values in slot order
    std::vector<std::vector<double>> gamma(2 * n);
    auto work = [&](std::size_t i) {
        FlowFactor f = i < n ? dec.inflow(i) : dec.outflow(i - n);
        std::vector<double>& g = gamma[i];
        g.assign(f.num_base() + f.num_lifted(), 0.0);
        const LiftedMarginals lm = all_lifted_min_marginals(f);
        for (std::size_t j = 0; j < f.num_lifted(); ++j) {
            g[f.num_base() + j] = 0.5 * lm.value[j];
            f.add_theta(f.lifted_slot(j), -0.5 * lm.value[j]);
        }
        const std::vector<double> bm = all_base_min_marginals(f);
        for (std::size_t j = 0; j < f.num_base(); ++j) g[j] = bm[j];
    };
    const long count = static_cast<long>(2 * n);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < count; ++i) work(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < count; ++i) work(static_cast<std::size_t>(i));
    }

    for (std::size_t i = 0; i < 2 * n; ++i) {
        const bool in = i < n;
        const FlowFactor& f = in ? dec.inflow(i) : dec.outflow(i - n);
        for (std::size_t j = 0; j < f.num_base(); ++j) {
            const EdgeId e = f.base_edge(j);
            if (!is_inner_edge(inst, inst.base(e))) continue;
            (in ? c.base_in : c.base_out)[e] = gamma[i][j];
        }
        for (std::size_t j = 0; j < f.num_lifted(); ++j)
            (in ? c.lifted_in : c.lifted_out)[f.lifted_edge(j)] = gamma[i][f.num_base() + j];
    }
    c.base.resize(c.base_out.size());
    for (std::size_t e = 0; e < c.base.size(); ++e) c.base[e] = c.base_out[e] + c.base_in[e];
    c.lifted.resize(c.lifted_out.size());
    for (std::size_t e = 0; e < c.lifted.size(); ++e) c.lifted[e] = c.lifted_out[e] + c.lifted_in[e];
    return c;
}

std::vector<SeparationCandidate> separate_paths(const SeparationCosts& costs, const Instance& inst, double eps,
                                                std::size_t limit)
{
    std::vector<Scored> negative;
    for (EdgeId e = 0; e < inst.base_edges().size(); ++e)
        if (is_inner_edge(inst, inst.base(e)) && costs.base[e] < -eps) negative.push_back({costs.base[e], 0, e});
    for (EdgeId e = 0; e < inst.lifted_edges().size(); ++e)
        if (costs.lifted[e] < -eps) negative.push_back({costs.lifted[e], 1, e});
    if (negative.empty()) return {};
    std::sort(negative.begin(), negative.end());

    const StrongBaseEdges strong = compute_strong_edges(inst);
    auto as_path_edge = [&](const UnionEdge& u) {
        const bool constrained = u.var.kind == VarKind::lifted || strong.contains(u.var.id);
        return PathEdge{u.var, u.tail, u.head, constrained};
    };

    Closure closure(inst.num_nodes());
    std::vector<SeparationCandidate> out;
    std::set<std::vector<std::pair<int, std::size_t>>> seen;
    auto emit = [&](std::vector<UnionEdge> chain, UnionEdge closing, double priority) {
        std::vector<PathEdge> path;
        for (const auto& u : chain) path.push_back(as_path_edge(u));
        PathFactor f(std::move(path), as_path_edge(closing));
        if (!seen.insert(f.key()).second) return;
        out.push_back({CandidateKind::path, std::move(f), priority});
    };

    Marks marks(inst.num_nodes());
    for (const Scored& s : negative) {
        const Edge& edge = s.kind == 0 ? inst.base(s.id) : inst.lifted(s.id);
        const UnionEdge ij{{s.kind == 0 ? VarKind::base : VarKind::lifted, s.id}, edge.tail, edge.head};
        const double size = -s.cost;
        // inner: p ~> i -> j ~> d closed by a positive lifted pd
        marks.reset();
        for (NodeId d : closure.with_desc(ij.head)) marks.set(d);
        for (NodeId p : closure.with_pred(ij.tail))
            for (EdgeId l : inst.out_lifted(p)) {
                const NodeId d = inst.lifted(l).head;
                if (!marks[d] || costs.lifted[l] <= eps) continue;
                std::vector<UnionEdge> chain;
                closure.path(p, ij.tail, chain);
                chain.push_back(ij);
                closure.path(ij.head, d, chain);
                emit(std::move(chain), {{VarKind::lifted, l}, p, d}, std::min(size, costs.lifted[l]));
            }
        // outer: i ~> d, positive lifted dp, p ~> j, closed by ij
        marks.reset();
        for (NodeId p : closure.with_pred(ij.head)) marks.set(p);
        for (NodeId d : closure.with_desc(ij.tail))
            for (EdgeId l : inst.out_lifted(d)) {
                const NodeId p = inst.lifted(l).head;
                if (!marks[p] || costs.lifted[l] <= eps) continue;
                std::vector<UnionEdge> chain;
                closure.path(ij.tail, d, chain);
                chain.push_back({{VarKind::lifted, l}, d, p});
                closure.path(p, ij.head, chain);
                emit(std::move(chain), ij, std::min(size, costs.lifted[l]));
            }
        closure.add(ij);
    }
    return best_first(std::move(out), limit);
}

std::vector<SeparationCandidate> separate_cuts(const SeparationCosts& costs, const Instance& inst, double eps,
                                               std::size_t limit)
{
    bool any = false;
    for (double x : costs.lifted) any = any || x < -eps;
    if (!any) return {};

    std::vector<Scored> low, high;
    for (EdgeId e = 0; e < inst.base_edges().size(); ++e) {
        if (!is_inner_edge(inst, inst.base(e))) continue;
        (costs.base[e] < eps ? low : high).push_back({costs.base[e], 0, e});
    }
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());

    Closure closure(inst.num_nodes());
    for (const Scored& s : low) closure.add({{VarKind::base, s.id}, inst.base(s.id).tail, inst.base(s.id).head});

    const Reachability full = full_reachability(inst);
    std::vector<SeparationCandidate> out;
    std::set<std::vector<std::pair<int, std::size_t>>> seen;
    std::vector<char> in_a(inst.num_nodes(), 0);

    Marks reach_v(inst.num_nodes());
    for (const Scored& s : high) {
        const Edge& ij = inst.base(s.id);
        reach_v.reset();
        for (NodeId v : closure.with_desc(ij.head)) reach_v.set(v);
        for (NodeId u : closure.with_pred(ij.tail))
            for (EdgeId l : inst.out_lifted(u)) {
                const NodeId v = inst.lifted(l).head;
                if (!reach_v[v] || costs.lifted[l] >= -eps || closure.connected(u, v)) continue;
                const auto side = closure.with_desc(u);
                for (NodeId a : side) in_a[a] = 1;
                std::vector<CutEdge> cut;
                for (NodeId a : side)
                    for (EdgeId e : inst.out_base(a)) {
                        const NodeId b = inst.base(e).head;
                        if (!inst.is_inner(b) || in_a[b]) continue;
                        if (b == v || full(b, v)) cut.push_back({e, a, b});
                    }
                for (NodeId a : side) in_a[a] = 0;
                std::sort(cut.begin(), cut.end(), [](const CutEdge& x, const CutEdge& y) { return x.id < y.id; });
                CutFactor f(l, u, v, std::move(cut));
                if (!seen.insert(f.key()).second) continue;
                out.push_back({CandidateKind::cut, std::move(f), std::min(s.cost, -costs.lifted[l])});
            }
        closure.add({{VarKind::base, s.id}, ij.tail, ij.head});
    }
    return best_first(std::move(out), limit);
}

std::vector<SeparationCandidate> separate(const SeparationCosts& costs, const Instance& inst, double eps,
                                          std::size_t limit)
{
    auto cands = separate_cuts(costs, inst, eps, limit);
    auto paths = separate_paths(costs, inst, eps, limit);
    for (auto& p : paths) cands.push_back(std::move(p));
    return best_first(std::move(cands), limit);
}

std::size_t install_candidates(Decomposition& dec, const SeparationCosts& costs,
                               const std::vector<SeparationCandidate>& candidates)
{
    const Instance& inst = dec.instance();
    std::vector<Site> added;   // first slot of each new factor; kind and index are what matter
    for (const auto& c : candidates) {
        if (c.kind == CandidateKind::path) {
            if (dec.add_path(std::get<PathFactor>(c.factor)))
                added.push_back({FactorKind::path, dec.paths().size() - 1, 0});
        } else if (dec.add_cut(std::get<CutFactor>(c.factor))) {
            added.push_back({FactorKind::cut, dec.cuts().size() - 1, 0});
        }
    }
    auto slots = [&](const Site& f) {
        return f.kind == FactorKind::path ? dec.paths()[f.factor].size() : dec.cuts()[f.factor].num_slots();
    };
    std::vector<int> base_n(inst.base_edges().size(), 0), lifted_n(inst.lifted_edges().size(), 0);
    for (const Site& f : added)
        for (std::size_t k = 0; k < slots(f); ++k) {
            const Variable var = dec.variable({f.kind, f.factor, k});
            ++(var.kind == VarKind::base ? base_n[var.id] : lifted_n[var.id]);
        }
    for (const Site& f : added)
        for (std::size_t k = 0; k < slots(f); ++k) {
            const Site site{f.kind, f.factor, k};
            const Variable var = dec.variable(site);
            const bool base = var.kind == VarKind::base;
            const double w = 1.0 / (base ? base_n[var.id] : lifted_n[var.id]);
            const double out = w * (base ? costs.base_out[var.id] : costs.lifted_out[var.id]);
            const double in = w * (base ? costs.base_in[var.id] : costs.lifted_in[var.id]);
            apply_message(dec, *dec.out_site(var), site, out);
            apply_message(dec, *dec.in_site(var), site, in);
        }
    return added.size();
}

} // namespace ldp
