#include "ldp/flow_factor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace ldp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// lifted_cost[a] = lift[a] + min(0, min over children of lifted_cost), for a in [0, upto),
// skipping local node `excluded`. Entries at or above `upto` are taken as given.
void lifted_costs(const FlowFactor& f, const std::vector<double>& lift, int excluded, std::size_t upto,
                  std::vector<double>& lc, std::vector<int>* next)
{
    for (std::size_t a = upto; a-- > 0;) {
        if (static_cast<int>(a) == excluded) continue;
        double best = 0;
        int arg = kTerminal;
        for (int c : f.children(a)) {
            if (c == excluded) continue;
            if (lc[c] < best) { best = lc[c]; arg = c; }
        }
        lc[a] = lift[a] + best;
        if (next) (*next)[a] = arg;
    }
}

struct Alphas {
    double opt = 0;
    int best = -1;
};

Alphas scan_alphas(const FlowFactor& f, const std::vector<double>& lc, int excluded, std::vector<double>* alpha)
{
    Alphas out;
    double best = inf;
    for (std::size_t j = 0; j < f.num_base(); ++j) {
        const int target = f.base_target(j);
        if (target != kTerminal && target == excluded) {
            if (alpha) (*alpha)[j] = inf;
            continue;
        }
        const double a = f.node_theta() + f.base_theta(j) + (target == kTerminal ? 0.0 : lc[target]);
        if (alpha) (*alpha)[j] = a;
        if (a < best) { best = a; out.best = static_cast<int>(j); }
    }
    if (best < 0) out.opt = best;
    else out.best = -1;
    return out;
}

std::vector<double> local_lifts(const FlowFactor& f)
{
    std::vector<double> lift(f.num_local(), 0.0);
    for (std::size_t j = 0; j < f.num_lifted(); ++j) lift[f.lifted_local(j)] = f.lifted_theta(j);
    return lift;
}

// Local nodes on the optimal path, in order.
std::vector<int> optimal_locals(const FlowFactor& f, const FactorOptResult& res)
{
    std::vector<int> path;
    if (res.best_edge < 0) return path;
    for (int a = f.base_target(res.best_edge); a != kTerminal; a = res.next[a]) path.push_back(a);
    return path;
}

// Optimum with local node r removed from the graph. lc holds valid lifted costs for indices > r.
double skip_one(const FlowFactor& f, const std::vector<double>& lift, std::vector<double> lc, int r)
{
    lifted_costs(f, lift, r, static_cast<std::size_t>(r), lc, nullptr);
    return scan_alphas(f, lc, r, nullptr).opt;
}

// back[a]: best cost of a center-to-a path including the node, first edge and lifted costs up to a.
void backward_costs(const FlowFactor& f, const std::vector<double>& lift, std::vector<double>& back)
{
    back.assign(f.num_local(), inf);
    for (std::size_t a = 0; a < f.num_local(); ++a) {
        double best = inf;
        if (f.direct_edge(a) >= 0) best = f.node_theta() + f.base_theta(f.direct_edge(a));
        for (int p : f.parents(a)) best = std::min(best, back[p]);
        back[a] = best + lift[a];
    }
}

} // namespace

FlowFactor::FlowFactor(const Instance& inst, NodeId center, Direction dir, int max_frame_gap)
    : center_(center), dir_(dir), terminal_(dir == Direction::out ? inst.sink() : inst.source())
{
    const bool out = dir == Direction::out;
    auto base_list = [&](NodeId v) { return out ? inst.out_base(v) : inst.in_base(v); };
    auto far_end = [&](EdgeId e) { return out ? inst.base(e).head : inst.base(e).tail; };
    const int f0 = inst.frame(center);
    auto in_window = [&](NodeId u) { return std::abs(inst.frame(u) - f0) <= max_frame_gap; };

    // reachable inner nodes within the frame window
    std::unordered_map<NodeId, int> local;
    std::vector<NodeId> stack{center};
    std::vector<NodeId> found;
    local[center] = -2;
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (EdgeId e : base_list(x)) {
            NodeId y = far_end(e);
            if (!inst.is_inner(y) || !in_window(y) || local.count(y)) continue;
            local[y] = 0;
            found.push_back(y);
            stack.push_back(y);
        }
    }
    std::sort(found.begin(), found.end(), [&](NodeId a, NodeId b) {
        const int fa = out ? inst.frame(a) : -inst.frame(a);
        const int fb = out ? inst.frame(b) : -inst.frame(b);
        return std::make_pair(fa, a) < std::make_pair(fb, b);
    });
    nodes_ = found;
    for (std::size_t a = 0; a < nodes_.size(); ++a) local[nodes_[a]] = static_cast<int>(a);

    children_.assign(nodes_.size(), {});
    parents_.assign(nodes_.size(), {});
    direct_.assign(nodes_.size(), -1);
    lifted_at_.assign(nodes_.size(), -1);
    for (std::size_t a = 0; a < nodes_.size(); ++a)
        for (EdgeId e : base_list(nodes_[a])) {
            NodeId y = far_end(e);
            auto it = local.find(y);
            if (it == local.end() || it->second < 0) continue;
            children_[a].push_back(it->second);
            parents_[it->second].push_back(static_cast<int>(a));
        }
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
        auto& c = children_[a];
        std::sort(c.begin(), c.end(), [&](int x, int y) { return nodes_[x] < nodes_[y]; });
    }

    for (EdgeId e : base_list(center)) {
        NodeId y = far_end(e);
        base_edge_.push_back(e);
        if (y == terminal_) {
            base_target_.push_back(kTerminal);
        } else {
            const int a = local.at(y);
            base_target_.push_back(a);
            direct_[a] = static_cast<int>(base_edge_.size() - 1);
        }
    }
    for (EdgeId e : out ? inst.out_lifted(center) : inst.in_lifted(center)) {
        NodeId y = out ? inst.lifted(e).head : inst.lifted(e).tail;
        auto it = local.find(y);
        if (it == local.end() || it->second < 0) continue;   // outside the window: never active
        lifted_at_[it->second] = static_cast<int>(lifted_edge_.size());
        lifted_edge_.push_back(e);
        lifted_local_.push_back(it->second);
    }
    theta_.assign(1 + base_edge_.size() + lifted_edge_.size(), 0.0);
}

std::optional<std::size_t> FlowFactor::slot_of(Variable var) const
{
    switch (var.kind) {
    case VarKind::node:
        if (var.id == center_) return 0;
        return std::nullopt;
    case VarKind::base:
        for (std::size_t j = 0; j < base_edge_.size(); ++j)
            if (base_edge_[j] == var.id) return base_slot(j);
        return std::nullopt;
    case VarKind::lifted:
        for (std::size_t j = 0; j < lifted_edge_.size(); ++j)
            if (lifted_edge_[j] == var.id) return lifted_slot(j);
        return std::nullopt;
    }
    return std::nullopt;
}

Variable FlowFactor::variable(std::size_t slot) const
{
    if (slot == 0) return {VarKind::node, center_};
    if (slot <= num_base()) return {VarKind::base, base_edge_[slot - 1]};
    return {VarKind::lifted, lifted_edge_[slot - 1 - num_base()]};
}

void FlowFactor::set_theta(std::size_t slot, double value)
{
    theta_[slot] = value;
    cached_opt_.reset();
}

double FlowFactor::opt() const
{
    if (!cached_opt_) cached_opt_ = optimize(*this).opt;
    return *cached_opt_;
}

FactorOptResult optimize(const FlowFactor& f)
{
    FactorOptResult res;
    const auto lift = local_lifts(f);
    res.lifted_cost.assign(f.num_local(), 0.0);
    res.next.assign(f.num_local(), kTerminal);
    res.alpha.assign(f.num_base(), 0.0);
    lifted_costs(f, lift, -2, f.num_local(), res.lifted_cost, &res.next);
    const Alphas a = scan_alphas(f, res.lifted_cost, -2, &res.alpha);
    res.opt = a.opt;
    res.best_edge = a.best;
    return res;
}

std::vector<NodeId> extract_optimal_path(const FlowFactor& f, const FactorOptResult& res)
{
    std::vector<NodeId> path;
    if (res.best_edge < 0) return path;
    for (int a : optimal_locals(f, res)) path.push_back(f.local_node(a));
    path.push_back(f.terminal());
    return path;
}

std::vector<double> all_base_min_marginals(const FlowFactor& f)
{
    const FactorOptResult res = optimize(f);
    // best and second best edge, ties to the smaller index
    int first = -1, second = -1;
    for (std::size_t j = 0; j < f.num_base(); ++j) {
        const int jj = static_cast<int>(j);
        if (first < 0 || res.alpha[j] < res.alpha[first]) { second = first; first = jj; }
        else if (second < 0 || res.alpha[j] < res.alpha[second]) second = jj;
    }
    const double ref = second < 0 ? 0.0 : std::min(res.alpha[second], 0.0);
    std::vector<double> gamma(f.num_base());
    for (std::size_t j = 0; j < f.num_base(); ++j) gamma[j] = res.alpha[j] - ref;
    return gamma;
}

LiftedMarginals all_lifted_min_marginals(const FlowFactor& f)
{
    LiftedMarginals out;
    out.value.assign(f.num_lifted(), 0.0);
    if (f.num_lifted() == 0) return out;
    auto lift = local_lifts(f);
    const FactorOptResult res = optimize(f);
    const std::vector<int> path = optimal_locals(f, res);
    std::vector<char> on_path(f.num_local(), 0);
    for (int a : path) on_path[a] = 1;

    // lifted edges on the optimal path: forced-one value is the current optimum,
    // forced-zero value is the optimum without that node
    double opt = res.opt;
    for (int a : path) {
        const int j = f.lifted_at(a);
        if (j < 0) continue;
        const double without = skip_one(f, lift, res.lifted_cost, a);
        const double gamma = opt - without;
        lift[a] -= gamma;
        out.value[j] = gamma;
        out.order.push_back(static_cast<std::size_t>(j));
        opt = without;
    }

    // the remaining ones: forced-zero value is the optimum, forced-one value via prefix + suffix
    std::vector<double> lc(f.num_local(), 0.0);
    lifted_costs(f, lift, -2, f.num_local(), lc, nullptr);
    opt = scan_alphas(f, lc, -2, nullptr).opt;
    std::vector<double> back(f.num_local(), inf);
    for (std::size_t a = 0; a < f.num_local(); ++a) {
        double best = inf;
        if (f.direct_edge(a) >= 0) best = f.node_theta() + f.base_theta(f.direct_edge(a));
        for (int p : f.parents(a)) best = std::min(best, back[p]);
        const int j = f.lifted_at(a);
        if (j >= 0 && !on_path[a]) {
            const double gamma = best + lc[a] - opt;
            lift[a] -= gamma;
            out.value[j] = gamma;
            out.order.push_back(static_cast<std::size_t>(j));
        }
        back[a] = best + lift[a];
    }
    return out;
}

double base_min_marginal(const FlowFactor& f, const FactorOptResult& res, std::size_t j)
{
    double other = 0;
    for (std::size_t k = 0; k < f.num_base(); ++k)
        if (k != j) other = std::min(other, res.alpha[k]);
    return res.alpha[j] - other;
}

std::vector<double> lifted_min_marginals(const FlowFactor& f, const std::vector<std::size_t>& which)
{
    std::vector<double> out;
    if (which.empty()) return out;
    const auto lift = local_lifts(f);
    const FactorOptResult res = optimize(f);
    std::vector<char> on_path(f.num_local(), 0);
    for (int a : optimal_locals(f, res)) on_path[a] = 1;
    std::vector<double> back;
    backward_costs(f, lift, back);
    for (std::size_t j : which) {
        const int a = f.lifted_local(j);
        const double one = back[a] + res.lifted_cost[a] - lift[a];
        const double zero = on_path[a] ? skip_one(f, lift, res.lifted_cost, a) : res.opt;
        out.push_back(one - zero);
    }
    return out;
}

double min_marginal_naive(const FlowFactor& f, std::size_t slot)
{
    // large enough that the surcharged variable decides the optimum
    double big = 1;
    for (std::size_t s = 0; s < f.num_slots(); ++s) big += 2 * std::abs(f.theta(s));
    FlowFactor one = f, zero = f;
    one.add_theta(slot, -big);
    zero.add_theta(slot, big);
    const double forced_one = optimize(one).opt + big;
    const double forced_zero = optimize(zero).opt;
    return forced_one - forced_zero;
}

} // namespace ldp
