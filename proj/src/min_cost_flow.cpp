#include "ldp/min_cost_flow.hpp"

#include <cassert>
#include <deque>
#include <limits>
#include <queue>

namespace ldp {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double tiny = 1e-12;
constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
} // namespace

MinCostFlow::MinCostFlow(std::size_t num_nodes) : head_(num_nodes) {}

std::size_t MinCostFlow::add_node()
{
    head_.emplace_back();
    return head_.size() - 1;
}

std::size_t MinCostFlow::add_arc(std::size_t from, std::size_t to, int capacity, double cost)
{
    assert(from < head_.size() && to < head_.size());
    head_[from].push_back(arcs_.size());
    arcs_.push_back({to, capacity, cost});
    head_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0, -cost});
    return arcs_.size() / 2 - 1;
}

// First round: label correcting on raw costs. Later rounds: Dijkstra on reduced costs.
bool MinCostFlow::shortest_paths(std::size_t source, std::vector<double>& dist, std::vector<std::size_t>& via)
{
    const std::size_t n = head_.size();
    dist.assign(n, inf);
    via.assign(n, none);
    dist[source] = 0;
    if (pot_.empty()) {
        std::deque<std::size_t> queue{source};
        std::vector<char> queued(n, 0);
        queued[source] = 1;
        while (!queue.empty()) {
            std::size_t x = queue.front();
            queue.pop_front();
            queued[x] = 0;
            for (std::size_t a : head_[x]) {
                const Arc& arc = arcs_[a];
                if (arc.cap <= 0) continue;
                const double d = dist[x] + arc.cost;
                if (d < dist[arc.to] - tiny) {
                    dist[arc.to] = d;
                    via[arc.to] = a;
                    if (!queued[arc.to]) { queued[arc.to] = 1; queue.push_back(arc.to); }
                }
            }
        }
        pot_.assign(n, 0.0);
        for (std::size_t x = 0; x < n; ++x)
            if (dist[x] < inf) pot_[x] = dist[x];
        return true;
    }
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<double> red(n, inf);
    red[source] = 0;
    heap.push({0.0, source});
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (done[x]) continue;
        done[x] = 1;
        for (std::size_t a : head_[x]) {
            const Arc& arc = arcs_[a];
            if (arc.cap <= 0 || done[arc.to]) continue;
            // reduced costs can dip below zero by rounding only
            const double rc = std::max(0.0, arc.cost + pot_[x] - pot_[arc.to]);
            if (d + rc < red[arc.to] - tiny) {
                red[arc.to] = d + rc;
                via[arc.to] = a;
                heap.push({red[arc.to], arc.to});
            }
        }
    }
    for (std::size_t x = 0; x < n; ++x)
        if (red[x] < inf) dist[x] = red[x] - pot_[source] + pot_[x];
    // nodes not reached keep their old potential plus the largest settled distance,
    // which keeps reduced costs into them non-negative
    double shift = 0;
    for (std::size_t x = 0; x < n; ++x)
        if (red[x] < inf) shift = std::max(shift, red[x]);
    for (std::size_t x = 0; x < n; ++x) pot_[x] += red[x] < inf ? red[x] : shift;
    return true;
}

double MinCostFlow::solve(std::size_t source, std::size_t sink)
{
    source_ = source;
    sink_ = sink;
    pot_.clear();
    double total = 0;
    std::vector<double> dist;
    std::vector<std::size_t> via;
    while (true) {
        shortest_paths(source, dist, via);
        if (!(dist[sink] < -tiny)) break;
        int bottleneck = std::numeric_limits<int>::max();
        for (std::size_t x = sink; x != source; x = arcs_[via[x] ^ 1].to)
            bottleneck = std::min(bottleneck, arcs_[via[x]].cap);
        for (std::size_t x = sink; x != source; x = arcs_[via[x] ^ 1].to) {
            arcs_[via[x]].cap -= bottleneck;
            arcs_[via[x] ^ 1].cap += bottleneck;
        }
        total += bottleneck * dist[sink];
        flow_value_ += bottleneck;
    }
    solved_ = true;
    return total;
}

std::optional<std::vector<double>> MinCostFlow::potentials() const
{
    assert(solved_);
    // Bellman-Ford from the source on the residual graph extended by zero-cost arcs s->t and t->s;
    // at a free-flow optimum it has no negative cycle, which forces pi(t) = pi(s).
    const std::size_t n = head_.size();
    std::vector<double> dist(n, inf);
    dist[source_] = 0;
    std::deque<std::size_t> queue{source_};
    std::vector<char> queued(n, 0);
    std::vector<std::size_t> relaxations(n, 0);
    queued[source_] = 1;
    auto relax = [&](std::size_t to, double d) {
        if (d < dist[to] - tiny) {
            dist[to] = d;
            if (!queued[to]) { queued[to] = 1; queue.push_back(to); }
            return ++relaxations[to] <= n + 2;
        }
        return true;
    };
    while (!queue.empty()) {
        std::size_t x = queue.front();
        queue.pop_front();
        queued[x] = 0;
        for (std::size_t a : head_[x]) {
            const Arc& arc = arcs_[a];
            if (arc.cap > 0 && !relax(arc.to, dist[x] + arc.cost)) return std::nullopt;
        }
        if (x == source_ && !relax(sink_, dist[x])) return std::nullopt;
        if (x == sink_ && !relax(source_, dist[x])) return std::nullopt;
    }
    const double base = dist[source_];
    for (double& d : dist) {
        if (d == inf) return std::nullopt;
        d -= base;
    }
    return dist;
}

} // namespace ldp
