#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ldp {

// Successive shortest paths with node potentials. The flow value is free: augmentation stops
// as soon as the cheapest augmenting path is no longer negative.
class MinCostFlow {
public:
    explicit MinCostFlow(std::size_t num_nodes = 0);

    std::size_t add_node();
    // Returns the arc id. Reverse residual arcs are managed internally.
    std::size_t add_arc(std::size_t from, std::size_t to, int capacity, double cost);

    std::size_t num_nodes() const { return head_.size(); }
    std::size_t num_arcs() const { return arcs_.size() / 2; }

    // Returns total cost of the flow sent.
    double solve(std::size_t source, std::size_t sink);

    int flow(std::size_t arc) const { return arcs_[2 * arc + 1].cap; }
    double cost(std::size_t arc) const { return arcs_[2 * arc].cost; }
    std::size_t tail(std::size_t arc) const { return arcs_[2 * arc + 1].to; }
    std::size_t head(std::size_t arc) const { return arcs_[2 * arc].to; }
    int flow_value() const { return flow_value_; }

    // Optimal dual potentials of the free-flow problem, normalized so that
    // pi(source) = pi(sink) = 0: every residual arc a = (x,y) satisfies cost(a) + pi(x) - pi(y) >= 0.
    // Requires a prior solve(); empty if the label-correcting pass does not settle.
    std::optional<std::vector<double>> potentials() const;

private:
    struct Arc {
        std::size_t to;
        int cap;
        double cost;
    };
    bool shortest_paths(std::size_t source, std::vector<double>& dist, std::vector<std::size_t>& via);

    std::vector<Arc> arcs_;
    std::vector<std::vector<std::size_t>> head_;
    std::vector<double> pot_;
    std::size_t source_ = 0, sink_ = 0;
    int flow_value_ = 0;
    bool solved_ = false;
};

} // namespace ldp
