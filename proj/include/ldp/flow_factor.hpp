#pragma once

#include "ldp/instance.hpp"

#include <optional>
#include <vector>

namespace ldp {

enum class Direction { in, out };

enum class VarKind { node, base, lifted };

struct Variable {
    VarKind kind;
    std::size_t id;
    bool operator==(const Variable&) const = default;
};

constexpr int kTerminal = -1;

// Outflow factor of v: the node variable z_v, the base edges leaving v (including v->T)
// and the lifted edges leaving v. Feasible labelings are all zeros, or one v-T path whose
// first edge is active and whose nodes u have y'_vu = 1 exactly when vu is lifted.
// The inflow factor is the same construction on the reversed graph with S as terminal.
//
// Variables are addressed by slot: 0 is the node, then the base edges, then the lifted edges.
class FlowFactor {
public:
    FlowFactor() = default;
    FlowFactor(const Instance& inst, NodeId center, Direction dir, int max_frame_gap);

    NodeId center() const { return center_; }
    Direction direction() const { return dir_; }

    std::size_t num_base() const { return base_edge_.size(); }
    std::size_t num_lifted() const { return lifted_edge_.size(); }
    std::size_t num_slots() const { return theta_.size(); }
    std::size_t base_slot(std::size_t j) const { return 1 + j; }
    std::size_t lifted_slot(std::size_t j) const { return 1 + num_base() + j; }
    std::optional<std::size_t> slot_of(Variable var) const;
    Variable variable(std::size_t slot) const;

    double theta(std::size_t slot) const { return theta_[slot]; }
    void set_theta(std::size_t slot, double value);
    void add_theta(std::size_t slot, double delta) { set_theta(slot, theta_[slot] + delta); }
    double node_theta() const { return theta_[0]; }
    double base_theta(std::size_t j) const { return theta_[1 + j]; }
    double lifted_theta(std::size_t j) const { return theta_[1 + num_base() + j]; }

    EdgeId base_edge(std::size_t j) const { return base_edge_[j]; }
    EdgeId lifted_edge(std::size_t j) const { return lifted_edge_[j]; }
    // Local node at the far end of base edge j, or kTerminal.
    int base_target(std::size_t j) const { return base_target_[j]; }
    int lifted_local(std::size_t j) const { return lifted_local_[j]; }

    // Reachable subgraph in topological order away from the center.
    std::size_t num_local() const { return nodes_.size(); }
    NodeId local_node(std::size_t a) const { return nodes_[a]; }
    NodeId terminal() const { return terminal_; }
    const std::vector<int>& children(std::size_t a) const { return children_[a]; }
    const std::vector<int>& parents(std::size_t a) const { return parents_[a]; }
    // Base edge j from the center straight to local node a, or -1.
    int direct_edge(std::size_t a) const { return direct_[a]; }
    // Lifted index of local node a, or -1.
    int lifted_at(std::size_t a) const { return lifted_at_[a]; }

    // Cached factor optimum.
    double opt() const;

private:
    NodeId center_ = 0;
    Direction dir_ = Direction::out;
    NodeId terminal_ = 0;
    std::vector<double> theta_;
    std::vector<EdgeId> base_edge_, lifted_edge_;
    std::vector<int> base_target_, lifted_local_;
    std::vector<NodeId> nodes_;
    std::vector<std::vector<int>> children_, parents_;
    std::vector<int> direct_, lifted_at_;
    mutable std::optional<double> cached_opt_;
};

struct FactorOptResult {
    double opt = 0;
    std::vector<double> lifted_cost;   // per local node
    std::vector<double> alpha;         // per base edge: best cost with that edge active
    std::vector<int> next;             // per local node: best continuation or kTerminal
    int best_edge = -1;                // base index realizing opt, -1 when all zeros is optimal
};

FactorOptResult optimize(const FlowFactor& f);

// Nodes of the optimal path after the center, ending with the terminal sentinel; empty when
// the all-zero labeling is optimal.
std::vector<NodeId> extract_optimal_path(const FlowFactor& f, const FactorOptResult& res);

// gamma_e = alpha_e - min(alpha of the second best edge, 0), per base index.
std::vector<double> all_base_min_marginals(const FlowFactor& f);

// Sequential min-marginals of all lifted edges: each value is the exact min-marginal of the
// factor after all earlier values (in the returned order) have been subtracted.
struct LiftedMarginals {
    std::vector<double> value;        // per lifted index
    std::vector<std::size_t> order;   // lifted indices in the order they were computed
};
LiftedMarginals all_lifted_min_marginals(const FlowFactor& f);

// Exact single-variable min-marginals on the current costs.
double base_min_marginal(const FlowFactor& f, const FactorOptResult& res, std::size_t j);
std::vector<double> lifted_min_marginals(const FlowFactor& f, const std::vector<std::size_t>& which);

// Reference: two surcharged solves of the factor.
double min_marginal_naive(const FlowFactor& f, std::size_t slot);

} // namespace ldp
