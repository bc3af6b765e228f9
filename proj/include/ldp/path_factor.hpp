#pragma once

#include "ldp/flow_factor.hpp"

#include <vector>

namespace ldp {

struct PathEdge {
    Variable var;        // base or lifted edge
    NodeId tail, head;
    bool constrained;    // lifted, or strong base edge
};

// A directed v-w path together with one closing edge v->w. Each constrained edge may only be
// inactive if some other edge of the factor is inactive too.
// The closing edge is normally lifted; it can be a base edge when the factor was found with the
// positive lifted edge on the path.
class PathFactor {
public:
    PathFactor() = default;
    // path must be contiguous from closing.tail to closing.head
    PathFactor(std::vector<PathEdge> path, PathEdge closing);

    NodeId from() const { return edges_.back().tail; }
    NodeId to() const { return edges_.back().head; }
    std::size_t size() const { return edges_.size(); }
    // Slots 0..size()-2 are the path in order, slot size()-1 is the closing edge.
    const PathEdge& edge(std::size_t slot) const { return edges_[slot]; }
    std::size_t closing_slot() const { return edges_.size() - 1; }
    const std::vector<PathEdge>& edges() const { return edges_; }

    double theta(std::size_t slot) const { return theta_[slot]; }
    const std::vector<double>& thetas() const { return theta_; }
    void set_theta(std::size_t slot, double value) { theta_[slot] = value; cached_opt_.reset(); }
    void add_theta(std::size_t slot, double delta) { set_theta(slot, theta_[slot] + delta); }
    std::optional<std::size_t> slot_of(Variable var) const;

    double opt() const;

    // Order-independent identity used to suppress duplicates.
    std::vector<std::pair<int, std::size_t>> key() const;

private:
    std::vector<PathEdge> edges_;
    std::vector<double> theta_;
    mutable std::optional<double> cached_opt_;
};

double optimize_path(const std::vector<double>& theta, const std::vector<bool>& constrained);
double optimize_path(const PathFactor& f);
// An optimal labeling (1 = active) consistent with optimize_path.
std::vector<bool> optimal_path_labeling(const PathFactor& f);
double path_min_marginal(const PathFactor& f, std::size_t slot);
std::vector<double> path_min_marginals(const PathFactor& f);

} // namespace ldp
