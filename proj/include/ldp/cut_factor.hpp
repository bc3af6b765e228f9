#pragma once

#include "ldp/flow_factor.hpp"

#include <vector>

namespace ldp {

struct CutEdge {
    EdgeId id;
    NodeId tail, head;   // tail on the u side, head on the v side
};

// A lifted edge uv with a uv-cut C of base edges. Constraints: y'_uv <= sum of y over C,
// at most one active cut edge per tail and per head, and y'_uv >= y_uv when uv itself is in C.
// Slots 0..|C|-1 are the cut edges, slot |C| the lifted edge.
class CutFactor {
public:
    CutFactor() = default;
    CutFactor(EdgeId lifted, NodeId u, NodeId v, std::vector<CutEdge> cut);

    EdgeId lifted_edge() const { return lifted_; }
    NodeId u() const { return u_; }
    NodeId v() const { return v_; }
    std::size_t num_cut() const { return cut_.size(); }
    const CutEdge& cut_edge(std::size_t k) const { return cut_[k]; }
    const std::vector<CutEdge>& cut_edges() const { return cut_; }
    std::size_t lifted_slot() const { return cut_.size(); }
    std::size_t num_slots() const { return cut_.size() + 1; }
    // Index of the base edge uv within C, or -1.
    int uv_index() const { return uv_index_; }

    Variable variable(std::size_t slot) const;
    std::optional<std::size_t> slot_of(Variable var) const;
    double theta(std::size_t slot) const { return theta_[slot]; }
    const std::vector<double>& thetas() const { return theta_; }
    void set_theta(std::size_t slot, double value) { theta_[slot] = value; cached_opt_.reset(); }
    void add_theta(std::size_t slot, double delta) { set_theta(slot, theta_[slot] + delta); }

    double opt() const;
    std::vector<std::pair<int, std::size_t>> key() const;

private:
    EdgeId lifted_ = 0;
    NodeId u_ = 0, v_ = 0;
    std::vector<CutEdge> cut_;
    std::vector<double> theta_;
    int uv_index_ = -1;
    mutable std::optional<double> cached_opt_;
};

struct MatchingEntry {
    std::size_t row, col;
    double cost;
};

struct MatchingResult {
    std::vector<std::size_t> chosen;   // indices into the entry list
    double value = 0;
};

// Minimum-cost partial matching: every row and column used at most once.
MatchingResult solve_partial_matching(const std::vector<MatchingEntry>& entries);

double optimize_cut(const CutFactor& f, const std::vector<double>& theta);
double optimize_cut(const CutFactor& f);
// An optimal labeling over the slots.
std::vector<bool> optimal_cut_labeling(const CutFactor& f);
double cut_min_marginal(const CutFactor& f, std::size_t slot);
std::vector<double> cut_min_marginals(const CutFactor& f);

} // namespace ldp
