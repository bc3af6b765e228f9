#pragma once

#include "ldp/message_passing.hpp"

namespace ldp {

// Windows of interval_length frames starting at the first frame of the instance. Trajectories
// inside a window's center (at least max_edge_length frames away from both window borders) are
// frozen after the first phase; the second phase reconnects them across window borders.
struct IntervalPlan {
    int interval_length = 0;
    int max_edge_length = 0;
};

// Throws std::invalid_argument unless interval_length >= 3 * max_edge_length >= 3.
void validate_plan(const IntervalPlan& plan);

// Restriction of inst to the given nodes (mapped to 0..k-1 in the order given), keeping edges
// between them and their S/T edges. Lifted edges whose endpoints are no longer connected are dropped.
Instance induced_instance(const Instance& inst, const std::vector<NodeId>& nodes);

Solution solve_intervals(const Instance& inst, const IntervalPlan& plan, const SolverConfig& cfg = {});

} // namespace ldp
