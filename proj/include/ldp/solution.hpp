#pragma once

#include "ldp/instance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ldp {

// Node-disjoint paths with the induced edge, lifted and node indicators.
struct Solution {
    std::vector<std::vector<NodeId>> paths;
    std::vector<bool> base_active;
    std::vector<bool> lifted_active;
    std::vector<bool> node_active;
    double objective = 0;
};

// Cost of a single path S -> nodes -> T under the original costs.
double path_cost(const Instance& inst, const std::vector<NodeId>& nodes);

// Completes indicators and objective from the paths. Paths must be node-disjoint and
// consecutive nodes joined by base edges.
Solution adjust_lifted(const Instance& inst, const std::vector<std::vector<NodeId>>& paths);

// Empty if all solution invariants hold, otherwise a description of the first violation.
std::optional<std::string> validate_solution(const Instance& inst, const Solution& sol);

} // namespace ldp
