#pragma once

#include "ldp/cut_factor.hpp"
#include "ldp/flow_factor.hpp"
#include "ldp/path_factor.hpp"
#include "ldp/solution.hpp"

#include <stdexcept>
#include <vector>

namespace ldp {

// Exhaustive reference solvers for tiny problems. They throw std::length_error past their size limits.

// Optimal LDP solution by enumerating all disjoint path sets (at most 14 inner nodes).
Solution exact_ldp(const Instance& inst);

struct Labeling {
    std::vector<bool> y;   // over factor slots
    double value;
};

// Zero labeling plus one labeling per path from the center to the terminal (at most 10 reachable nodes).
std::vector<Labeling> enumerate_flow_factor(const Instance& inst, const FlowFactor& f);
// All feasible labelings (at most 16 variables).
std::vector<Labeling> enumerate_path_factor(const PathFactor& f);
std::vector<Labeling> enumerate_cut_factor(const CutFactor& f);

bool path_labeling_feasible(const PathFactor& f, const std::vector<bool>& y);
bool cut_labeling_feasible(const CutFactor& f, const std::vector<bool>& y);

} // namespace ldp
