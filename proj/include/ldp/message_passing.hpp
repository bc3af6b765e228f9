#pragma once

#include "ldp/decomposition.hpp"
#include "ldp/primal.hpp"
#include "ldp/solution.hpp"

#include <string>
#include <vector>

namespace ldp {

struct SolverConfig {
    int max_iter = 51;
    int sep_interval = 20;       // k
    int primal_interval = 5;     // l
    double sep_epsilon = 1e-4;
    double max_new_factor_ratio = 0.5;
    double damping = 1.0;        // scales every message
    double gap_tolerance = 1e-9;  // negative: never stop early
    double tau = 0.5;
    int cut_ends_budget = 5;
    bool verbose = false;
    Execution exec = Execution::parallel;
};

// Throws std::invalid_argument when a field is out of range.
void validate_config(const SolverConfig& cfg);

struct IterationRecord {
    int iter;
    double lower_bound;
    double best_primal;
    double elapsed;   // seconds since start
    std::size_t factors;
};

struct SolverReport {
    std::vector<IterationRecord> iterations;
    Solution solution;
    double lower_bound = 0;
    double gap = 0;
};

void flow_factor_pass(Decomposition& dec, NodeId v, Direction dir, double damping = 1.0);
void path_factor_pass(Decomposition& dec, std::size_t path, double damping = 1.0);
void cut_factor_pass(Decomposition& dec, std::size_t cut, double damping = 1.0);

// One forward and one backward sweep over all factors.
void message_passing_iteration(Decomposition& dec, double damping = 1.0);

// MCF rounding and local search. The flow duals are written into the flow factors only when
// the resulting bound certifies the returned solution.
Solution primal_round(Decomposition& dec, const SolverConfig& cfg);

SolverReport run(const Instance& inst, const SolverConfig& cfg = {});

// Deterministic text form of a report (no timings).
std::string format_report(const SolverReport& rep);
// Solution lines: `objective <value>` then one line of node ids per path.
std::string format_solution(const Solution& sol);

} // namespace ldp
