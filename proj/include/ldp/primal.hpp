#pragma once

#include "ldp/decomposition.hpp"
#include "ldp/solution.hpp"

#include <optional>
#include <vector>

namespace ldp {

struct McfEdge {
    EdgeId id;
    NodeId tail, head;
    double alpha_out;   // constrained optimum of outflow(tail) with this edge active
    double alpha_in;    // constrained optimum of inflow(head) with this edge active
    double cost() const { return alpha_out + alpha_in; }
};

// Node-split network: u_in -> u_out with capacity 1, S -> u_in, u_out -> T and u_out -> v_in
// for every inner base edge.
struct McfNetwork {
    std::size_t num_nodes = 0;
    std::vector<double> source_cost;   // per node, alpha of the S-edge in inflow(u)
    std::vector<double> sink_cost;     // per node, alpha of the T-edge in outflow(u)
    std::vector<McfEdge> edges;
};

McfNetwork init_mcf(const Decomposition& dec, Execution exec = Execution::parallel);

struct McfResult {
    std::vector<std::vector<NodeId>> paths;
    double cost = 0;
    // optimal duals with pi(S) = pi(T) = 0, per node for u_in and u_out
    std::optional<std::vector<double>> pi_in, pi_out;
};

McfResult solve_mcf(const McfNetwork& net);

// Moves node and inner base edge costs between inflow and outflow factors so that their summed
// optima equal the MCF optimum over the network's costs. This maximizes the lower bound over
// that block of coordinates, so it never lowers it. Returns false if no duals were available.
bool reparametrize_by_mcf(Decomposition& dec, const McfNetwork& net, const McfResult& res);

struct LocalSearchConfig {
    double tau = 0.5;
    int cut_ends_budget = 5;
};

Solution local_search(const Instance& inst, const Solution& sol, const LocalSearchConfig& cfg = {});

// Pieces of local search, exposed for tests.
std::vector<std::vector<NodeId>> split_paths(const Instance& inst, const std::vector<std::vector<NodeId>>& paths);
// Keeps the cheapest of each path, its proper prefixes and suffixes, and dropping it.
std::vector<std::vector<NodeId>> trim_paths(const Instance& inst, const std::vector<std::vector<NodeId>>& paths);
std::vector<std::vector<NodeId>> merge_paths(const Instance& inst, std::vector<std::vector<NodeId>> paths, double tau);
std::vector<std::vector<NodeId>> cut_ends(const Instance& inst, std::vector<std::vector<NodeId>> paths,
                                          double tau, int budget);

} // namespace ldp
