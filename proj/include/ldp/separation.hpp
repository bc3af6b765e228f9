#pragma once

#include "ldp/decomposition.hpp"

#include <variant>
#include <vector>

namespace ldp {

// Reparametrization that the flow factors can hand to new path and cut factors.
// base[e] = base_out[e] + base_in[e], likewise for lifted edges. Only inner edges are filled.
struct SeparationCosts {
    std::vector<double> base, base_out, base_in;
    std::vector<double> lifted, lifted_out, lifted_in;
};

// Half of the sequential lifted min-marginals, then the base min-marginals of the remainder,
// from both flow factors of every node. Factors are left untouched.
SeparationCosts extract_separation_costs(const Decomposition& dec, Execution exec = Execution::parallel);

enum class CandidateKind { path, cut };

struct SeparationCandidate {
    CandidateKind kind;
    std::variant<PathFactor, CutFactor> factor;
    double priority;
};

std::vector<SeparationCandidate> separate_paths(const SeparationCosts& costs, const Instance& inst, double eps,
                                                std::size_t limit);
std::vector<SeparationCandidate> separate_cuts(const SeparationCosts& costs, const Instance& inst, double eps,
                                               std::size_t limit);

// Installs the candidates that are not already present and moves the separation costs of their
// edges out of the flow factors, split equally among the new factors sharing an edge.
// Returns the number of installed factors.
std::size_t install_candidates(Decomposition& dec, const SeparationCosts& costs,
                               const std::vector<SeparationCandidate>& candidates);

// Both separations, merged by priority and cut to `limit`.
std::vector<SeparationCandidate> separate(const SeparationCosts& costs, const Instance& inst, double eps,
                                          std::size_t limit);

} // namespace ldp
