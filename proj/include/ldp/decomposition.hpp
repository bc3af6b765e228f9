#pragma once

#include "ldp/cut_factor.hpp"
#include "ldp/flow_factor.hpp"
#include "ldp/instance.hpp"
#include "ldp/path_factor.hpp"

#include <optional>
#include <set>
#include <vector>

namespace ldp {

enum class FactorKind { inflow, outflow, path, cut };

// One cost share of an original variable: factor kind, factor index, slot inside the factor.
struct Site {
    FactorKind kind;
    std::size_t factor;
    std::size_t slot;
    bool operator==(const Site&) const = default;
};

enum class Execution { serial, parallel };

// Lagrange decomposition into inflow/outflow factors per node plus separated path and cut factors.
// Holds a reference to the instance, which must outlive it.
class Decomposition {
public:
    // Initial split: node costs, inner base and lifted edges half/half between the outflow
    // factor of the tail and the inflow factor of the head; S-edges to the inflow factor,
    // T-edges to the outflow factor.
    explicit Decomposition(const Instance& inst);

    const Instance& instance() const { return *inst_; }
    std::size_t num_nodes() const { return inflow_.size(); }

    const FlowFactor& inflow(NodeId v) const { return inflow_[v]; }
    const FlowFactor& outflow(NodeId v) const { return outflow_[v]; }
    const FlowFactor& flow(Direction d, NodeId v) const { return d == Direction::in ? inflow_[v] : outflow_[v]; }
    const std::vector<PathFactor>& paths() const { return paths_; }
    const std::vector<CutFactor>& cuts() const { return cuts_; }
    std::size_t num_factors() const { return 2 * inflow_.size() + paths_.size() + cuts_.size(); }

    double theta(Site s) const;
    void add_theta(Site s, double delta);
    Variable variable(Site s) const;

    // Copies held by flow factors (absent for the missing side of S/T edges).
    std::optional<Site> out_site(Variable var) const;
    std::optional<Site> in_site(Variable var) const;
    // Copies held by path and cut factors.
    const std::vector<Site>& extra_sites(Variable var) const;
    // All sites of a variable.
    std::vector<Site> sites(Variable var) const;

    // Registers a new factor with all thetas zero. Returns false if an identical one exists.
    bool add_path(PathFactor f);
    bool add_cut(CutFactor f);
    bool has_path(const PathFactor& f) const { return path_keys_.count(f.key()) > 0; }
    bool has_cut(const CutFactor& f) const { return cut_keys_.count(f.key()) > 0; }

    double original_cost(Variable var) const;
    // Largest deviation between the summed shares and the original cost over all variables.
    double conservation_residual() const;

private:
    std::vector<Site>& extra(Variable var);

    const Instance* inst_;
    std::vector<FlowFactor> inflow_, outflow_;
    std::vector<PathFactor> paths_;
    std::vector<CutFactor> cuts_;
    // flow-factor slot of each edge on the tail (out) and head (in) side; npos if none
    std::vector<std::size_t> base_out_slot_, base_in_slot_, lifted_out_slot_, lifted_in_slot_;
    std::vector<std::vector<Site>> base_extra_, lifted_extra_;
    std::set<std::vector<std::pair<int, std::size_t>>> path_keys_, cut_keys_;
};

struct DualReport {
    double lower_bound = 0;
    // inflow factors, outflow factors, path factors, cut factors, in that order
    std::vector<double> per_factor;
};

DualReport lower_bound(const Decomposition& dec, Execution exec = Execution::parallel);
DualReport lower_bound_serial(const Decomposition& dec);

// Moves `amount` from one copy of a variable to another.
void apply_message(Decomposition& dec, Site from, Site to, double amount);

} // namespace ldp
