#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldp {

using NodeId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
    NodeId tail;
    NodeId head;
    double cost;
};

// Thrown for malformed input and for instances violating the graph invariants.
// line is 0 when the problem is not tied to a line of a file.
class InstanceError : public std::runtime_error {
public:
    InstanceError(const std::string& what, std::size_t line = 0);
    std::size_t line() const { return line_; }

    // Position of the offending edge in the input lists handed to Instance::build, if any.
    struct EdgeRef { bool lifted; std::size_t index; };
    std::optional<EdgeRef> edge;
    std::string message;

private:
    std::size_t line_;
};

// Flow graph G over inner nodes 0..n-1 plus sentinels source() = n and sink() = n+1,
// and the lifted graph G' over inner nodes. Immutable once built.
class Instance {
public:
    Instance() = default;

    // Validates and normalizes: S/T edges merged, missing ones added with cost 0.
    static Instance build(std::vector<int> frames, std::vector<double> node_costs,
                          std::vector<Edge> base, std::vector<Edge> lifted);

    std::size_t num_nodes() const { return frames_.size(); }
    NodeId source() const { return num_nodes(); }
    NodeId sink() const { return num_nodes() + 1; }
    bool is_inner(NodeId v) const { return v < num_nodes(); }

    int frame(NodeId v) const { return frames_[v]; }
    double node_cost(NodeId v) const { return node_costs_[v]; }
    int min_frame() const { return min_frame_; }
    int max_frame() const { return max_frame_; }
    // Largest frame difference spanned by a base or lifted edge between inner nodes (at least 1).
    int max_edge_gap() const { return max_edge_gap_; }

    const std::vector<Edge>& base_edges() const { return base_; }
    const std::vector<Edge>& lifted_edges() const { return lifted_; }
    const Edge& base(EdgeId e) const { return base_[e]; }
    const Edge& lifted(EdgeId e) const { return lifted_[e]; }

    // Adjacency lists hold edge ids sorted by the opposite endpoint. Valid for S and T too.
    std::span<const EdgeId> out_base(NodeId v) const { return out_base_[v]; }
    std::span<const EdgeId> in_base(NodeId v) const { return in_base_[v]; }
    std::span<const EdgeId> out_lifted(NodeId v) const { return out_lifted_[v]; }
    std::span<const EdgeId> in_lifted(NodeId v) const { return in_lifted_[v]; }

    std::optional<EdgeId> find_base(NodeId tail, NodeId head) const;
    std::optional<EdgeId> find_lifted(NodeId tail, NodeId head) const;
    EdgeId source_edge(NodeId v) const { return source_edge_[v]; }
    EdgeId sink_edge(NodeId v) const { return sink_edge_[v]; }

    // Inner nodes sorted by (frame, id).
    const std::vector<NodeId>& order() const { return order_; }

    bool operator==(const Instance&) const;

private:
    std::vector<int> frames_;
    std::vector<double> node_costs_;
    std::vector<Edge> base_;
    std::vector<Edge> lifted_;
    std::vector<std::vector<EdgeId>> out_base_, in_base_, out_lifted_, in_lifted_;
    std::vector<EdgeId> source_edge_, sink_edge_;
    std::vector<NodeId> order_;
    int min_frame_ = 0, max_frame_ = 0, max_edge_gap_ = 1;
};

Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);
Instance parse_instance(const std::string& text);
void save_instance(const Instance& inst, std::ostream& out);
std::string format_instance(const Instance& inst);

// R_G restricted to pairs whose frame difference is at most max_frame_gap.
// Stored as one bitset per node over the window of nodes (in frame order) it can reach.
class Reachability {
public:
    Reachability() = default;
    Reachability(const Instance& inst, int max_frame_gap);

    bool operator()(NodeId v, NodeId w) const;
    int max_frame_gap() const { return gap_; }

private:
    std::size_t n_ = 0;
    int gap_ = 1;
    std::vector<std::size_t> pos_;      // node -> position in frame order
    std::vector<std::size_t> window_;   // node -> number of positions covered
    std::vector<std::vector<std::uint64_t>> bits_;
};

Reachability compute_reachability(const Instance& inst, int max_frame_gap);
// Reachability without a frame bound.
Reachability full_reachability(const Instance& inst);

// E_0: base edges between inner nodes that are the only path between their endpoints.
class StrongBaseEdges {
public:
    StrongBaseEdges() = default;
    explicit StrongBaseEdges(std::vector<bool> members) : members_(std::move(members)) {}
    bool contains(EdgeId e) const { return e < members_.size() && members_[e]; }
    std::size_t size() const;

private:
    std::vector<bool> members_;
};

StrongBaseEdges compute_strong_edges(const Instance& inst);
StrongBaseEdges compute_strong_edges(const Instance& inst, const Reachability& full);

struct GeneratorConfig {
    int frames = 4;
    int detections_per_frame = 3;
    int trajectories = 2;
    double noise = 0.1;
    std::uint64_t seed = 1;
    int max_frame_gap = 2;
};

struct GeneratedInstance {
    Instance instance;
    std::vector<std::vector<NodeId>> trajectories;
};

// Planted trajectories get negative base and lifted costs, every other pair positive costs,
// each perturbed by uniform noise in [-noise, noise].
GeneratedInstance generate_instance(const GeneratorConfig& cfg);
GeneratedInstance generate_instance(int frames, int detections_per_frame, int trajectories,
                                    double noise, std::uint64_t seed);

} // namespace ldp
