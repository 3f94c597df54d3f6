#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpsim/partitioner.hpp"
#include "cpsim/placement.hpp"

namespace cpsim {

/// One application instance scoped to one topological partition; the
/// vertex unit of the communication graph.
struct AppSlice {
    std::string app_id;
    int partition_id = 0;
    double cpu_demand = 0.0;     // fraction of one server's CPU
    std::int64_t mem_demand = 0; // bytes
};

/// Undirected communication edge. cost_ms is the latency added when the
/// endpoints land on different servers.
struct CommEdge {
    int from = 0;
    int to = 0;
    double cost_ms = 0.0;
};

/// A latency-sensitive event and the ordered edge sequence it traverses.
/// Repeated edges count once per traversal.
struct EventPath {
    std::string event_id;
    std::vector<int> edges; // indices into CommGraph::edges, traversal order
    double weight = 1.0;
    std::optional<double> deadline_ms;
};

class CommGraph {
public:
    CommGraph() = default;
    CommGraph(std::vector<AppSlice> slices, std::vector<CommEdge> edges,
              std::vector<EventPath> events);

    const std::vector<AppSlice>& slices() const { return slices_; }
    const std::vector<CommEdge>& edges() const { return edges_; }
    const std::vector<EventPath>& events() const { return events_; }

    int slice_count() const { return static_cast<int>(slices_.size()); }
    int slice_index(const std::string& app, int partition) const; // -1 when absent
    int find_edge(int u, int v) const;                            // unordered, -1 when absent

    /// Distinct partition / application ids observed in the slice set.
    int num_partitions() const;
    int num_apps() const;

    /// Latency of one event under a placement: the sum of edge costs over
    /// path members whose endpoints sit on different servers.
    double event_cost(const Placement& placement, const EventPath& event) const;

    /// Event-weighted total latency over all events. Zero when every
    /// referenced slice is co-located.
    double weighted_latency(const Placement& placement) const;

    /// Partitioner input: vertices carry (cpu, mem) weight vectors, each
    /// comm edge carries cost scaled by the summed event weight times the
    /// edge's traversal multiplicity. The edge cut of the result under any
    /// assignment equals weighted_latency under the same assignment.
    WeightedGraph to_partition_graph() const;

private:
    void validate() const;
    void check_placement(const Placement& placement) const;

    std::vector<AppSlice> slices_;
    std::vector<CommEdge> edges_;
    std::vector<EventPath> events_;
};

} // namespace cpsim
