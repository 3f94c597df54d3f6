#include "cpsim/commgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "cpsim/errors.hpp"

namespace cpsim {

CommGraph::CommGraph(std::vector<AppSlice> slices, std::vector<CommEdge> edges,
                     std::vector<EventPath> events)
    : slices_(std::move(slices)), edges_(std::move(edges)), events_(std::move(events)) {
    validate();
}

void CommGraph::validate() const {
    std::set<std::pair<std::string, int>> seen;
    for (const auto& s : slices_) {
        if (s.cpu_demand < 0.0)
            throw StructuralError("slice " + s.app_id + " has negative cpu demand");
        if (s.mem_demand < 0)
            throw StructuralError("slice " + s.app_id + " has negative memory demand");
        if (!seen.insert({s.app_id, s.partition_id}).second)
            throw StructuralError("duplicate slice (" + s.app_id + ", partition " +
                                  std::to_string(s.partition_id) + ")");
    }
    const int n = slice_count();
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : edges_) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw StructuralError("edge references unknown slice index");
        if (e.from == e.to)
            throw StructuralError("self edge on slice " + slices_[e.from].app_id);
        if (e.cost_ms < 0.0)
            throw StructuralError("negative edge cost");
        if (!pairs.insert({std::min(e.from, e.to), std::max(e.from, e.to)}).second)
            throw StructuralError("duplicate edge between slices " + std::to_string(e.from) +
                                  " and " + std::to_string(e.to));
    }
    for (const auto& ev : events_) {
        if (ev.weight < 0.0)
            throw StructuralError("event " + ev.event_id + " has negative weight");
        if (ev.deadline_ms && *ev.deadline_ms <= 0.0)
            throw StructuralError("event " + ev.event_id + " has non-positive deadline");
        for (int idx : ev.edges)
            if (idx < 0 || idx >= static_cast<int>(edges_.size()))
                throw StructuralError("event " + ev.event_id + " references unknown edge");
    }
}

int CommGraph::slice_index(const std::string& app, int partition) const {
    for (int i = 0; i < slice_count(); ++i)
        if (slices_[i].app_id == app && slices_[i].partition_id == partition) return i;
    return -1;
}

int CommGraph::find_edge(int u, int v) const {
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        const auto& e = edges_[i];
        if ((e.from == u && e.to == v) || (e.from == v && e.to == u)) return i;
    }
    return -1;
}

int CommGraph::num_partitions() const {
    std::set<int> ids;
    for (const auto& s : slices_) ids.insert(s.partition_id);
    return static_cast<int>(ids.size());
}

int CommGraph::num_apps() const {
    std::set<std::string> ids;
    for (const auto& s : slices_) ids.insert(s.app_id);
    return static_cast<int>(ids.size());
}

void CommGraph::check_placement(const Placement& placement) const {
    if (placement.size() != slice_count())
        throw StructuralError("placement covers " + std::to_string(placement.size()) +
                              " slices, graph has " + std::to_string(slice_count()));
}

double CommGraph::event_cost(const Placement& placement, const EventPath& event) const {
    check_placement(placement);
    double cost = 0.0;
    for (int idx : event.edges) {
        const auto& e = edges_[idx];
        if (placement.assignment[e.from] != placement.assignment[e.to]) cost += e.cost_ms;
    }
    return cost;
}

double CommGraph::weighted_latency(const Placement& placement) const {
    check_placement(placement);
    double total = 0.0;
    for (const auto& ev : events_) total += ev.weight * event_cost(placement, ev);
    return total;
}

WeightedGraph CommGraph::to_partition_graph() const {
    // alpha per comm edge: sum of event weight times traversal multiplicity
    std::vector<double> alpha(edges_.size(), 0.0);
    for (const auto& ev : events_)
        for (int idx : ev.edges) alpha[idx] += ev.weight;

    WeightedGraph g;
    g.num_constraints = 2;
    g.vertex_weights.reserve(slices_.size());
    for (const auto& s : slices_)
        g.vertex_weights.push_back({s.cpu_demand, static_cast<double>(s.mem_demand)});
    g.edges.reserve(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i)
        g.edges.push_back({edges_[i].from, edges_[i].to, alpha[i] * edges_[i].cost_ms});
    return g;
}

} // namespace cpsim
