#include "cpsim/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpsim/commgraph.hpp"
#include "cpsim/errors.hpp"

namespace cpsim {

std::string FeasibilityReport::describe() const {
    std::ostringstream os;
    os << "cpu " << (cpu_ok ? "ok" : "violated") << ", mem " << (mem_ok ? "ok" : "violated")
       << ", deadlines " << (deadlines_ok ? "ok" : "violated");
    if (!violated_events.empty()) {
        os << " (";
        for (std::size_t i = 0; i < violated_events.size(); ++i)
            os << (i ? ", " : "") << violated_events[i];
        os << ")";
    }
    return os.str();
}

FeasibilityReport check_feasibility(const CommGraph& graph, const ServerSpec& spec,
                                    const Placement& placement) {
    if (placement.size() != graph.slice_count())
        throw StructuralError("placement length " + std::to_string(placement.size()) +
                              " does not match slice count " +
                              std::to_string(graph.slice_count()));

    FeasibilityReport report;
    report.per_server_cpu.assign(spec.count, 0.0);
    report.per_server_mem.assign(spec.count, 0);
    for (int i = 0; i < graph.slice_count(); ++i) {
        const int k = placement.assignment[i];
        if (k < 0 || k >= spec.count)
            throw StructuralError("slice " + graph.slices()[i].app_id +
                                  " assigned to out-of-range server " + std::to_string(k));
        report.per_server_cpu[k] += graph.slices()[i].cpu_demand;
        report.per_server_mem[k] += graph.slices()[i].mem_demand;
    }
    for (int k = 0; k < spec.count; ++k) {
        if (report.per_server_cpu[k] > spec.cpu_capacity) report.cpu_ok = false;
        if (report.per_server_mem[k] > spec.mem_capacity) report.mem_ok = false;
    }
    for (const auto& ev : graph.events()) {
        if (!ev.deadline_ms) continue;
        if (graph.event_cost(placement, ev) > *ev.deadline_ms)
            report.violated_events.push_back(ev.event_id);
    }
    report.deadlines_ok = report.violated_events.empty();
    return report;
}

double objective(const CommGraph& graph, const Placement& placement) {
    return graph.weighted_latency(placement);
}

namespace {

struct ExactSearch {
    const CommGraph& graph;
    const ServerSpec& spec;
    bool enforce_deadlines;

    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj; // slice -> (peer, cost)
    // per-event list of (edge endpoints) for incremental deadline tracking
    std::vector<const EventPath*> deadline_events;

    std::vector<int> current;
    std::vector<double> cpu_load;
    std::vector<std::int64_t> mem_load;
    double best_cost = std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<int> best;
    std::uint64_t nodes = 0;

    explicit ExactSearch(const CommGraph& g, const ServerSpec& s, bool deadlines)
        : graph(g), spec(s), enforce_deadlines(deadlines) {
        n = g.slice_count();
        adj.assign(n, {});
        // The objective is the event-weighted cut, so branch on the
        // partition-graph weights (alpha * d), not the raw edge costs.
        for (const auto& e : g.to_partition_graph().edges) {
            adj[e.u].push_back({e.v, e.weight});
            adj[e.v].push_back({e.u, e.weight});
        }
        for (const auto& ev : g.events())
            if (ev.deadline_ms) deadline_events.push_back(&ev);
        current.assign(n, -1);
        cpu_load.assign(spec.count, 0.0);
        mem_load.assign(spec.count, 0);
    }

    bool deadlines_hold_partial() const {
        // Path cost only grows as more slices get assigned, so a violated
        // prefix can be pruned outright.
        for (const auto* ev : deadline_events) {
            double cost = 0.0;
            for (int idx : ev->edges) {
                const auto& e = graph.edges()[idx];
                if (current[e.from] >= 0 && current[e.to] >= 0 &&
                    current[e.from] != current[e.to])
                    cost += e.cost_ms;
            }
            if (cost > *ev->deadline_ms) return false;
        }
        return true;
    }

    void dfs(int slice, double cut_so_far, int servers_used) {
        ++nodes;
        if (cut_so_far >= best_cost) return;
        if (slice == n) {
            if (enforce_deadlines && !deadlines_hold_partial()) return;
            best_cost = cut_so_far;
            best = current;
            found = true;
            return;
        }
        const auto& sl = graph.slices()[slice];
        // Canonical form: a fresh server may only be the next unused index,
        // which both breaks label symmetry and makes the lexicographically
        // smallest optimum the first one found.
        const int limit = std::min(spec.count, servers_used + 1);
        for (int k = 0; k < limit; ++k) {
            if (cpu_load[k] + sl.cpu_demand > spec.cpu_capacity) continue;
            if (mem_load[k] + sl.mem_demand > spec.mem_capacity) continue;
            double added = 0.0;
            for (const auto& [peer, cost] : adj[slice])
                if (current[peer] >= 0 && current[peer] != k) added += cost;
            if (cut_so_far + added >= best_cost) continue;
            current[slice] = k;
            cpu_load[k] += sl.cpu_demand;
            mem_load[k] += sl.mem_demand;
            if (!enforce_deadlines || deadlines_hold_partial())
                dfs(slice + 1, cut_so_far + added, std::max(servers_used, k + 1));
            cpu_load[k] -= sl.cpu_demand;
            mem_load[k] -= sl.mem_demand;
            current[slice] = -1;
        }
    }
};

} // namespace

ExactSolveResult solve_exact(const CommGraph& graph, const ServerSpec& spec,
                             bool enforce_deadlines, int exact_ceiling) {
    if (graph.slice_count() > exact_ceiling)
        throw StructuralError("exact solve refused: " + std::to_string(graph.slice_count()) +
                              " slices exceed the ceiling of " + std::to_string(exact_ceiling));
    ExactSearch search(graph, spec, enforce_deadlines);
    search.dfs(0, 0.0, 0);

    ExactSolveResult result;
    result.nodes_explored = search.nodes;
    result.feasible = search.found;
    if (search.found) {
        result.placement.assignment = search.best;
        // Report through the shared objective definition rather than the
        // incremental bound accumulator.
        result.objective_ms = graph.weighted_latency(result.placement);
    }
    return result;
}

} // namespace cpsim
