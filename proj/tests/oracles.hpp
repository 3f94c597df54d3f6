// Test-only reference implementations, kept deliberately naive and
// independent of the library code paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cpsim/commgraph.hpp"
#include "cpsim/partitioner.hpp"
#include "cpsim/placement.hpp"

namespace oracle {

// Walks the event path edge by edge and sums costs across server
// boundaries; no shared helpers with the production implementation.
inline double event_cost(const cpsim::CommGraph& g, const std::vector<int>& assignment,
                         const cpsim::EventPath& ev) {
    double total = 0.0;
    for (int idx : ev.edges) {
        const auto& e = g.edges()[idx];
        const int sa = assignment[e.from];
        const int sb = assignment[e.to];
        if (sa != sb) total += e.cost_ms;
    }
    return total;
}

inline double weighted_latency(const cpsim::CommGraph& g, const std::vector<int>& assignment) {
    double total = 0.0;
    for (const auto& ev : g.events()) total += ev.weight * event_cost(g, assignment, ev);
    return total;
}

// Calls fn for every assignment of n slices to servers 0..servers-1,
// in lexicographic order.
inline void for_each_assignment(int n, int servers,
                                const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> a(n, 0);
    while (true) {
        fn(a);
        int i = n - 1;
        while (i >= 0 && a[i] == servers - 1) {
            a[i] = 0;
            --i;
        }
        if (i < 0) break;
        ++a[i];
    }
}

struct BestPlacement {
    bool feasible = false;
    std::vector<int> assignment;
    double objective = std::numeric_limits<double>::infinity();
};

// Plain enumeration over all |S|^n assignments. Written before the
// branch-and-bound solver and kept as its oracle.
inline BestPlacement best_placement(const cpsim::CommGraph& g, const cpsim::ServerSpec& spec,
                                    bool enforce_deadlines) {
    BestPlacement best;
    for_each_assignment(g.slice_count(), spec.count, [&](const std::vector<int>& a) {
        std::vector<double> cpu(spec.count, 0.0);
        std::vector<long long> mem(spec.count, 0);
        for (int i = 0; i < g.slice_count(); ++i) {
            cpu[a[i]] += g.slices()[i].cpu_demand;
            mem[a[i]] += g.slices()[i].mem_demand;
        }
        for (int k = 0; k < spec.count; ++k)
            if (cpu[k] > spec.cpu_capacity || mem[k] > spec.mem_capacity) return;
        if (enforce_deadlines) {
            for (const auto& ev : g.events())
                if (ev.deadline_ms && event_cost(g, a, ev) > *ev.deadline_ms) return;
        }
        const double obj = weighted_latency(g, a);
        if (obj < best.objective) {
            best.objective = obj;
            best.assignment = a;
            best.feasible = true;
        }
    });
    return best;
}

inline double cut_weight(const cpsim::WeightedGraph& g, const std::vector<int>& assignment) {
    double cut = 0.0;
    for (const auto& e : g.edges)
        if (assignment[e.u] != assignment[e.v]) cut += e.weight;
    return cut;
}

struct BestCut {
    bool feasible = false;
    double cut = std::numeric_limits<double>::infinity();
};

// Optimal balanced cut by enumeration, for the partitioner oracle.
inline BestCut best_cut(const cpsim::WeightedGraph& g, const cpsim::BalanceSpec& spec) {
    BestCut best;
    for_each_assignment(g.size(), spec.parts, [&](const std::vector<int>& a) {
        std::vector<std::vector<double>> loads(spec.parts,
                                               std::vector<double>(g.num_constraints, 0.0));
        for (int v = 0; v < g.size(); ++v)
            for (int c = 0; c < g.num_constraints; ++c)
                loads[a[v]][c] += g.vertex_weights[v][c];
        for (int p = 0; p < spec.parts; ++p)
            for (int c = 0; c < g.num_constraints; ++c)
                if (loads[p][c] > spec.limit(c)) return;
        const double cut = cut_weight(g, a);
        if (cut < best.cut) {
            best.cut = cut;
            best.feasible = true;
        }
    });
    return best;
}

} // namespace oracle
