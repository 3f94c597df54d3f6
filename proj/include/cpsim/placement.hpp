#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cpsim {

class CommGraph;

/// Homogeneous pool of controller servers. CPU capacity is a fraction of
/// one machine (1.0 = one core fully available), memory is bytes.
struct ServerSpec {
    int count = 1;
    double cpu_capacity = 1.0;
    std::int64_t mem_capacity = 0;
};

/// Assignment vector: slice index -> server index in [0, count).
struct Placement {
    std::vector<int> assignment;

    int size() const { return static_cast<int>(assignment.size()); }
    int server_of(int slice) const { return assignment[slice]; }
};

struct FeasibilityReport {
    bool cpu_ok = true;
    bool mem_ok = true;
    bool deadlines_ok = true;
    std::vector<double> per_server_cpu;
    std::vector<std::int64_t> per_server_mem;
    std::vector<std::string> violated_events;

    bool ok() const { return cpu_ok && mem_ok && deadlines_ok; }
    std::string describe() const;
};

/// Capacity sums per server plus per-event deadline checks against the
/// placement-dependent path latency.
FeasibilityReport check_feasibility(const CommGraph& graph, const ServerSpec& spec,
                                    const Placement& placement);

struct ExactSolveResult {
    bool feasible = false;
    Placement placement;
    double objective_ms = 0.0;
    std::uint64_t nodes_explored = 0;
};

/// Branch-and-bound search over assignment prefixes, pruning on the
/// accumulated cut cost (admissible: extending a prefix never uncuts an
/// edge). Server labels are canonicalized (lowest index used first) and
/// ties resolve to the lexicographically smallest assignment. Intended as
/// the small-instance oracle; refuses instances above `exact_ceiling`.
ExactSolveResult solve_exact(const CommGraph& graph, const ServerSpec& spec,
                             bool enforce_deadlines = false, int exact_ceiling = 14);

/// Placement objective: alias for CommGraph::weighted_latency so the
/// solver and the simulator share one definition.
double objective(const CommGraph& graph, const Placement& placement);

} // namespace cpsim
