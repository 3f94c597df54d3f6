#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cpsim {

/// Undirected graph with a weight vector per vertex (one entry per balance
/// constraint) and nonnegative edge weights. No self loops, at most one
/// edge per vertex pair.
struct WeightedGraph {
    struct Edge {
        int u = 0;
        int v = 0;
        double weight = 0.0;
    };

    int num_constraints = 0;
    std::vector<std::vector<double>> vertex_weights; // n x num_constraints
    std::vector<Edge> edges;

    int size() const { return static_cast<int>(vertex_weights.size()); }
    void validate() const; // throws StructuralError on malformed input
};

struct BalanceSpec {
    int parts = 1;
    std::vector<double> capacity; // absolute capacity per constraint, per part
    std::vector<double> slack;    // multiplicative tolerance >= 1.0; empty = hard capacity

    double limit(int constraint) const {
        return capacity[constraint] * (slack.empty() ? 1.0 : slack[constraint]);
    }
};

struct PartitionResult {
    std::vector<int> assignment;
    double cut_weight = 0.0;
    std::vector<std::vector<double>> per_part_loads; // parts x constraints
    bool feasible = false;
    std::string note;
};

struct CoarsenOptions {
    int stop_vertices = 32;      // stop once the level is at most this big
    double min_reduction = 0.10; // stop if a level shrinks less than this
};

/// One level of the coarsening hierarchy. graph is the coarse graph;
/// fine_to_coarse maps the previous (finer) level's vertices into it.
struct CoarsenLevel {
    WeightedGraph graph;
    std::vector<int> fine_to_coarse;
};

/// Heavy-edge matching coarsening. Matched vertices merge with summed
/// weight vectors; parallel edges collapse with summed weights. Visit
/// order is shuffled by seed, the matching rule itself is heaviest edge
/// with ties to the lowest vertex index.
std::vector<CoarsenLevel> coarsen(const WeightedGraph& graph, std::uint64_t seed,
                                  const CoarsenOptions& opts = {});

double cut_weight(const WeightedGraph& graph, std::span<const int> assignment);

std::vector<std::vector<double>> part_loads(const WeightedGraph& graph, const BalanceSpec& spec,
                                            std::span<const int> assignment);

/// Boundary hill climbing: a vertex moves only if the move strictly
/// reduces the cut while staying within capacity, or strictly reduces
/// capacity violation while the assignment is infeasible. Returns the
/// number of moves applied. Bounded passes, each visiting every boundary
/// vertex at most once.
int refine(const WeightedGraph& graph, std::vector<int>& assignment, const BalanceSpec& spec,
           int max_passes = 8);

struct PartitionOptions {
    int restarts = 8;
    int refine_passes = 8;
    CoarsenOptions coarsening;
};

/// Multilevel S-way partitioning: coarsen, greedy initial assignment at
/// the coarsest level, refine while projecting back up. Runs a few
/// seed-perturbed restarts and keeps the best (feasible first, then cut).
/// Deterministic for a fixed (graph, spec, seed).
PartitionResult partition(const WeightedGraph& graph, const BalanceSpec& spec,
                          std::uint64_t seed, const PartitionOptions& opts = {});

/// Minimal text format for standalone benchmarking:
///   n m k
///   k vertex weights per line, n lines
///   "u v w" per line, m lines
WeightedGraph read_weighted_graph(std::istream& in);

} // namespace cpsim
