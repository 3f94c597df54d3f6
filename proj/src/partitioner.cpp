#include "cpsim/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cpsim/errors.hpp"
#include "cpsim/util.hpp"

namespace cpsim {

void WeightedGraph::validate() const {
    const int n = size();
    for (const auto& w : vertex_weights) {
        if (static_cast<int>(w.size()) != num_constraints)
            throw StructuralError("vertex weight arity mismatch");
        for (double x : w)
            if (x < 0.0) throw StructuralError("negative vertex weight");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw StructuralError("edge endpoint out of range");
        if (e.u == e.v) throw StructuralError("self loop on vertex " + std::to_string(e.u));
        if (e.weight < 0.0) throw StructuralError("negative edge weight");
        if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second)
            throw StructuralError("parallel edge between " + std::to_string(e.u) + " and " +
                                  std::to_string(e.v));
    }
}

double cut_weight(const WeightedGraph& graph, std::span<const int> assignment) {
    double cut = 0.0;
    for (const auto& e : graph.edges)
        if (assignment[e.u] != assignment[e.v]) cut += e.weight;
    return cut;
}

std::vector<std::vector<double>> part_loads(const WeightedGraph& graph, const BalanceSpec& spec,
                                            std::span<const int> assignment) {
    std::vector<std::vector<double>> loads(spec.parts,
                                           std::vector<double>(graph.num_constraints, 0.0));
    for (int v = 0; v < graph.size(); ++v)
        for (int c = 0; c < graph.num_constraints; ++c)
            loads[assignment[v]][c] += graph.vertex_weights[v][c];
    return loads;
}

namespace {

std::vector<std::vector<std::pair<int, double>>> adjacency(const WeightedGraph& g) {
    std::vector<std::vector<std::pair<int, double>>> adj(g.size());
    for (const auto& e : g.edges) {
        adj[e.u].push_back({e.v, e.weight});
        adj[e.v].push_back({e.u, e.weight});
    }
    return adj;
}

} // namespace

std::vector<CoarsenLevel> coarsen(const WeightedGraph& graph, std::uint64_t seed,
                                  const CoarsenOptions& opts) {
    if (graph.size() == 0) throw StructuralError("cannot coarsen an empty graph");

    std::vector<CoarsenLevel> levels;
    const WeightedGraph* current = &graph;
    Rng rng(seed);

    while (current->size() > opts.stop_vertices) {
        const int n = current->size();
        const auto adj = adjacency(*current);

        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        // Heavy-edge matching: each unmatched vertex grabs its heaviest
        // unmatched neighbor, ties to the lowest index.
        std::vector<int> match(n, -1);
        for (int u : order) {
            if (match[u] >= 0) continue;
            int pick = -1;
            double pick_w = -1.0;
            for (const auto& [v, w] : adj[u]) {
                if (match[v] >= 0 || v == u) continue;
                if (w > pick_w || (w == pick_w && v < pick)) {
                    pick = v;
                    pick_w = w;
                }
            }
            if (pick >= 0) {
                match[u] = pick;
                match[pick] = u;
            } else {
                match[u] = u;
            }
        }

        std::vector<int> fine_to_coarse(n, -1);
        int next = 0;
        for (int v = 0; v < n; ++v) {
            if (fine_to_coarse[v] >= 0) continue;
            fine_to_coarse[v] = next;
            if (match[v] != v) fine_to_coarse[match[v]] = next;
            ++next;
        }
        if (next == n) break; // nothing matched, e.g. an edgeless graph
        if (static_cast<double>(n - next) < opts.min_reduction * static_cast<double>(n))
            break;

        WeightedGraph coarse;
        coarse.num_constraints = current->num_constraints;
        coarse.vertex_weights.assign(next,
                                     std::vector<double>(current->num_constraints, 0.0));
        for (int v = 0; v < n; ++v)
            for (int c = 0; c < current->num_constraints; ++c)
                coarse.vertex_weights[fine_to_coarse[v]][c] += current->vertex_weights[v][c];

        std::map<std::pair<int, int>, double> merged;
        for (const auto& e : current->edges) {
            const int cu = fine_to_coarse[e.u];
            const int cv = fine_to_coarse[e.v];
            if (cu == cv) continue;
            merged[{std::min(cu, cv), std::max(cu, cv)}] += e.weight;
        }
        for (const auto& [key, w] : merged) coarse.edges.push_back({key.first, key.second, w});

        levels.push_back({std::move(coarse), std::move(fine_to_coarse)});
        current = &levels.back().graph;
    }
    return levels;
}

namespace {

double total_violation(const std::vector<std::vector<double>>& loads, const BalanceSpec& spec) {
    double v = 0.0;
    for (int p = 0; p < spec.parts; ++p)
        for (int c = 0; c < static_cast<int>(loads[p].size()); ++c)
            v += std::max(0.0, loads[p][c] - spec.limit(c));
    return v;
}

bool within_limits(const std::vector<double>& load, const BalanceSpec& spec) {
    for (int c = 0; c < static_cast<int>(load.size()); ++c)
        if (load[c] > spec.limit(c)) return false;
    return true;
}

/// Greedy growth: heaviest vertex first, placed on the part that keeps the
/// most bottleneck headroom after the assignment. A part where the vertex
/// does not fit is used only when no part fits.
std::vector<int> initial_partition(const WeightedGraph& g, const BalanceSpec& spec,
                                   const std::vector<int>* order_override) {
    const int n = g.size();
    const int k = g.num_constraints;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (order_override) {
        order = *order_override;
    } else {
        std::vector<double> heaviness(n, 0.0);
        for (int v = 0; v < n; ++v)
            for (int c = 0; c < k; ++c)
                heaviness[v] = std::max(heaviness[v], g.vertex_weights[v][c] / spec.limit(c));
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (heaviness[a] != heaviness[b]) return heaviness[a] > heaviness[b];
            return a < b;
        });
    }

    std::vector<std::vector<double>> loads(spec.parts, std::vector<double>(k, 0.0));
    std::vector<int> assignment(n, 0);
    for (int v : order) {
        int best_fit = -1, best_any = -1;
        double best_fit_score = -std::numeric_limits<double>::infinity();
        double best_any_score = -std::numeric_limits<double>::infinity();
        for (int p = 0; p < spec.parts; ++p) {
            bool fits = true;
            double score = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double rem = spec.limit(c) - loads[p][c] - g.vertex_weights[v][c];
                if (rem < 0.0) fits = false;
                score = std::min(score, rem / spec.limit(c));
            }
            if (fits && score > best_fit_score) {
                best_fit_score = score;
                best_fit = p;
            }
            if (score > best_any_score) {
                best_any_score = score;
                best_any = p;
            }
        }
        const int p = best_fit >= 0 ? best_fit : best_any;
        assignment[v] = p;
        for (int c = 0; c < k; ++c) loads[p][c] += g.vertex_weights[v][c];
    }
    return assignment;
}

} // namespace

int refine(const WeightedGraph& graph, std::vector<int>& assignment, const BalanceSpec& spec,
           int max_passes) {
    const int n = graph.size();
    const int k = graph.num_constraints;
    const auto adj = adjacency(graph);
    auto loads = part_loads(graph, spec, assignment);
    int moves = 0;

    for (int pass = 0; pass < max_passes; ++pass) {
        bool moved = false;
        const bool feasible_now = total_violation(loads, spec) == 0.0;
        for (int v = 0; v < n; ++v) {
            const int from = assignment[v];
            // connection weight per part; only boundary vertices can gain
            std::map<int, double> conn;
            for (const auto& [u, w] : adj[v]) conn[assignment[u]] += w;
            const double internal = conn.count(from) ? conn[from] : 0.0;

            int best_part = -1;
            double best_gain = 0.0;
            double best_viol_drop = 0.0;
            for (const auto& [to, external] : conn) {
                if (to == from) continue;
                const double gain = external - internal;
                if (feasible_now) {
                    // strict cut improvement that stays within limits
                    bool fits = true;
                    for (int c = 0; c < k; ++c)
                        if (loads[to][c] + graph.vertex_weights[v][c] > spec.limit(c))
                            fits = false;
                    if (!fits || gain <= 0.0) continue;
                    if (gain > best_gain || (gain == best_gain && best_part >= 0 && to < best_part)) {
                        best_gain = gain;
                        best_part = to;
                    }
                } else {
                    // infeasible: accept the move that sheds the most
                    // violation, break ties on cut gain
                    double drop = 0.0;
                    for (int c = 0; c < k; ++c) {
                        const double w = graph.vertex_weights[v][c];
                        drop += std::max(0.0, loads[from][c] - spec.limit(c)) -
                                std::max(0.0, loads[from][c] - w - spec.limit(c));
                        drop -= std::max(0.0, loads[to][c] + w - spec.limit(c)) -
                                std::max(0.0, loads[to][c] - spec.limit(c));
                    }
                    if (drop <= 0.0) continue;
                    if (drop > best_viol_drop ||
                        (drop == best_viol_drop && gain > best_gain)) {
                        best_viol_drop = drop;
                        best_gain = gain;
                        best_part = to;
                    }
                }
            }
            if (best_part >= 0) {
                for (int c = 0; c < k; ++c) {
                    loads[from][c] -= graph.vertex_weights[v][c];
                    loads[best_part][c] += graph.vertex_weights[v][c];
                }
                assignment[v] = best_part;
                ++moves;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return moves;
}

namespace {

/// Moving off-boundary vertices cannot reduce the cut, but when the
/// current assignment is infeasible a disconnected vertex may still need
/// to migrate; run a violation-shedding sweep over all vertices.
void shed_violation(const WeightedGraph& g, std::vector<int>& assignment,
                    const BalanceSpec& spec) {
    auto loads = part_loads(g, spec, assignment);
    if (total_violation(loads, spec) == 0.0) return;
    for (int pass = 0; pass < 4; ++pass) {
        bool moved = false;
        for (int v = 0; v < g.size(); ++v) {
            const int from = assignment[v];
            if (within_limits(loads[from], spec)) continue;
            int best = -1;
            double best_room = 0.0;
            for (int p = 0; p < spec.parts; ++p) {
                if (p == from) continue;
                bool fits = true;
                double room = std::numeric_limits<double>::infinity();
                for (int c = 0; c < g.num_constraints; ++c) {
                    const double rem =
                        spec.limit(c) - loads[p][c] - g.vertex_weights[v][c];
                    if (rem < 0.0) fits = false;
                    room = std::min(room, rem);
                }
                if (fits && (best < 0 || room > best_room)) {
                    best = p;
                    best_room = room;
                }
            }
            if (best >= 0) {
                for (int c = 0; c < g.num_constraints; ++c) {
                    loads[from][c] -= g.vertex_weights[v][c];
                    loads[best][c] += g.vertex_weights[v][c];
                }
                assignment[v] = best;
                moved = true;
            }
        }
        if (!moved || total_violation(loads, spec) == 0.0) break;
    }
}

} // namespace

PartitionResult partition(const WeightedGraph& graph, const BalanceSpec& spec,
                          std::uint64_t seed, const PartitionOptions& opts) {
    graph.validate();
    if (spec.parts < 1) throw StructuralError("parts must be >= 1");
    if (static_cast<int>(spec.capacity.size()) != graph.num_constraints)
        throw StructuralError("capacity arity does not match graph constraints");
    for (double c : spec.capacity)
        if (c <= 0.0) throw StructuralError("capacities must be positive");
    for (double s : spec.slack)
        if (s < 1.0) throw StructuralError("slack must be >= 1.0");

    PartitionResult result;
    result.assignment.assign(graph.size(), 0);

    // Up-front infeasibility: totals that cannot fit, or a single vertex
    // larger than any part.
    for (int c = 0; c < graph.num_constraints; ++c) {
        double total = 0.0;
        for (const auto& w : graph.vertex_weights) total += w[c];
        if (total > spec.limit(c) * spec.parts) {
            result.per_part_loads = part_loads(graph, spec, result.assignment);
            result.cut_weight = cut_weight(graph, result.assignment);
            result.feasible = false;
            result.note = "infeasible: total weight " + std::to_string(total) +
                          " exceeds aggregate capacity in constraint " + std::to_string(c);
            return result;
        }
    }
    for (int v = 0; v < graph.size(); ++v)
        for (int c = 0; c < graph.num_constraints; ++c)
            if (graph.vertex_weights[v][c] > spec.limit(c)) {
                result.per_part_loads = part_loads(graph, spec, result.assignment);
                result.cut_weight = cut_weight(graph, result.assignment);
                result.feasible = false;
                result.note = "infeasible: vertex " + std::to_string(v) +
                              " exceeds per-part capacity in constraint " + std::to_string(c);
                return result;
            }

    CoarsenOptions copts = opts.coarsening;
    copts.stop_vertices = std::max(copts.stop_vertices, 4 * spec.parts);

    bool have_best = false;
    double best_cut = 0.0;
    bool best_feasible = false;

    for (int attempt = 0; attempt < std::max(1, opts.restarts); ++attempt) {
        const std::uint64_t attempt_seed = derive_seed(seed, attempt);
        const auto levels = coarsen(graph, attempt_seed, copts);
        const WeightedGraph& coarsest = levels.empty() ? graph : levels.back().graph;

        std::vector<int> assignment;
        if (attempt == 0) {
            assignment = initial_partition(coarsest, spec, nullptr);
        } else {
            // perturbed visit order so restarts sample different optima
            std::vector<int> order(coarsest.size());
            std::iota(order.begin(), order.end(), 0);
            Rng rng(derive_seed(attempt_seed, 0x5eed));
            rng.shuffle(order);
            assignment = initial_partition(coarsest, spec, &order);
        }
        refine(coarsest, assignment, spec, opts.refine_passes);

        // project back through the hierarchy, refining at every level
        for (int lvl = static_cast<int>(levels.size()) - 1; lvl >= 0; --lvl) {
            const auto& map = levels[lvl].fine_to_coarse;
            std::vector<int> finer(map.size());
            for (std::size_t v = 0; v < map.size(); ++v) finer[v] = assignment[map[v]];
            assignment = std::move(finer);
            const WeightedGraph& fine_graph = lvl == 0 ? graph : levels[lvl - 1].graph;
            refine(fine_graph, assignment, spec, opts.refine_passes);
        }
        shed_violation(graph, assignment, spec);
        refine(graph, assignment, spec, opts.refine_passes);

        const auto loads = part_loads(graph, spec, assignment);
        const bool feasible = total_violation(loads, spec) == 0.0;
        const double cut = cut_weight(graph, assignment);
        const bool better = !have_best || (feasible && !best_feasible) ||
                            (feasible == best_feasible && cut < best_cut);
        if (better) {
            have_best = true;
            best_feasible = feasible;
            best_cut = cut;
            result.assignment = assignment;
        }
    }

    result.per_part_loads = part_loads(graph, spec, result.assignment);
    result.cut_weight = cut_weight(graph, result.assignment);
    result.feasible = best_feasible;
    if (!result.feasible) result.note = "no attempt satisfied every capacity limit";
    return result;
}

WeightedGraph read_weighted_graph(std::istream& in) {
    int n = 0, m = 0, k = 0;
    if (!(in >> n >> m >> k)) throw StructuralError("weighted graph header: expected 'n m k'");
    if (n < 0 || m < 0 || k <= 0) throw StructuralError("weighted graph header out of range");
    WeightedGraph g;
    g.num_constraints = k;
    g.vertex_weights.assign(n, std::vector<double>(k, 0.0));
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < k; ++c)
            if (!(in >> g.vertex_weights[v][c]))
                throw StructuralError("weighted graph: truncated vertex weights");
    for (int e = 0; e < m; ++e) {
        WeightedGraph::Edge edge;
        if (!(in >> edge.u >> edge.v >> edge.weight))
            throw StructuralError("weighted graph: truncated edge list");
        g.edges.push_back(edge);
    }
    g.validate();
    return g;
}

} // namespace cpsim
