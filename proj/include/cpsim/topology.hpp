#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpsim/util.hpp"

namespace cpsim {

enum class SwitchLayer { core, aggregation, tor, unknown };

enum class LinkKind { border, local };

struct Link {
    int a = 0;
    int b = 0;
};

struct LinkFailure {
    int link_id = -1;
    int a = 0;
    int b = 0;
    LinkKind kind = LinkKind::local;
    double time_s = 0.0;
};

/// Reference fabric: 2560 switches as 512 core + 32 pods of 32 ToR and
/// 32 aggregation switches each.
struct FatTreeParams {
    int pods = 32;
    int tors_per_pod = 32;
    int aggs_per_pod = 32;
    int core_count = 512;
};

/// Three-layer fat tree: every ToR links to every aggregation switch of
/// its pod, aggregation switches stripe evenly across the core layer.
/// Switch ids: cores first, then aggregation (pod major), then ToR
/// (pod major). Links carry binary up/down state and unit cost.
class FatTree {
public:
    static FatTree build(int pods, int tors_per_pod, int aggs_per_pod, int core_count);
    static FatTree build(const FatTreeParams& p) {
        return build(p.pods, p.tors_per_pod, p.aggs_per_pod, p.core_count);
    }

    /// Arbitrary switch graph for non-fat-tree experiments. Layers are
    /// unknown and every link classifies as local.
    static FatTree custom(int switch_count, std::vector<Link> links);

    bool is_fat_tree() const { return pods_ > 0; }
    int pods() const { return pods_; }
    int tors_per_pod() const { return tors_per_pod_; }
    int aggs_per_pod() const { return aggs_per_pod_; }
    int core_count() const { return core_count_; }
    int switch_count() const { return switch_count_; }

    SwitchLayer layer(int sw) const;
    int pod_of(int sw) const; // -1 for core switches and custom topologies

    const std::vector<Link>& links() const { return links_; }
    LinkKind classify(int link_id) const;
    bool link_up(int link_id) const { return up_[link_id]; }
    int up_link_count() const { return static_cast<int>(up_list_.size()); }

    void fail_link(int link_id);
    void restore_link(int link_id);
    void restore_all();

    /// Uniform draw over currently up links.
    LinkFailure sample_link_failure(Rng& rng) const;

    const std::vector<std::vector<std::pair<int, int>>>& adjacency() const { return adj_; }

    bool connected() const;

private:
    int pods_ = 0;
    int tors_per_pod_ = 0;
    int aggs_per_pod_ = 0;
    int core_count_ = 0;
    int switch_count_ = 0;
    std::vector<Link> links_;
    std::vector<bool> up_;
    std::vector<int> up_list_;    // link ids currently up
    std::vector<int> up_pos_;     // link id -> index in up_list_, -1 when down
    std::vector<std::vector<std::pair<int, int>>> adj_; // switch -> (peer, link_id)

    void index_links();
};

struct ShortestPaths {
    std::vector<double> dist;  // hops; infinity when unreachable
    std::vector<int> parent;   // -1 for sources and unreachable nodes
};

/// Multi-source Dijkstra over up links with unit costs. Ties resolve to
/// the lowest switch id, so parents are deterministic.
ShortestPaths shortest_paths(const FatTree& topo, std::span<const int> sources);

/// Contiguous grouping of pods into P partitions; core switches are
/// split into contiguous ranges the same way. P must divide the pod count.
class PodPartitioning {
public:
    static PodPartitioning make(const FatTree& topo, int partition_count);

    int partition_count() const { return partition_count_; }
    int partition_of_pod(int pod) const { return pod_to_partition_[pod]; }
    int partition_of_switch(const FatTree& topo, int sw) const;
    int switches_in(int partition) const { return sizes_[partition]; }
    const std::vector<int>& sizes() const { return sizes_; }

    /// Partition that detects and owns a local (intra-pod) link failure.
    int owner_of_failure(const FatTree& topo, const LinkFailure& failure) const;

private:
    int partition_count_ = 1;
    std::vector<int> pod_to_partition_;
    std::vector<int> core_to_partition_;
    std::vector<int> sizes_;
};

} // namespace cpsim
