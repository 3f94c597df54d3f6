#include "cpsim/topology.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "cpsim/errors.hpp"

namespace cpsim {

FatTree FatTree::build(int pods, int tors_per_pod, int aggs_per_pod, int core_count) {
    if (pods <= 0 || tors_per_pod <= 0 || aggs_per_pod <= 0 || core_count <= 0)
        throw StructuralError("fat-tree parameters must be positive");
    if (core_count % aggs_per_pod != 0)
        throw StructuralError("core_count " + std::to_string(core_count) +
                              " not divisible by aggs_per_pod " + std::to_string(aggs_per_pod));

    FatTree t;
    t.pods_ = pods;
    t.tors_per_pod_ = tors_per_pod;
    t.aggs_per_pod_ = aggs_per_pod;
    t.core_count_ = core_count;
    t.switch_count_ = core_count + pods * (aggs_per_pod + tors_per_pod);

    const int agg_base = core_count;
    const int tor_base = core_count + pods * aggs_per_pod;
    const int cores_per_agg = core_count / aggs_per_pod;

    for (int p = 0; p < pods; ++p) {
        for (int tor = 0; tor < tors_per_pod; ++tor)
            for (int agg = 0; agg < aggs_per_pod; ++agg)
                t.links_.push_back(
                    {tor_base + p * tors_per_pod + tor, agg_base + p * aggs_per_pod + agg});
        // aggregation switch j serves the j-th contiguous stripe of cores
        for (int agg = 0; agg < aggs_per_pod; ++agg)
            for (int c = 0; c < cores_per_agg; ++c)
                t.links_.push_back({agg_base + p * aggs_per_pod + agg, agg * cores_per_agg + c});
    }
    t.index_links();
    return t;
}

FatTree FatTree::custom(int switch_count, std::vector<Link> links) {
    if (switch_count <= 0) throw StructuralError("switch_count must be positive");
    for (const auto& l : links)
        if (l.a < 0 || l.a >= switch_count || l.b < 0 || l.b >= switch_count || l.a == l.b)
            throw StructuralError("custom link endpoints out of range");
    FatTree t;
    t.switch_count_ = switch_count;
    t.links_ = std::move(links);
    t.index_links();
    return t;
}

void FatTree::index_links() {
    const int m = static_cast<int>(links_.size());
    up_.assign(m, true);
    up_list_.resize(m);
    up_pos_.resize(m);
    for (int i = 0; i < m; ++i) {
        up_list_[i] = i;
        up_pos_[i] = i;
    }
    adj_.assign(switch_count_, {});
    for (int i = 0; i < m; ++i) {
        adj_[links_[i].a].push_back({links_[i].b, i});
        adj_[links_[i].b].push_back({links_[i].a, i});
    }
}

SwitchLayer FatTree::layer(int sw) const {
    if (!is_fat_tree()) return SwitchLayer::unknown;
    if (sw < core_count_) return SwitchLayer::core;
    if (sw < core_count_ + pods_ * aggs_per_pod_) return SwitchLayer::aggregation;
    return SwitchLayer::tor;
}

int FatTree::pod_of(int sw) const {
    switch (layer(sw)) {
    case SwitchLayer::aggregation:
        return (sw - core_count_) / aggs_per_pod_;
    case SwitchLayer::tor:
        return (sw - core_count_ - pods_ * aggs_per_pod_) / tors_per_pod_;
    default:
        return -1;
    }
}

LinkKind FatTree::classify(int link_id) const {
    const auto& l = links_[link_id];
    if (layer(l.a) == SwitchLayer::core || layer(l.b) == SwitchLayer::core)
        return LinkKind::border;
    return LinkKind::local;
}

void FatTree::fail_link(int link_id) {
    if (!up_[link_id]) return;
    up_[link_id] = false;
    const int pos = up_pos_[link_id];
    const int last = up_list_.back();
    up_list_[pos] = last;
    up_pos_[last] = pos;
    up_list_.pop_back();
    up_pos_[link_id] = -1;
}

void FatTree::restore_link(int link_id) {
    if (up_[link_id]) return;
    up_[link_id] = true;
    up_pos_[link_id] = static_cast<int>(up_list_.size());
    up_list_.push_back(link_id);
}

void FatTree::restore_all() {
    for (int i = 0; i < static_cast<int>(links_.size()); ++i)
        if (!up_[i]) restore_link(i);
}

LinkFailure FatTree::sample_link_failure(Rng& rng) const {
    if (up_list_.empty()) throw StructuralError("no up links to fail");
    const int link_id = up_list_[rng.next_below(up_list_.size())];
    LinkFailure f;
    f.link_id = link_id;
    f.a = links_[link_id].a;
    f.b = links_[link_id].b;
    f.kind = classify(link_id);
    return f;
}

bool FatTree::connected() const {
    if (switch_count_ == 0) return true;
    std::vector<bool> seen(switch_count_, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const auto& [v, link] : adj_[u]) {
            if (!up_[link] || seen[v]) continue;
            seen[v] = true;
            ++reached;
            q.push(v);
        }
    }
    return reached == switch_count_;
}

ShortestPaths shortest_paths(const FatTree& topo, std::span<const int> sources) {
    const int n = topo.switch_count();
    ShortestPaths sp;
    sp.dist.assign(n, std::numeric_limits<double>::infinity());
    sp.parent.assign(n, -1);

    using Item = std::pair<double, int>; // (dist, switch), lowest id first on ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int s : sources) {
        if (s < 0 || s >= n) throw StructuralError("source switch out of range");
        sp.dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > sp.dist[u]) continue;
        for (const auto& [v, link] : topo.adjacency()[u]) {
            if (!topo.link_up(link)) continue;
            const double nd = d + 1.0;
            if (nd < sp.dist[v]) {
                sp.dist[v] = nd;
                sp.parent[v] = u;
                heap.push({nd, v});
            } else if (nd == sp.dist[v] && u < sp.parent[v]) {
                sp.parent[v] = u;
            }
        }
    }
    return sp;
}

PodPartitioning PodPartitioning::make(const FatTree& topo, int partition_count) {
    if (!topo.is_fat_tree())
        throw StructuralError("pod partitioning requires a fat-tree topology");
    if (partition_count < 1 || topo.pods() % partition_count != 0) {
        std::string valid;
        for (int p = 1; p <= topo.pods(); ++p)
            if (topo.pods() % p == 0) valid += (valid.empty() ? "" : ", ") + std::to_string(p);
        throw StructuralError("partition count " + std::to_string(partition_count) +
                              " does not divide pod count " + std::to_string(topo.pods()) +
                              "; valid: " + valid);
    }

    PodPartitioning part;
    part.partition_count_ = partition_count;
    const int pods_per = topo.pods() / partition_count;
    part.pod_to_partition_.resize(topo.pods());
    for (int p = 0; p < topo.pods(); ++p) part.pod_to_partition_[p] = p / pods_per;

    // cores split into contiguous ranges, remainder on the first partitions
    part.core_to_partition_.resize(topo.core_count());
    const int base = topo.core_count() / partition_count;
    const int rem = topo.core_count() % partition_count;
    int core = 0;
    for (int k = 0; k < partition_count; ++k) {
        const int take = base + (k < rem ? 1 : 0);
        for (int i = 0; i < take; ++i) part.core_to_partition_[core++] = k;
    }

    part.sizes_.assign(partition_count, 0);
    for (int sw = 0; sw < topo.switch_count(); ++sw)
        ++part.sizes_[part.partition_of_switch(topo, sw)];
    return part;
}

int PodPartitioning::partition_of_switch(const FatTree& topo, int sw) const {
    if (topo.layer(sw) == SwitchLayer::core) return core_to_partition_[sw];
    return pod_to_partition_[topo.pod_of(sw)];
}

int PodPartitioning::owner_of_failure(const FatTree& topo, const LinkFailure& failure) const {
    // local links live inside one pod; border links are owned by the pod
    // side that detects the loss
    const int sw = topo.layer(failure.a) == SwitchLayer::core ? failure.b : failure.a;
    return partition_of_switch(topo, sw);
}

} // namespace cpsim
