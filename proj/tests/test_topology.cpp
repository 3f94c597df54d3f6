#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cpsim/errors.hpp"
#include "cpsim/topology.hpp"
#include "cpsim/util.hpp"

using namespace cpsim;

TEST_CASE("reference configuration reproduces the 2560-switch fabric") {
    auto t = FatTree::build(32, 32, 32, 512);
    CHECK(t.switch_count() == 2560);
    CHECK(t.core_count() == 512);
    int aggs = 0, tors = 0, cores = 0;
    for (int sw = 0; sw < t.switch_count(); ++sw) {
        switch (t.layer(sw)) {
        case SwitchLayer::core: ++cores; break;
        case SwitchLayer::aggregation: ++aggs; break;
        case SwitchLayer::tor: ++tors; break;
        default: break;
        }
    }
    CHECK(cores == 512);
    CHECK(aggs == 1024);
    CHECK(tors == 1024);
    // 32x32 ToR-agg links per pod plus 16 core uplinks per agg
    CHECK(t.links().size() == 32u * 32 * 32 + 1024u * 16);
    CHECK(t.connected());
}

TEST_CASE("minimal 2-pod instance builds and connects") {
    auto t = FatTree::build(2, 1, 1, 1);
    CHECK(t.switch_count() == 5);
    CHECK(t.connected());
}

TEST_CASE("indivisible core striping is rejected") {
    CHECK_THROWS_AS(FatTree::build(2, 2, 3, 4), StructuralError);
    CHECK_THROWS_AS(FatTree::build(0, 1, 1, 1), StructuralError);
}

TEST_CASE("intra-pod ToR pairs sit two hops apart, inter-pod four") {
    auto t = FatTree::build(4, 4, 4, 8);
    const int tor_base = 8 + 4 * 4;
    const int tor00 = tor_base + 0;
    const int tor01 = tor_base + 1;      // same pod
    const int tor10 = tor_base + 4;      // next pod
    auto sp = shortest_paths(t, std::array{tor00});
    CHECK(sp.dist[tor00] == 0.0);
    CHECK(sp.dist[tor01] == 2.0);
    CHECK(sp.dist[tor10] == 4.0);
}

TEST_CASE("distances are symmetric under unit costs") {
    auto t = FatTree::build(4, 4, 4, 8);
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int a = static_cast<int>(rng.next_below(t.switch_count()));
        const int b = static_cast<int>(rng.next_below(t.switch_count()));
        auto from_a = shortest_paths(t, std::array{a});
        auto from_b = shortest_paths(t, std::array{b});
        CHECK(from_a.dist[b] == from_b.dist[a]);
    }
}

TEST_CASE("failing every link on a ToR isolates it") {
    auto t = FatTree::build(2, 2, 2, 2);
    const int tor = t.core_count() + 2 * 2; // first ToR
    for (int link = 0; link < static_cast<int>(t.links().size()); ++link)
        if (t.links()[link].a == tor || t.links()[link].b == tor) t.fail_link(link);
    auto sp = shortest_paths(t, std::array{0});
    CHECK(std::isinf(sp.dist[tor]));
    CHECK_FALSE(t.connected());
    t.restore_all();
    CHECK(t.connected());
}

TEST_CASE("failing links never shortens any distance") {
    auto t = FatTree::build(2, 3, 2, 4);
    auto before = shortest_paths(t, std::array{0});
    Rng rng(17);
    for (int i = 0; i < 5; ++i)
        t.fail_link(static_cast<int>(rng.next_below(t.links().size())));
    auto after = shortest_paths(t, std::array{0});
    for (int sw = 0; sw < t.switch_count(); ++sw)
        CHECK(after.dist[sw] >= before.dist[sw]);
}

TEST_CASE("a single up link is always the sampled failure") {
    auto t = FatTree::build(2, 1, 1, 1);
    Rng rng(3);
    for (int link = 1; link < static_cast<int>(t.links().size()); ++link) t.fail_link(link);
    for (int trial = 0; trial < 10; ++trial)
        CHECK(t.sample_link_failure(rng).link_id == 0);
}

TEST_CASE("failed links are not sampled until restored") {
    auto t = FatTree::build(2, 2, 2, 2);
    Rng rng(11);
    t.fail_link(0);
    t.fail_link(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int id = t.sample_link_failure(rng).link_id;
        CHECK(id != 0);
        CHECK(id != 3);
    }
    t.restore_link(0);
    bool seen = false;
    for (int trial = 0; trial < 500 && !seen; ++trial)
        seen = t.sample_link_failure(rng).link_id == 0;
    CHECK(seen);
}

TEST_CASE("border fraction of samples matches the core-link share within 3 sigma") {
    auto t = FatTree::build(32, 32, 32, 512);
    std::size_t border_links = 0;
    for (int link = 0; link < static_cast<int>(t.links().size()); ++link)
        if (t.classify(link) == LinkKind::border) ++border_links;
    const double p = static_cast<double>(border_links) / t.links().size();

    Rng rng(2026);
    const int n = 10000;
    int border = 0;
    for (int i = 0; i < n; ++i)
        if (t.sample_link_failure(rng).kind == LinkKind::border) ++border;
    const double phat = static_cast<double>(border) / n;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(phat - p) <= 3.0 * sigma);
}

TEST_CASE("pod partitioning needs a divisor of the pod count and reports sizes") {
    auto t = FatTree::build(32, 32, 32, 512);
    CHECK_THROWS_AS(PodPartitioning::make(t, 3), StructuralError);
    CHECK_THROWS_AS(PodPartitioning::make(t, 0), StructuralError);
    for (int p : {1, 2, 4, 8, 16, 32}) {
        auto part = PodPartitioning::make(t, p);
        for (int k = 0; k < p; ++k) CHECK(part.switches_in(k) == 2560 / p);
    }
    auto part = PodPartitioning::make(t, 8);
    CHECK(part.partition_of_pod(0) == 0);
    CHECK(part.partition_of_pod(4) == 1);
    CHECK(part.partition_of_pod(31) == 7);
}

TEST_CASE("custom topologies carry unknown layers and local links") {
    auto t = FatTree::custom(3, {{0, 1}, {1, 2}});
    CHECK_FALSE(t.is_fat_tree());
    CHECK(t.layer(0) == SwitchLayer::unknown);
    CHECK(t.classify(0) == LinkKind::local);
    auto sp = shortest_paths(t, std::array{0});
    CHECK(sp.dist[2] == 2.0);
    CHECK_THROWS_AS(PodPartitioning::make(t, 2), StructuralError);
}
