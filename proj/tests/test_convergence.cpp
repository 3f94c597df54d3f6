#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpsim/convergence.hpp"
#include "cpsim/errors.hpp"
#include "cpsim/topology.hpp"
#include "cpsim/util.hpp"

using namespace cpsim;

namespace {

FatTree reference() { return FatTree::build(32, 32, 32, 512); }

LinkFailure failure_of_kind(const FatTree& t, LinkKind kind) {
    Rng rng(1);
    for (;;) {
        auto f = t.sample_link_failure(rng);
        if (f.kind == kind) return f;
    }
}

} // namespace

TEST_CASE("single partition: no communication, compute over the whole fabric") {
    auto t = reference();
    auto part = PodPartitioning::make(t, 1);
    auto model = ConvergenceModel::calibrated();
    for (LinkKind kind : {LinkKind::border, LinkKind::local}) {
        auto s = measure_convergence(t, part, failure_of_kind(t, kind), model);
        CHECK(s.comm_s == 0.0);
        CHECK(s.compute_s == doctest::Approx(model.local_compute_s(2560)));
        CHECK(s.total_s == doctest::Approx(s.compute_s));
    }
}

TEST_CASE("32 partitions: border failures advertise and compute over 80 switches") {
    auto t = reference();
    auto part = PodPartitioning::make(t, 32);
    auto model = ConvergenceModel::calibrated();
    auto s = measure_convergence(t, part, failure_of_kind(t, LinkKind::border), model);
    CHECK(s.comm_s > 0.0);
    CHECK(s.comm_s == doctest::Approx(model.advert_latency_s * 31));
    CHECK(s.compute_s == doctest::Approx(model.local_compute_s(80)));
    CHECK(s.total_s == doctest::Approx(s.compute_s + s.comm_s));
}

TEST_CASE("local failures recompute at the owner before the advertisement round") {
    auto t = reference();
    auto part = PodPartitioning::make(t, 8);
    auto model = ConvergenceModel::calibrated();
    auto s = measure_convergence(t, part, failure_of_kind(t, LinkKind::local), model);
    // owner compute plus the parallel recompute of the other partitions
    CHECK(s.compute_s == doctest::Approx(2.0 * model.local_compute_s(320)));
    CHECK(s.comm_s == doctest::Approx(model.advert_latency_s * 7));
}

TEST_CASE("failing an already-down link is a structural error") {
    auto t = reference();
    auto part = PodPartitioning::make(t, 2);
    auto model = ConvergenceModel::calibrated();
    auto f = failure_of_kind(t, LinkKind::local);
    t.fail_link(f.link_id);
    CHECK_THROWS_AS(measure_convergence(t, part, f, model), StructuralError);
}

TEST_CASE("calibration anchors the 4-partition recompute share at 25% of a core") {
    auto model = ConvergenceModel::calibrated();
    CHECK(model.local_compute_s(640) / 10.0 == doctest::Approx(0.25));
    // compute term shrinks with partition count
    CHECK(model.local_compute_s(320) < model.local_compute_s(640));
}

TEST_CASE("sweep is deterministic and a single-count sweep passes through") {
    auto t = reference();
    auto model = ConvergenceModel::calibrated();
    const int counts[] = {1};
    auto a = sweep_partitions(t, counts, 1, model, 99);
    REQUIRE(a.aggregate.size() == 1);
    CHECK(a.samples.size() == 1);
    CHECK(a.aggregate[0].mean_s == doctest::Approx(a.samples[0].total_s));

    const int more[] = {2, 8};
    auto b1 = sweep_partitions(t, more, 40, model, 7);
    auto b2 = sweep_partitions(t, more, 40, model, 7);
    REQUIRE(b1.samples.size() == b2.samples.size());
    for (std::size_t i = 0; i < b1.samples.size(); ++i)
        CHECK(b1.samples[i].total_s == b2.samples[i].total_s);
    CHECK(b1.aggregate[1].p95_s == b2.aggregate[1].p95_s);
}

TEST_CASE("parallel sweep matches the sequential one") {
    auto t = reference();
    auto model = ConvergenceModel::calibrated();
    const int counts[] = {1, 2, 4, 8};
    auto seq = sweep_partitions(t, counts, 20, model, 5, 1);
    auto par = sweep_partitions(t, counts, 20, model, 5, 4);
    REQUIRE(seq.samples.size() == par.samples.size());
    for (std::size_t i = 0; i < seq.samples.size(); ++i)
        CHECK(seq.samples[i].total_s == par.samples[i].total_s);
}

TEST_CASE("doubling the sample count moves the mean by less than 10%") {
    auto t = reference();
    auto model = ConvergenceModel::calibrated();
    const int counts[] = {4, 16};
    auto small = sweep_partitions(t, counts, 100, model, 31);
    auto big = sweep_partitions(t, counts, 200, model, 31);
    for (std::size_t i = 0; i < small.aggregate.size(); ++i) {
        const double rel = std::abs(big.aggregate[i].mean_s - small.aggregate[i].mean_s) /
                           small.aggregate[i].mean_s;
        CHECK(rel <= 0.10);
    }
}

TEST_CASE("invalid partition counts are rejected up front with the divisor list") {
    auto t = reference();
    auto model = ConvergenceModel::calibrated();
    const int counts[] = {1, 5};
    CHECK_THROWS_WITH_AS(sweep_partitions(t, counts, 3, model, 1),
                         doctest::Contains("does not divide"), StructuralError);
}

TEST_CASE("picker takes the minimum mean, smaller count on ties") {
    std::vector<ConvergenceSweepRow> u = {{1, 9.0, 0}, {2, 4.0, 0}, {8, 2.0, 0}, {32, 5.0, 0}};
    CHECK(pick_partition_count(u) == 8);
    std::vector<ConvergenceSweepRow> mono = {{1, 9.0, 0}, {2, 7.0, 0}, {4, 5.0, 0}};
    CHECK(pick_partition_count(mono) == 4);
    std::vector<ConvergenceSweepRow> flat = {{1, 3.0, 0}, {2, 3.0, 0}, {4, 3.0, 0}};
    CHECK(pick_partition_count(flat) == 1);
    CHECK_THROWS_AS(pick_partition_count({}), StructuralError);
}

TEST_CASE("reference sweep: means fall to a minimum at 8 partitions then climb") {
    auto t = reference();
    auto model = ConvergenceModel::calibrated();
    const int counts[] = {1, 2, 4, 8, 16, 32};
    auto sweep = sweep_partitions(t, counts, 100, model, 2026, 4);
    REQUIRE(sweep.aggregate.size() == 6);
    for (int i = 0; i < 3; ++i)
        CHECK(sweep.aggregate[i].mean_s > sweep.aggregate[i + 1].mean_s);
    for (int i = 3; i < 5; ++i)
        CHECK(sweep.aggregate[i].mean_s < sweep.aggregate[i + 1].mean_s);
    CHECK(pick_partition_count(sweep.aggregate) == 8);
}
