#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpsim/topology.hpp"

namespace cpsim {

/// Cost model for distributed route recomputation after a link failure.
/// Local recompute over a partition of n switches costs
/// compute_coeff_s * n * log2(n); one advertisement round from a partition
/// to the other P-1 costs advert_latency_s per destination (serialized
/// sends, so the round grows linearly in P).
struct ConvergenceModel {
    double compute_coeff_s = 0.0;
    double advert_latency_s = 0.0;
    int border_rounds = 1;
    int local_rounds = 1;

    /// Default calibration, anchored to the reference 2560-switch fabric:
    /// a 4-way split spends 25% of one core on recompute at one failure
    /// per 10 s, and the advertisement constant sits between the compute
    /// slopes so the partition sweep bottoms out mid-range.
    static ConvergenceModel calibrated();

    double local_compute_s(int switch_count) const;
};

struct ConvergenceSample {
    int partition_count = 1;
    LinkFailure failure;
    double total_s = 0.0;
    double compute_s = 0.0;
    double comm_s = 0.0;
};

/// One failure, one measurement. A border (core link) failure is learned
/// by everyone in one broadcast round and all partitions recompute in
/// parallel. A local failure is recomputed by the owning partition first,
/// advertised, then the remaining partitions recompute in parallel.
ConvergenceSample measure_convergence(const FatTree& topo, const PodPartitioning& partitioning,
                                      const LinkFailure& failure, const ConvergenceModel& model);

struct ConvergenceSweepRow {
    int partition_count = 1;
    double mean_s = 0.0;
    double p95_s = 0.0;
};

struct ConvergenceSweep {
    std::vector<ConvergenceSample> samples; // grouped by partition count, sample order
    std::vector<ConvergenceSweepRow> aggregate;
};

/// Independent failure draws per partition count; per-count substreams are
/// derived from the seed so results do not depend on scheduling.
ConvergenceSweep sweep_partitions(const FatTree& topo, std::span<const int> partition_counts,
                                  int failures_per_count, const ConvergenceModel& model,
                                  std::uint64_t seed, int jobs = 1);

/// Partition count with the lowest mean convergence time, smaller count
/// on ties. Works on any curve shape.
int pick_partition_count(std::span<const ConvergenceSweepRow> rows);

} // namespace cpsim
