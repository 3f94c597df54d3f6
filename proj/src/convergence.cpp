#include "cpsim/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "cpsim/errors.hpp"
#include "cpsim/util.hpp"

namespace cpsim {

ConvergenceModel ConvergenceModel::calibrated() {
    ConvergenceModel m;
    const double n4 = 2560.0 / 4.0;
    m.compute_coeff_s = 0.25 * 10.0 / (n4 * std::log2(n4));
    m.advert_latency_s = 0.25;
    return m;
}

double ConvergenceModel::local_compute_s(int switch_count) const {
    if (switch_count <= 1) return 0.0;
    const double n = static_cast<double>(switch_count);
    return compute_coeff_s * n * std::log2(n);
}

ConvergenceSample measure_convergence(const FatTree& topo, const PodPartitioning& partitioning,
                                      const LinkFailure& failure, const ConvergenceModel& model) {
    if (failure.link_id < 0 || failure.link_id >= static_cast<int>(topo.links().size()))
        throw StructuralError("failure references unknown link");
    if (!topo.link_up(failure.link_id))
        throw StructuralError("failure on a link that is already down");

    const int parts = partitioning.partition_count();
    ConvergenceSample sample;
    sample.partition_count = parts;
    sample.failure = failure;

    double max_compute = 0.0;
    for (int p = 0; p < parts; ++p)
        max_compute = std::max(max_compute, model.local_compute_s(partitioning.switches_in(p)));

    if (parts == 1) {
        sample.compute_s = max_compute;
        sample.comm_s = 0.0;
    } else if (failure.kind == LinkKind::border) {
        sample.compute_s = max_compute;
        sample.comm_s = model.border_rounds * model.advert_latency_s * (parts - 1);
    } else {
        // owner converges locally, advertises new costs, everyone else
        // recomputes in parallel
        const int owner = partitioning.owner_of_failure(topo, failure);
        double max_other = 0.0;
        for (int p = 0; p < parts; ++p)
            if (p != owner)
                max_other =
                    std::max(max_other, model.local_compute_s(partitioning.switches_in(p)));
        sample.compute_s = model.local_compute_s(partitioning.switches_in(owner)) + max_other;
        sample.comm_s = model.local_rounds * model.advert_latency_s * (parts - 1);
    }
    sample.total_s = sample.compute_s + sample.comm_s;
    return sample;
}

ConvergenceSweep sweep_partitions(const FatTree& topo, std::span<const int> partition_counts,
                                  int failures_per_count, const ConvergenceModel& model,
                                  std::uint64_t seed, int jobs) {
    if (failures_per_count <= 0) throw StructuralError("failures_per_count must be positive");
    for (int p : partition_counts)
        PodPartitioning::make(topo, p); // validates every count before any work

    auto run_count = [&](int p) {
        const PodPartitioning partitioning = PodPartitioning::make(topo, p);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
        FatTree local = topo; // private link state per task
        std::vector<ConvergenceSample> out;
        out.reserve(failures_per_count);
        for (int i = 0; i < failures_per_count; ++i) {
            // independent outages: fail, measure, restore
            LinkFailure failure = local.sample_link_failure(rng);
            out.push_back(measure_convergence(local, partitioning, failure, model));
            local.fail_link(failure.link_id);
            local.restore_link(failure.link_id);
        }
        return out;
    };

    std::vector<std::vector<ConvergenceSample>> per_count(partition_counts.size());
    if (jobs > 1) {
        std::vector<std::future<std::vector<ConvergenceSample>>> futures;
        futures.reserve(partition_counts.size());
        for (int p : partition_counts)
            futures.push_back(std::async(std::launch::async, run_count, p));
        for (std::size_t i = 0; i < futures.size(); ++i) per_count[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < partition_counts.size(); ++i)
            per_count[i] = run_count(partition_counts[i]);
    }

    ConvergenceSweep sweep;
    for (std::size_t i = 0; i < partition_counts.size(); ++i) {
        std::vector<double> totals;
        totals.reserve(per_count[i].size());
        for (const auto& s : per_count[i]) {
            sweep.samples.push_back(s);
            totals.push_back(s.total_s);
        }
        sweep.aggregate.push_back(
            {partition_counts[i], mean_of(totals), quantile(totals, 0.95)});
    }
    return sweep;
}

int pick_partition_count(std::span<const ConvergenceSweepRow> rows) {
    if (rows.empty()) throw StructuralError("cannot pick from an empty sweep");
    int best = rows[0].partition_count;
    double best_mean = rows[0].mean_s;
    for (const auto& r : rows) {
        if (r.mean_s < best_mean ||
            (r.mean_s == best_mean && r.partition_count < best)) {
            best = r.partition_count;
            best_mean = r.mean_s;
        }
    }
    return best;
}

} // namespace cpsim
