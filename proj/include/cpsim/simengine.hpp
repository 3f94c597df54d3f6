#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpsim/commgraph.hpp"
#include "cpsim/convergence.hpp"
#include "cpsim/placement.hpp"
#include "cpsim/topology.hpp"

namespace cpsim {

enum class PriorityClass : int { real_time = 0, latency_sensitive = 1, compute_intensive = 2 };

PriorityClass priority_class_from_string(const std::string& name);
std::string to_string(PriorityClass c);

struct ServiceTime {
    enum class Kind { fixed, exponential };
    Kind kind = Kind::fixed;
    double mean_ms = 0.0;
};

struct AppModel {
    std::string app_id;
    ServiceTime service;
    double cpu_demand = 0.0;
    std::int64_t mem_demand = 0;
    PriorityClass priority_class = PriorityClass::latency_sensitive;
};

struct PlacementEntry {
    std::string app;
    int partition = 0;
    int server = 0;
};

/// How long one route-recompute activation holds its server: an explicit
/// duration, or derived from the convergence model at a partition count.
struct DjActivation {
    std::optional<double> milliseconds;
    std::optional<int> partition_count;
};

struct SimScenario {
    std::string name;
    ServerSpec servers;
    int modeled_partitions = 1;
    std::vector<AppModel> apps;
    std::vector<std::string> pipeline; // packet-in stage order, e.g. FW then RL
    std::string heartbeat_app = "HB";
    std::string compute_app = "DJ";
    std::vector<PlacementEntry> placement;
    double packet_in_rate = 0.0;      // events/s, Poisson, split across partitions
    double heartbeat_rate = 0.0;      // per second per partition, periodic
    double heartbeat_deadline_ms = 100.0;
    double link_failure_interval_s = 0.0; // 0 disables recompute activations
    DjActivation dj_activation;
    FatTreeParams topology;
    ConvergenceModel convergence = ConvergenceModel::calibrated();
    double cross_server_hop_ms = 0.5;
    bool prioritization = true;
    double duration_s = 60.0;
    double warmup_fraction = 0.1;
    std::uint64_t seed = 1;

    /// Slices (apps x partitions), pipeline edges, and one packet event
    /// path per partition; demands come from the app models.
    CommGraph build_graph() const;
    Placement build_placement(const CommGraph& graph) const;
    double dj_activation_s() const;
    const AppModel* find_app(const std::string& id) const;
};

struct LatencyQuantiles {
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double p99_ms = 0.0;
    std::uint64_t count = 0;
};

struct ServerStats {
    double utilization = 0.0;    // busy fraction of the measured window
    double mean_queue_len = 0.0; // time-averaged jobs in system
    double arrival_rate = 0.0;   // jobs/s entering during the window
    double mean_sojourn_s = 0.0; // enqueue to completion at this station
};

struct SimMetrics {
    double throughput = 0.0; // completed packet pipelines per second
    LatencyQuantiles packet_latency;
    LatencyQuantiles heartbeat_latency;
    LatencyQuantiles compute_latency;
    std::uint64_t heartbeats_measured = 0;
    std::uint64_t heartbeats_missed = 0;
    double heartbeat_miss_fraction = 0.0;
    std::vector<ServerStats> servers;
    std::uint64_t priority_violations = 0;
    double busy_seconds_total = 0.0;    // across servers, inside the window
    double service_seconds_total = 0.0; // service demand completed inside the window

    std::vector<double> packet_samples_ms;
    std::vector<double> heartbeat_samples_ms;
    std::vector<double> compute_samples_ms;
};

/// Deterministic event-driven run. Each server is a queueing station:
/// per-class queues dispatched highest class first when prioritization is
/// on, one FIFO when off; service is never interrupted mid-event.
/// Recompute activations take the server at the next dispatch boundary
/// and hold it for the activation time, which is what starves co-located
/// work. Refuses infeasible placements.
SimMetrics run(const SimScenario& scenario);

/// One run per offered rate with per-rate derived seeds.
std::vector<std::pair<double, double>> saturation_sweep(const SimScenario& base,
                                                        std::span<const double> rates,
                                                        int jobs = 1);

struct DemandRow {
    std::string app;
    int partition_count = 0; // 0 = independent of partitioning
    double cpu = 0.0;
    std::int64_t mem_bytes = 0;
};

/// Calibrated per-app demand table used to build placement instances.
/// Route recompute demand is the model's compute term at each partition
/// count divided by the failure interval; the rest are fixed operating
/// points of the reference controller.
std::vector<DemandRow> profile_demands(const FatTreeParams& topo, const ConvergenceModel& model,
                                       double failure_interval_s,
                                       std::span<const int> partition_counts);

} // namespace cpsim
