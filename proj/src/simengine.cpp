#include "cpsim/simengine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <future>
#include <queue>

#include "cpsim/errors.hpp"
#include "cpsim/util.hpp"

namespace cpsim {

PriorityClass priority_class_from_string(const std::string& name) {
    if (name == "real_time") return PriorityClass::real_time;
    if (name == "latency_sensitive") return PriorityClass::latency_sensitive;
    if (name == "compute_intensive") return PriorityClass::compute_intensive;
    throw StructuralError("unknown priority class '" + name + "'");
}

std::string to_string(PriorityClass c) {
    switch (c) {
    case PriorityClass::real_time: return "real_time";
    case PriorityClass::latency_sensitive: return "latency_sensitive";
    default: return "compute_intensive";
    }
}

const AppModel* SimScenario::find_app(const std::string& id) const {
    for (const auto& a : apps)
        if (a.app_id == id) return &a;
    return nullptr;
}

double SimScenario::dj_activation_s() const {
    if (dj_activation.milliseconds) return *dj_activation.milliseconds / 1000.0;
    if (dj_activation.partition_count) {
        const FatTree topo = FatTree::build(topology);
        const PodPartitioning parts = PodPartitioning::make(topo, *dj_activation.partition_count);
        int largest = 0;
        for (int p = 0; p < parts.partition_count(); ++p)
            largest = std::max(largest, parts.switches_in(p));
        return convergence.local_compute_s(largest);
    }
    return 0.0;
}

CommGraph SimScenario::build_graph() const {
    std::vector<AppSlice> slices;
    for (int p = 0; p < modeled_partitions; ++p)
        for (const auto& a : apps) {
            double cpu = a.cpu_demand;
            if (a.app_id == compute_app && cpu == 0.0 && link_failure_interval_s > 0.0)
                cpu = dj_activation_s() / link_failure_interval_s;
            slices.push_back({a.app_id, p, cpu, a.mem_demand});
        }

    auto index_of = [&](const std::string& app, int p) {
        for (int i = 0; i < static_cast<int>(slices.size()); ++i)
            if (slices[i].app_id == app && slices[i].partition_id == p) return i;
        throw StructuralError("pipeline app '" + app + "' is not in the app list");
    };

    std::vector<CommEdge> edges;
    std::vector<EventPath> events;
    for (int p = 0; p < modeled_partitions; ++p) {
        EventPath ev;
        ev.event_id = "packet_in_" + std::to_string(p);
        ev.weight = 1.0;
        for (std::size_t s = 0; s + 1 < pipeline.size(); ++s) {
            const int from = index_of(pipeline[s], p);
            const int to = index_of(pipeline[s + 1], p);
            ev.edges.push_back(static_cast<int>(edges.size()));
            edges.push_back({from, to, cross_server_hop_ms});
        }
        if (!ev.edges.empty()) events.push_back(std::move(ev));
    }
    return CommGraph(std::move(slices), std::move(edges), std::move(events));
}

Placement SimScenario::build_placement(const CommGraph& graph) const {
    Placement result;
    result.assignment.assign(graph.slice_count(), -1);
    for (const auto& entry : placement) {
        const int idx = graph.slice_index(entry.app, entry.partition);
        if (idx < 0)
            throw StructuralError("placement entry for unknown slice (" + entry.app +
                                  ", partition " + std::to_string(entry.partition) + ")");
        result.assignment[idx] = entry.server;
    }
    for (int i = 0; i < graph.slice_count(); ++i)
        if (result.assignment[i] < 0)
            throw StructuralError("slice (" + graph.slices()[i].app_id + ", partition " +
                                  std::to_string(graph.slices()[i].partition_id) +
                                  ") has no placement entry");
    return result;
}

namespace {

struct Job {
    enum class Kind { packet, heartbeat, compute };
    Kind kind = Kind::packet;
    PriorityClass klass = PriorityClass::latency_sensitive;
    double origin_s = 0.0;  // entry into the system
    double enqueue_s = 0.0; // arrival at the current station
    double service_s = 0.0;
    int stage = 0;
    int partition = 0;
};

struct Station {
    std::deque<Job> urgent; // recompute activations; dispatched first
    std::array<std::deque<Job>, 3> classq;
    std::deque<Job> fifo;
    bool busy = false;
    Job in_service;
    double service_started_s = 0.0;

    int jobs_in_system = 0;
    double last_change_s = 0.0;
    double area_jobs = 0.0;
    double busy_seconds = 0.0;
    std::uint64_t arrivals = 0;
    double sojourn_sum_s = 0.0;
    std::uint64_t sojourn_count = 0;

    bool has_queued() const {
        if (!urgent.empty() || !fifo.empty()) return true;
        for (const auto& q : classq)
            if (!q.empty()) return true;
        return false;
    }
};

struct Event {
    double t = 0.0;
    std::uint64_t seq = 0;
    enum class Type { packet_gen, heartbeat_gen, activation_gen, stage_arrive, service_done } type;
    int server = -1;
    Job job;
};

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct Stage {
    int server = 0;
    ServiceTime service;
};

class Engine {
public:
    explicit Engine(const SimScenario& sc) : sc_(sc), rng_(sc.seed) {
        window_start_ = sc.warmup_fraction * sc.duration_s;
        window_end_ = sc.duration_s;

        graph_ = sc.build_graph();
        placement_ = sc.build_placement(graph_);
        const auto report = check_feasibility(graph_, sc.servers, placement_);
        if (!report.ok())
            throw InfeasibleError("scenario '" + sc.name + "' placement infeasible: " +
                                  report.describe());

        stations_.resize(sc.servers.count);
        stages_.resize(sc.modeled_partitions);
        hb_server_.assign(sc.modeled_partitions, -1);
        dj_server_.assign(sc.modeled_partitions, -1);
        for (int p = 0; p < sc.modeled_partitions; ++p) {
            for (const auto& app : sc.pipeline) {
                const auto* model = sc.find_app(app);
                if (!model) throw StructuralError("pipeline app '" + app + "' not defined");
                const int slice = graph_.slice_index(app, p);
                stages_[p].push_back({placement_.assignment[slice], model->service});
            }
            if (const int s = graph_.slice_index(sc.heartbeat_app, p); s >= 0)
                hb_server_[p] = placement_.assignment[s];
            if (const int s = graph_.slice_index(sc.compute_app, p); s >= 0)
                dj_server_[p] = placement_.assignment[s];
        }
        if (sc.heartbeat_rate > 0.0) {
            const auto* hb = sc.find_app(sc.heartbeat_app);
            if (!hb) throw StructuralError("heartbeat app not defined");
            hb_service_ = hb->service;
        }
        dj_activation_s_ = sc.dj_activation_s();
    }

    SimMetrics run() {
        if (sc_.duration_s <= 0.0) throw StructuralError("duration must be positive");
        if (sc_.packet_in_rate < 0.0 || sc_.heartbeat_rate < 0.0)
            throw StructuralError("rates must be nonnegative");

        if (sc_.packet_in_rate > 0.0)
            push({next_packet_time(0.0), seq_++, Event::Type::packet_gen, -1, {}});
        if (sc_.heartbeat_rate > 0.0)
            for (int p = 0; p < sc_.modeled_partitions; ++p) {
                Job j;
                j.partition = p;
                push({1.0 / sc_.heartbeat_rate, seq_++, Event::Type::heartbeat_gen, -1, j});
            }
        if (sc_.link_failure_interval_s > 0.0 && dj_activation_s_ > 0.0)
            push({sc_.link_failure_interval_s, seq_++, Event::Type::activation_gen, -1, {}});

        while (!heap_.empty()) {
            Event ev = heap_.top();
            if (ev.t > sc_.duration_s) break;
            heap_.pop();
            now_ = ev.t;
            handle(ev);
        }
        now_ = sc_.duration_s;
        return finalize();
    }

private:
    double next_packet_time(double t) {
        return t + rng_.exponential(1.0 / sc_.packet_in_rate);
    }

    double draw_service(const ServiceTime& st) {
        const double mean_s = st.mean_ms / 1000.0;
        if (st.kind == ServiceTime::Kind::exponential) return rng_.exponential(mean_s);
        return mean_s;
    }

    void push(Event ev) { heap_.push(std::move(ev)); }

    double window_overlap(double a, double b) const {
        return std::max(0.0, std::min(b, window_end_) - std::max(a, window_start_));
    }

    void touch_station(Station& st) {
        st.area_jobs += st.jobs_in_system * window_overlap(st.last_change_s, now_);
        st.last_change_s = now_;
    }

    void enqueue(int server, Job job) {
        Station& st = stations_[server];
        touch_station(st);
        ++st.jobs_in_system;
        job.enqueue_s = now_;
        if (now_ >= window_start_ && now_ < window_end_) ++st.arrivals;
        if (job.kind == Job::Kind::compute) {
            st.urgent.push_back(job);
        } else if (sc_.prioritization) {
            st.classq[static_cast<int>(job.klass)].push_back(job);
        } else {
            st.fifo.push_back(job);
        }
        dispatch(server);
    }

    void dispatch(int server) {
        Station& st = stations_[server];
        if (st.busy || !st.has_queued()) return;

        Job job;
        if (!st.urgent.empty()) {
            job = st.urgent.front();
            st.urgent.pop_front();
        } else if (sc_.prioritization) {
            for (auto& q : st.classq)
                if (!q.empty()) {
                    job = q.front();
                    q.pop_front();
                    break;
                }
            if (job.klass == PriorityClass::latency_sensitive &&
                !st.classq[static_cast<int>(PriorityClass::real_time)].empty())
                ++priority_violations_; // must not happen; tracked for the test suite
        } else {
            job = st.fifo.front();
            st.fifo.pop_front();
        }
        st.busy = true;
        st.in_service = job;
        st.service_started_s = now_;
        push({now_ + job.service_s, seq_++, Event::Type::service_done, server, {}});
    }

    void complete(int server) {
        Station& st = stations_[server];
        Job job = st.in_service;
        st.busy = false;
        st.busy_seconds += window_overlap(st.service_started_s, now_);
        service_seconds_ += window_overlap(st.service_started_s, now_);
        touch_station(st);
        --st.jobs_in_system;
        if (job.enqueue_s >= window_start_ && job.enqueue_s < window_end_) {
            st.sojourn_sum_s += now_ - job.enqueue_s;
            ++st.sojourn_count;
        }
        route(job);
        dispatch(server);
    }

    void route(Job job) {
        const bool measured = job.origin_s >= window_start_;
        switch (job.kind) {
        case Job::Kind::packet: {
            const auto& stages = stages_[job.partition];
            if (job.stage + 1 < static_cast<int>(stages.size())) {
                const int from = stages[job.stage].server;
                ++job.stage;
                job.service_s = draw_service(stages[job.stage].service);
                const int to = stages[job.stage].server;
                if (to == from) {
                    enqueue(to, job);
                } else {
                    push({now_ + sc_.cross_server_hop_ms / 1000.0, seq_++,
                          Event::Type::stage_arrive, to, job});
                }
            } else {
                if (now_ >= window_start_ && now_ <= window_end_) ++packets_completed_;
                if (measured)
                    metrics_.packet_samples_ms.push_back((now_ - job.origin_s) * 1000.0);
            }
            break;
        }
        case Job::Kind::heartbeat:
            if (measured) {
                const double sojourn_ms = (now_ - job.origin_s) * 1000.0;
                metrics_.heartbeat_samples_ms.push_back(sojourn_ms);
                ++metrics_.heartbeats_measured;
                if (sojourn_ms > sc_.heartbeat_deadline_ms) ++metrics_.heartbeats_missed;
            }
            break;
        case Job::Kind::compute:
            if (measured)
                metrics_.compute_samples_ms.push_back((now_ - job.origin_s) * 1000.0);
            break;
        }
    }

    void handle(const Event& ev) {
        switch (ev.type) {
        case Event::Type::packet_gen: {
            Job job;
            job.kind = Job::Kind::packet;
            job.klass = PriorityClass::latency_sensitive;
            job.origin_s = now_;
            job.partition = sc_.modeled_partitions == 1
                                ? 0
                                : static_cast<int>(rng_.next_below(
                                      static_cast<std::uint64_t>(sc_.modeled_partitions)));
            job.stage = 0;
            if (!stages_[job.partition].empty()) {
                job.service_s = draw_service(stages_[job.partition][0].service);
                enqueue(stages_[job.partition][0].server, job);
            }
            push({next_packet_time(now_), seq_++, Event::Type::packet_gen, -1, {}});
            break;
        }
        case Event::Type::heartbeat_gen: {
            const int p = ev.job.partition;
            if (hb_server_[p] >= 0) {
                Job job;
                job.kind = Job::Kind::heartbeat;
                job.klass = PriorityClass::real_time;
                job.origin_s = now_;
                job.partition = p;
                job.service_s = draw_service(hb_service_);
                enqueue(hb_server_[p], job);
            }
            Job marker;
            marker.partition = p;
            push({now_ + 1.0 / sc_.heartbeat_rate, seq_++, Event::Type::heartbeat_gen, -1,
                  marker});
            break;
        }
        case Event::Type::activation_gen: {
            for (int p = 0; p < sc_.modeled_partitions; ++p) {
                if (dj_server_[p] < 0) continue;
                Job job;
                job.kind = Job::Kind::compute;
                job.klass = PriorityClass::compute_intensive;
                job.origin_s = now_;
                job.partition = p;
                job.service_s = dj_activation_s_;
                enqueue(dj_server_[p], job);
            }
            push({now_ + sc_.link_failure_interval_s, seq_++, Event::Type::activation_gen, -1,
                  {}});
            break;
        }
        case Event::Type::stage_arrive:
            enqueue(ev.server, ev.job);
            break;
        case Event::Type::service_done:
            complete(ev.server);
            break;
        }
    }

    static LatencyQuantiles summarize(const std::vector<double>& samples_ms) {
        LatencyQuantiles q;
        q.count = samples_ms.size();
        if (!samples_ms.empty()) {
            q.p50_ms = quantile(samples_ms, 0.50);
            q.p95_ms = quantile(samples_ms, 0.95);
            q.p99_ms = quantile(samples_ms, 0.99);
        }
        return q;
    }

    SimMetrics finalize() {
        const double window = window_end_ - window_start_;
        metrics_.throughput = window > 0.0 ? packets_completed_ / window : 0.0;

        // heartbeats still stuck in a queue or in service count against the
        // deadline when they are already provably late
        auto count_stuck = [&](const Job& job) {
            if (job.kind != Job::Kind::heartbeat || job.origin_s < window_start_) return;
            if ((window_end_ - job.origin_s) * 1000.0 > sc_.heartbeat_deadline_ms) {
                ++metrics_.heartbeats_measured;
                ++metrics_.heartbeats_missed;
            }
        };
        for (const auto& st : stations_) {
            for (const auto& q : st.classq)
                for (const auto& j : q) count_stuck(j);
            for (const auto& j : st.fifo) count_stuck(j);
            for (const auto& j : st.urgent) count_stuck(j);
            if (st.busy) count_stuck(st.in_service);
        }
        metrics_.heartbeat_miss_fraction =
            metrics_.heartbeats_measured == 0
                ? 0.0
                : static_cast<double>(metrics_.heartbeats_missed) /
                      static_cast<double>(metrics_.heartbeats_measured);

        metrics_.packet_latency = summarize(metrics_.packet_samples_ms);
        metrics_.heartbeat_latency = summarize(metrics_.heartbeat_samples_ms);
        metrics_.compute_latency = summarize(metrics_.compute_samples_ms);

        for (auto& st : stations_) {
            touch_station(st);
            if (st.busy) {
                st.busy_seconds += window_overlap(st.service_started_s, now_);
                service_seconds_ += window_overlap(st.service_started_s, now_);
            }
            ServerStats s;
            s.utilization = window > 0.0 ? st.busy_seconds / window : 0.0;
            s.mean_queue_len = window > 0.0 ? st.area_jobs / window : 0.0;
            s.arrival_rate = window > 0.0 ? st.arrivals / window : 0.0;
            s.mean_sojourn_s =
                st.sojourn_count > 0 ? st.sojourn_sum_s / st.sojourn_count : 0.0;
            metrics_.busy_seconds_total += st.busy_seconds;
            metrics_.servers.push_back(s);
        }
        metrics_.service_seconds_total = service_seconds_;
        metrics_.priority_violations = priority_violations_;
        return std::move(metrics_);
    }

    const SimScenario& sc_;
    Rng rng_;
    CommGraph graph_;
    Placement placement_;
    std::vector<Station> stations_;
    std::vector<std::vector<Stage>> stages_; // per partition
    std::vector<int> hb_server_;
    std::vector<int> dj_server_;
    ServiceTime hb_service_;
    double dj_activation_s_ = 0.0;

    std::priority_queue<Event, std::vector<Event>, EventOrder> heap_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0;
    double window_start_ = 0.0;
    double window_end_ = 0.0;
    std::uint64_t packets_completed_ = 0;
    std::uint64_t priority_violations_ = 0;
    double service_seconds_ = 0.0;
    SimMetrics metrics_;
};

} // namespace

SimMetrics run(const SimScenario& scenario) {
    Engine engine(scenario);
    return engine.run();
}

std::vector<std::pair<double, double>> saturation_sweep(const SimScenario& base,
                                                        std::span<const double> rates,
                                                        int jobs) {
    for (std::size_t i = 0; i + 1 < rates.size(); ++i)
        if (rates[i + 1] <= rates[i])
            throw StructuralError("sweep rates must be positive ascending");
    if (!rates.empty() && rates[0] <= 0.0)
        throw StructuralError("sweep rates must be positive ascending");

    auto run_one = [&](std::size_t i) {
        SimScenario sc = base;
        sc.packet_in_rate = rates[i];
        sc.seed = derive_seed(base.seed, i);
        return run(sc).throughput;
    };

    std::vector<std::pair<double, double>> out(rates.size());
    if (jobs > 1) {
        std::vector<std::future<double>> futures;
        futures.reserve(rates.size());
        for (std::size_t i = 0; i < rates.size(); ++i)
            futures.push_back(std::async(std::launch::async, run_one, i));
        for (std::size_t i = 0; i < rates.size(); ++i) out[i] = {rates[i], futures[i].get()};
    } else {
        for (std::size_t i = 0; i < rates.size(); ++i) out[i] = {rates[i], run_one(i)};
    }
    return out;
}

std::vector<DemandRow> profile_demands(const FatTreeParams& topo, const ConvergenceModel& model,
                                       double failure_interval_s,
                                       std::span<const int> partition_counts) {
    if (failure_interval_s <= 0.0) throw StructuralError("failure interval must be positive");
    constexpr std::int64_t kMiB = 1024 * 1024;

    // fixed operating points of the reference controller at high load
    std::vector<DemandRow> rows;
    rows.push_back({"idle", 0, 0.15, 512 * kMiB});
    rows.push_back({"RL", 0, 0.45, 3840 * kMiB});
    rows.push_back({"FW", 0, 0.07, 1280 * kMiB});
    rows.push_back({"HB", 0, 0.03, 0});

    const FatTree tree = FatTree::build(topo);
    for (int p : partition_counts) {
        const PodPartitioning parts = PodPartitioning::make(tree, p);
        int largest = 0;
        for (int k = 0; k < parts.partition_count(); ++k)
            largest = std::max(largest, parts.switches_in(k));
        rows.push_back(
            {"DJ", p, model.local_compute_s(largest) / failure_interval_s, 6400 * kMiB});
    }
    return rows;
}

} // namespace cpsim
