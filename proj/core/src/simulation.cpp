#include "m3sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "m3sim/error.hpp"
#include "m3sim/rng.hpp"
#include "m3sim/scheduler.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "sim-core";

enum class EventKind : int { Recover = 0, FragmentEnd = 1, Fail = 2 };

struct Event {
    Seconds time = 0;
    EventKind kind = EventKind::Recover;
    std::uint64_t seq = 0;
    std::size_t target = 0;  // task index for FragmentEnd, host index otherwise
    std::uint64_t generation = 0;
    bool forced = false;
    Seconds downtime = 0;
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.seq > b.seq;
    }
};

struct TaskState {
    bool running = false;
    bool done = false;
    std::size_t host = 0;
    Seconds run_start = 0;
    std::size_t fragment = 0;
    std::uint64_t generation = 0;
};

struct HostState {
    int free_cores = 0;
    bool up = true;
    std::set<std::size_t> running;
    std::uint64_t random_generation = 0;
};

Seconds draw_seconds(Rng& rng, double rate_per_second) {
    const double x = rng.exponential(rate_per_second);
    return std::max<Seconds>(1, static_cast<Seconds>(std::llround(x)));
}

class EventLoop {
public:
    explicit EventLoop(const SimScenario& s) : scenario_(s), tasks_(s.workload.tasks()) {}

    Timeline run();

private:
    void push(Event e) {
        e.seq = seq_++;
        heap_.push(e);
    }
    std::size_t first_positive_fragment(const Task& t, std::size_t from) const {
        while (from < t.fragments.size() && t.fragments[from].duration == 0) ++from;
        return from;
    }
    void start_task(std::size_t i, std::size_t h, Seconds now);
    void on_fragment_end(const Event& e, Seconds now);
    void on_fail(const Event& e, Seconds now);
    void on_recover(const Event& e, Seconds now);
    void schedule_random_failure(std::size_t h, Seconds now);
    void schedule(Seconds now);
    void record_loads(Seconds now);
    double host_load(std::size_t h) const;

    const SimScenario& scenario_;
    const std::vector<Task>& tasks_;
    Timeline tl_;
    std::vector<TaskState> state_;
    std::vector<HostState> hosts_;
    std::vector<Rng> host_rng_;
    std::set<std::size_t> pending_;
    std::set<std::size_t> dirty_;
    std::priority_queue<Event, std::vector<Event>, EventLater> heap_;
    std::uint64_t seq_ = 0;
    std::size_t completed_ = 0;
    double fail_rate_per_s_ = 0.0;
    double downtime_rate_per_s_ = 0.0;
    bool any_started_ = false;
};

double EventLoop::host_load(std::size_t h) const {
    double load = 0.0;
    for (std::size_t i : hosts_[h].running) {
        const Task& t = tasks_[i];
        load += t.cpu_count * t.fragments[state_[i].fragment].utilization;
    }
    return load;
}

void EventLoop::start_task(std::size_t i, std::size_t h, Seconds now) {
    const Task& t = tasks_[i];
    TaskState& st = state_[i];
    st.running = true;
    st.host = h;
    st.run_start = now;
    st.fragment = first_positive_fragment(t, 0);
    hosts_[h].free_cores -= t.cpu_count;
    hosts_[h].running.insert(i);
    dirty_.insert(h);
    if (!any_started_) {
        tl_.first_start = now;
        any_started_ = true;
    }
    push({now + t.fragments[st.fragment].duration, EventKind::FragmentEnd, 0, i, st.generation});
}

void EventLoop::on_fragment_end(const Event& e, Seconds now) {
    TaskState& st = state_[e.target];
    if (!st.running || st.generation != e.generation) return;
    const Task& t = tasks_[e.target];
    dirty_.insert(st.host);
    st.fragment = first_positive_fragment(t, st.fragment + 1);
    if (st.fragment < t.fragments.size()) {
        push({now + t.fragments[st.fragment].duration, EventKind::FragmentEnd, 0, e.target,
              st.generation});
        return;
    }
    st.running = false;
    st.done = true;
    HostState& host = hosts_[st.host];
    host.free_cores += t.cpu_count;
    host.running.erase(e.target);
    auto& rec = tl_.tasks[e.target];
    rec.host = st.host;
    rec.start = st.run_start;
    rec.finish = now;
    tl_.last_finish = std::max(tl_.last_finish, now);
    ++completed_;
}

void EventLoop::on_fail(const Event& e, Seconds now) {
    const std::size_t h = e.target;
    HostState& host = hosts_[h];
    if (!host.up) return;
    if (!e.forced && e.generation != host.random_generation) return;
    Seconds downtime = e.downtime;
    if (!e.forced) downtime = draw_seconds(host_rng_[h], downtime_rate_per_s_);

    host.up = false;
    ++host.random_generation;
    tl_.failures.push_back({h, now, downtime});
    for (std::size_t i : host.running) {
        TaskState& st = state_[i];
        st.running = false;
        ++st.generation;
        ++tl_.tasks[i].reruns;
        ++tl_.rerun_count;
        pending_.insert(i);
    }
    host.running.clear();
    host.free_cores = tl_.hosts[h].core_count;
    dirty_.insert(h);
    push({now + downtime, EventKind::Recover, 0, h, 0});
}

void EventLoop::on_recover(const Event& e, Seconds now) {
    HostState& host = hosts_[e.target];
    if (host.up) return;
    host.up = true;
    schedule_random_failure(e.target, now);
}

void EventLoop::schedule_random_failure(std::size_t h, Seconds now) {
    if (fail_rate_per_s_ <= 0.0) return;
    const Seconds at = now + draw_seconds(host_rng_[h], fail_rate_per_s_);
    push({at, EventKind::Fail, 0, h, hosts_[h].random_generation});
}

void EventLoop::schedule(Seconds now) {
    if (pending_.empty()) return;
    std::vector<HostSlot> slots(hosts_.size());
    int total_free = 0;
    for (std::size_t h = 0; h < hosts_.size(); ++h) {
        slots[h] = {hosts_[h].free_cores, hosts_[h].up};
        if (hosts_[h].up) total_free += hosts_[h].free_cores;
    }
    if (total_free == 0) return;
    // Each task needs at least one core, so no more than total_free + 1 can matter.
    std::vector<QueuedTask> queue;
    for (std::size_t i : pending_) {
        queue.push_back({i, tasks_[i].cpu_count});
        if (queue.size() > static_cast<std::size_t>(total_free)) break;
    }
    for (const auto& p : schedule_step(queue, slots)) {
        pending_.erase(p.task);
        start_task(p.task, p.host, now);
    }
}

void EventLoop::record_loads(Seconds now) {
    for (std::size_t h : dirty_) {
        auto& segs = tl_.host_load[h];
        const double load = host_load(h);
        if (segs.back().load == load) continue;
        if (segs.back().start == now) {
            segs.back().load = load;
            if (segs.size() >= 2 && segs[segs.size() - 2].load == load) segs.pop_back();
        } else {
            segs.push_back({now, load});
        }
    }
    dirty_.clear();
}

Timeline EventLoop::run() {
    tl_.hosts = scenario_.hosts;
    std::stable_sort(tl_.hosts.begin(), tl_.hosts.end(),
                     [](const HostSpec& a, const HostSpec& b) { return a.id < b.id; });
    tl_.step = scenario_.sample_step;
    tl_.start = tasks_.front().submit_time;
    tl_.tasks.resize(tasks_.size());
    for (std::size_t i = 0; i < tasks_.size(); ++i) tl_.tasks[i].id = tasks_[i].id;

    const std::size_t n_hosts = tl_.hosts.size();
    state_.resize(tasks_.size());
    hosts_.resize(n_hosts);
    tl_.host_load.resize(n_hosts);
    for (std::size_t h = 0; h < n_hosts; ++h) {
        hosts_[h].free_cores = tl_.hosts[h].core_count;
        host_rng_.emplace_back(Rng::mix(scenario_.seed, h));
    }

    Seconds origin = tl_.start;
    if (scenario_.failures) {
        const auto& f = *scenario_.failures;
        fail_rate_per_s_ = f.rate_per_host_per_hour / 3600.0;
        downtime_rate_per_s_ = 1.0 / f.downtime_mean_s;
        for (const auto& ff : f.forced) {
            push({ff.time, EventKind::Fail, 0, ff.host, 0, true, ff.downtime});
            origin = std::min(origin, ff.time);
        }
        for (std::size_t h = 0; h < n_hosts; ++h) schedule_random_failure(h, tl_.start);
    }
    for (std::size_t h = 0; h < n_hosts; ++h) tl_.host_load[h].push_back({origin, 0.0});

    std::size_t next_submit = 0;
    while (completed_ < tasks_.size()) {
        Seconds now = 0;
        const bool have_submit = next_submit < tasks_.size();
        if (heap_.empty() && !have_submit) {
            throw RuntimeError(kModule, "simulation stalled with " +
                                            std::to_string(pending_.size()) + " queued tasks");
        }
        if (heap_.empty()) {
            now = tasks_[next_submit].submit_time;
        } else if (!have_submit) {
            now = heap_.top().time;
        } else {
            now = std::min(heap_.top().time, tasks_[next_submit].submit_time);
        }

        while (!heap_.empty() && heap_.top().time == now) {
            const Event e = heap_.top();
            heap_.pop();
            switch (e.kind) {
                case EventKind::Recover: on_recover(e, now); break;
                case EventKind::FragmentEnd: on_fragment_end(e, now); break;
                case EventKind::Fail: on_fail(e, now); break;
            }
        }
        while (next_submit < tasks_.size() && tasks_[next_submit].submit_time == now) {
            pending_.insert(next_submit++);
        }
        schedule(now);
        record_loads(now);
    }

    const Seconds span = tl_.last_finish - tl_.start;
    tl_.samples = std::max<std::size_t>(1, static_cast<std::size_t>((span + tl_.step - 1) / tl_.step));
    return std::move(tl_);
}

}  // namespace

double Timeline::busy_core_seconds() const {
    double total = 0.0;
    const Seconds stop = end();
    for (const auto& segs : host_load) {
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const Seconds a = segs[k].start;
            const Seconds b = k + 1 < segs.size() ? segs[k + 1].start : stop;
            total += segs[k].load * static_cast<double>(std::max<Seconds>(0, b - a));
        }
    }
    return total;
}

void validate(const SimScenario& s) {
    if (s.hosts.empty()) throw ValidationError(kModule, "scenario has no hosts");
    if (s.models.empty()) throw ValidationError(kModule, "scenario has no power models");
    if (s.sample_step <= 0) throw ValidationError(kModule, "sample_step must be positive");
    int widest = 0;
    for (const auto& h : s.hosts) {
        if (h.core_count < 1) {
            throw ValidationError(kModule, "host " + std::to_string(h.id) + ": core_count must be >= 1");
        }
        widest = std::max(widest, h.core_count);
    }
    for (std::size_t i = 1; i < s.hosts.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (s.hosts[i].id == s.hosts[j].id) {
                throw ValidationError(kModule, "duplicate host id " + std::to_string(s.hosts[i].id));
            }
        }
    }
    for (const auto& t : s.workload.tasks()) {
        if (t.cpu_count > widest) {
            throw ValidationError(kModule, "task " + std::to_string(t.id) + " requests " +
                                               std::to_string(t.cpu_count) +
                                               " cores but the widest host has " +
                                               std::to_string(widest) + "; it can never be scheduled");
        }
    }
    if (s.failures) {
        const auto& f = *s.failures;
        if (!(f.rate_per_host_per_hour >= 0.0) || !std::isfinite(f.rate_per_host_per_hour)) {
            throw ValidationError(kModule, "failure rate must be >= 0");
        }
        if (f.rate_per_host_per_hour > 0.0 && (!(f.downtime_mean_s > 0.0) || !std::isfinite(f.downtime_mean_s))) {
            throw ValidationError(kModule, "failure downtime mean must be > 0");
        }
        for (const auto& ff : f.forced) {
            if (ff.host >= s.hosts.size()) throw ValidationError(kModule, "forced failure on unknown host");
            if (ff.downtime <= 0) throw ValidationError(kModule, "forced failure downtime must be > 0");
        }
    }
}

Timeline simulate_timeline(const SimScenario& scenario) {
    validate(scenario);
    return EventLoop(scenario).run();
}

TimeSeries evaluate_power(const Timeline& tl, const PowerModelSpec& model) {
    std::vector<double> joules(tl.samples, 0.0);
    const Seconds stop = tl.end();
    for (std::size_t h = 0; h < tl.hosts.size(); ++h) {
        const auto& segs = tl.host_load[h];
        const double cores = tl.hosts[h].core_count;
        for (std::size_t k = 0; k < segs.size(); ++k) {
            Seconds a = std::max(segs[k].start, tl.start);
            const Seconds b = std::min(k + 1 < segs.size() ? segs[k + 1].start : stop, stop);
            if (b <= a) continue;
            const double watts = model.power(segs[k].load / cores);
            auto bin = static_cast<std::size_t>((a - tl.start) / tl.step);
            while (a < b) {
                const Seconds bin_end = tl.start + static_cast<Seconds>(bin + 1) * tl.step;
                const Seconds e = std::min(bin_end, b);
                joules[bin] += watts * static_cast<double>(e - a);
                a = e;
                ++bin;
            }
        }
    }
    TimeSeries out{tl.start, tl.step, std::move(joules), Unit::Watt};
    const auto step = static_cast<double>(tl.step);
    for (double& v : out.values) v /= step;
    return out;
}

TimeSeries integrate_energy(const TimeSeries& power) {
    TimeSeries e{power.start_time, power.step, {}, Unit::WattHour};
    e.values.reserve(power.size() + 1);
    e.values.push_back(0.0);
    // Accumulate watt-seconds and convert per sample: one rounding fewer per
    // step, so constant draws land on exact watt-hour totals.
    const auto step = static_cast<double>(power.step);
    double acc = 0.0;
    for (double p : power.values) {
        acc += p * step;
        e.values.push_back(acc / 3600.0);
    }
    return e;
}

TimeSeries integrate_co2(const TimeSeries& energy, const CarbonTrace& carbon) {
    TimeSeries c{energy.start_time, energy.step, {}, Unit::GramCo2};
    if (energy.empty()) return c;
    const auto& cs = carbon.series;
    const Seconds horizon = energy.timestamp(energy.size() - 1);
    if (cs.empty() || cs.start_time > energy.start_time || cs.end_time() < horizon) {
        throw RuntimeError(kModule, "carbon trace '" + carbon.location +
                                        "' does not cover simulation horizon");
    }
    c.values.reserve(energy.size());
    c.values.push_back(0.0);
    double acc = 0.0;  // Wh x g/kWh
    for (std::size_t i = 1; i < energy.size(); ++i) {
        const double delta = energy.values[i] - energy.values[i - 1];
        acc += delta * value_at(cs, energy.timestamp(i - 1));
        c.values.push_back(acc / 1000.0);
    }
    return c;
}

SimResult run_scenario(const SimScenario& scenario, std::size_t threads) {
    const Timeline tl = simulate_timeline(scenario);

    SimResult result;
    result.per_model.resize(scenario.models.size());
    parallel_for(
        scenario.models.size(),
        [&](std::size_t m) {
            ModelOutput out;
            out.model_id = scenario.models[m].id;
            out.power = evaluate_power(tl, scenario.models[m].spec);
            out.energy = integrate_energy(out.power);
            if (scenario.carbon) out.co2 = integrate_co2(out.energy, *scenario.carbon);
            result.per_model[m] = std::move(out);
        },
        threads);

    result.makespan = tl.last_finish - tl.first_start;
    result.completed_tasks = tl.tasks.size();
    result.rerun_count = tl.rerun_count;
    result.tasks = tl.tasks;
    result.failures = tl.failures;
    return result;
}

}  // namespace m3sim
