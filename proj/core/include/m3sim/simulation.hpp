#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "m3sim/parallel.hpp"
#include "m3sim/power_model.hpp"
#include "m3sim/time_series.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

/// A failure placed at a fixed time, bypassing the random process.
struct ForcedFailure {
    std::size_t host = 0;  // index into the id-sorted host list
    Seconds time = 0;
    Seconds downtime = 0;
};

/// Host failures: exponential inter-arrival per host (rate per hour) and
/// exponential downtime. A rate of 0 disables the random process. Tasks on a
/// failed host restart from scratch once rescheduled.
struct FailureSpec {
    double rate_per_host_per_hour = 1.0 / (30.0 * 24.0);
    double downtime_mean_s = 2.0 * 3600.0;
    std::vector<ForcedFailure> forced;
};

struct NamedModel {
    std::string id;
    PowerModelSpec spec;
};

struct SimScenario {
    std::vector<HostSpec> hosts;
    WorkloadTrace workload;
    Seconds sample_step = 30;
    std::vector<NamedModel> models;
    std::optional<CarbonTrace> carbon;
    std::optional<FailureSpec> failures;
    std::uint64_t seed = 0;
};

/// Throws ValidationError (module "sim-core") for an empty fleet or model
/// list, a non-positive step, bad failure parameters, or a task wider than
/// every host.
void validate(const SimScenario& scenario);

/// Piecewise-constant host load: from `start` until the next segment the host
/// runs `load` core-equivalents (sum over running tasks of cores x utilization).
struct LoadSegment {
    Seconds start = 0;
    double load = 0.0;
};

struct TaskRecord {
    std::uint64_t id = 0;
    std::size_t host = 0;  // host of the final, completed run
    Seconds start = 0;     // start of the final run
    Seconds finish = 0;
    std::size_t reruns = 0;
};

struct FailureRecord {
    std::size_t host = 0;
    Seconds time = 0;
    Seconds downtime = 0;
};

/// Model-independent outcome of the event loop. Every power model is
/// evaluated over this same timeline.
struct Timeline {
    Seconds start = 0;  // first submit time; sample grid origin
    Seconds step = 1;
    std::size_t samples = 0;  // ceil((last completion - start) / step), >= 1
    std::vector<HostSpec> hosts;  // sorted by id
    std::vector<std::vector<LoadSegment>> host_load;
    std::vector<TaskRecord> tasks;  // in workload order
    std::vector<FailureRecord> failures;
    Seconds first_start = 0;
    Seconds last_finish = 0;
    std::size_t rerun_count = 0;

    Seconds end() const noexcept { return start + static_cast<Seconds>(samples) * step; }
    /// Integral of load over time, summed over hosts.
    double busy_core_seconds() const;
};

/// Runs the discrete-event loop (single-threaded, deterministic in the seed).
Timeline simulate_timeline(const SimScenario& scenario);

/// Fleet power per sample: the exact mean of sum_h P(load_h / cores_h) over
/// each sample interval. Unit watt, length timeline.samples.
TimeSeries evaluate_power(const Timeline& timeline, const PowerModelSpec& model);

/// Cumulative watt-hours, left-rectangle rule: E[0] = 0,
/// E[i] = E[i-1] + P[i-1] * step / 3600. Length power.size() + 1.
TimeSeries integrate_energy(const TimeSeries& power);

/// Cumulative grams: C[0] = 0, C[i] = C[i-1] + (E[i] - E[i-1]) * I(t_{i-1}) / 1000
/// with I the zero-order-held intensity (g/kWh). Throws RuntimeError if the
/// carbon trace does not cover [energy start, energy last timestamp).
TimeSeries integrate_co2(const TimeSeries& energy, const CarbonTrace& carbon);

struct ModelOutput {
    std::string model_id;
    TimeSeries power;
    TimeSeries energy;
    std::optional<TimeSeries> co2;
};

struct SimResult {
    std::vector<ModelOutput> per_model;  // scenario model order
    Seconds makespan = 0;
    std::size_t completed_tasks = 0;
    std::size_t rerun_count = 0;
    std::vector<TaskRecord> tasks;
    std::vector<FailureRecord> failures;
};

/// Validates, runs the event loop once, then evaluates the k models in
/// parallel (up to `threads` workers). Output is identical for any thread count.
SimResult run_scenario(const SimScenario& scenario, std::size_t threads = thread_limit());

}  // namespace m3sim
