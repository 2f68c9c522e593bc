#include "m3sim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "m3sim/error.hpp"
#include "m3sim/rng.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "synth";
constexpr double kDay = 86400.0;

Seconds draw_submit(Rng& rng, const WorkloadGenSpec& spec) {
    const auto span = static_cast<double>(spec.horizon);
    if (spec.arrivals == ArrivalPattern::Uniform) {
        return spec.start + static_cast<Seconds>(rng.uniform() * span);
    }
    // Rejection sampling against density (1 + 0.8 sin(2 pi (t / day - 0.25))) / 1.8.
    while (true) {
        const double t = rng.uniform() * span;
        const double density = 1.0 + 0.8 * std::sin(2.0 * std::numbers::pi * (t / kDay - 0.25));
        if (rng.uniform() * 1.8 < density) return spec.start + static_cast<Seconds>(t);
    }
}

}  // namespace

WorkloadTrace generate_workload(const WorkloadGenSpec& spec) {
    if (spec.tasks == 0) throw ValidationError(kModule, "need at least one task");
    if (spec.horizon <= 0 || spec.fragment <= 0) {
        throw ValidationError(kModule, "horizon and fragment must be positive");
    }
    if (spec.min_cores < 1 || spec.max_cores < spec.min_cores) {
        throw ValidationError(kModule, "bad core range");
    }
    if (spec.min_duration <= 0 || spec.max_duration < spec.min_duration) {
        throw ValidationError(kModule, "bad duration range");
    }
    Rng rng(spec.seed);
    std::vector<Task> tasks;
    tasks.reserve(spec.tasks);
    for (std::size_t i = 0; i < spec.tasks; ++i) {
        Task t;
        t.id = i;
        t.submit_time = draw_submit(rng, spec);
        t.cpu_count = static_cast<int>(rng.uniform_int(spec.min_cores, spec.max_cores));
        Seconds duration = rng.uniform_int(spec.min_duration, spec.max_duration);
        if (spec.clip_to_horizon) {
            duration = std::min(duration, spec.start + spec.horizon - t.submit_time);
            duration = std::max<Seconds>(duration, 1);
        }
        for (Seconds left = duration; left > 0; left -= spec.fragment) {
            const double u = spec.mean_utilization + rng.uniform(-1.0, 1.0) * spec.utilization_jitter;
            t.fragments.push_back({std::min(left, spec.fragment), std::clamp(u, 0.0, 1.0)});
        }
        tasks.push_back(std::move(t));
    }
    return WorkloadTrace(std::move(tasks));
}

CarbonTrace generate_carbon(const CarbonGenSpec& spec) {
    if (spec.samples == 0 || spec.step <= 0) throw ValidationError(kModule, "empty carbon trace");
    Rng rng(spec.seed);
    TimeSeries s{spec.start, spec.step, {}, Unit::GramCo2PerKwh};
    s.values.reserve(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        const double hours = static_cast<double>(s.timestamp(i)) / 3600.0;
        const double wave = std::sin(2.0 * std::numbers::pi * (hours - spec.phase_hours) / 24.0);
        const double v = spec.base + spec.amplitude * wave + rng.normal(0.0, spec.noise);
        s.values.push_back(std::max(0.0, v));
    }
    return CarbonTrace{spec.location, std::move(s)};
}

TimeSeries diurnal_power_curve(std::size_t samples, Seconds step, double base, double amplitude) {
    TimeSeries s{0, step, {}, Unit::Watt};
    s.values.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(s.timestamp(i));
        s.values.push_back(base + amplitude * std::sin(2.0 * std::numbers::pi * t / kDay));
    }
    return s;
}

std::vector<NamedModel> experiment2_models() {
    std::vector<NamedModel> out;
    for (const auto& e : builtin_archive().subset(ModelArchive::Experiment::E2)) {
        out.push_back({e.id, e.spec});
    }
    return out;
}

SimScenario reference_scenario(std::size_t samples, Seconds step, std::size_t hosts,
                               std::uint64_t seed) {
    const Seconds horizon = static_cast<Seconds>(samples) * step;
    WorkloadGenSpec gen;
    gen.horizon = std::max<Seconds>(step, horizon - 86400);
    // About 25% of fleet capacity busy on average, so queueing stays short.
    const double capacity = static_cast<double>(hosts) * 32.0;
    const double mean_task_core_s = 4.5 * ((600.0 + 8.0 * 3600.0) / 2.0);
    gen.tasks = std::max<std::size_t>(
        1, static_cast<std::size_t>(0.25 * capacity * static_cast<double>(horizon) / mean_task_core_s));
    gen.min_cores = 1;
    gen.max_cores = 8;
    gen.min_duration = 600;
    gen.max_duration = 8 * 3600;
    gen.fragment = step;
    gen.mean_utilization = 0.55;
    gen.utilization_jitter = 0.35;
    gen.clip_to_horizon = true;
    gen.seed = seed;

    auto tasks = generate_workload(gen).tasks();
    for (auto& t : tasks) t.id += 1;
    // Background monitor task pins the horizon.
    tasks.push_back(Task{0, 0, 1, {{horizon, 0.05}}});

    SimScenario s{{}, WorkloadTrace(std::move(tasks)), step, experiment2_models(), std::nullopt,
                  std::nullopt, seed};
    for (std::size_t h = 0; h < hosts; ++h) s.hosts.push_back(HostSpec{h, 32, 2100.0, 131072.0});
    return s;
}

}  // namespace m3sim
