#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "m3sim/simulation.hpp"
#include "m3sim/time_series.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

// Synthetic stand-ins for production traces, used by tests, benchmarks, the
// `gen` subcommand and the reference scenario. All generators are pure
// functions of their spec (including the seed).

enum class ArrivalPattern {
    Uniform,
    Diurnal,  // arrival density follows a 24 h sine, peaking mid-day
};

struct WorkloadGenSpec {
    std::size_t tasks = 100;
    Seconds start = 0;
    Seconds horizon = 7 * 86400;  // submits fall in [start, start + horizon)
    ArrivalPattern arrivals = ArrivalPattern::Diurnal;
    int min_cores = 1;
    int max_cores = 4;
    Seconds min_duration = 600;
    Seconds max_duration = 4 * 3600;
    Seconds fragment = 300;  // utilization changes every `fragment` seconds
    double mean_utilization = 0.6;
    double utilization_jitter = 0.2;  // uniform +/- around the mean, clamped to [0, 1]
    /// If set, every task completes by start + horizon on an uncontended fleet.
    bool clip_to_horizon = false;
    std::uint64_t seed = 1;
};

WorkloadTrace generate_workload(const WorkloadGenSpec& spec);

struct CarbonGenSpec {
    std::string location = "NL";
    Seconds start = 0;
    Seconds step = kDefaultCarbonStep;
    std::size_t samples = 96;
    double base = 300.0;       // g/kWh
    double amplitude = 100.0;  // diurnal swing
    double phase_hours = 0.0;
    double noise = 10.0;  // stddev of additive Gaussian noise
    std::uint64_t seed = 1;
};

CarbonTrace generate_carbon(const CarbonGenSpec& spec);

/// Smooth diurnal power curve base + amplitude * sin(2 pi t / 24 h), strictly positive.
TimeSeries diurnal_power_curve(std::size_t samples, Seconds step, double base, double amplitude);

/// Large-scale scenario: `samples` power samples at `step` seconds, `hosts`
/// 32-core hosts, diurnal jobs with per-step utilization fragments, and the
/// eight archive models in the E2 subset (M1, M3, M5, M7, M10, M13, M16, M18).
/// A background task spans the whole horizon so the run yields exactly
/// `samples` samples.
SimScenario reference_scenario(std::size_t samples = 201600, Seconds step = 30,
                               std::size_t hosts = 16, std::uint64_t seed = 42);

/// The archive's E2 subset as named models, ids M*.
std::vector<NamedModel> experiment2_models();

}  // namespace m3sim
