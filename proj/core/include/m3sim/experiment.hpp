#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "m3sim/config.hpp"
#include "m3sim/parallel.hpp"

namespace m3sim {

struct ExperimentTiming {
    double simulation_s = 0.0;  // event loop, model evaluation, per-model series export
    double analysis_s = 0.0;    // multi-model, meta-model, exports, scoring, migration, plots
    double total_s() const { return simulation_s + analysis_s; }
    /// analysis / simulation
    double overhead_ratio() const { return simulation_s > 0 ? analysis_s / simulation_s : 0.0; }
};

struct AccuracyRow {
    std::string model_id;  // "M" for the meta-model
    double mape = 0.0;
};

struct ExperimentOutcome {
    std::vector<std::filesystem::path> artifacts;  // relative to output_dir, in write order
    std::vector<AccuracyRow> accuracy;             // empty without ground truth
    ExperimentTiming timing;
    std::size_t raw_samples = 0;
    std::size_t windowed_samples = 0;
};

/// Simulate, then assemble the multi-model, derive and export the
/// meta-model, score against ground truth, assess migration, and plot.
/// Files written: <model>.<metric>.csv per model, multimodel.csv,
/// meta.csv (or meta.m3ts), timeseries.svg, totals.svg (cumulative metrics),
/// accuracy.csv (ground truth), migration.csv (migration block), manifest.json.
/// On failure every file written so far is removed and the error rethrown.
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::size_t threads = thread_limit());

std::string format_timing(const ExperimentTiming& timing);

}  // namespace m3sim
