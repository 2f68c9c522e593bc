#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "m3sim/meta_model.hpp"
#include "m3sim/multi_model.hpp"
#include "m3sim/simulation.hpp"

namespace m3sim {

/// Resolves one model reference: an archive id ("M1".."M18") or an inline
/// spec given as JSON text `{"kind":..,"p_idle":..,"p_max":..,"r"?,"alpha"?,"id"?}`.
NamedModel parse_model_ref(std::string_view json_text, std::size_t position = 0);

/// Scenario JSON:
///   {"hosts": [{"cores": 32, "count"?: 4, "id"?, "core_speed"?, "memory"?}],
///    "workload": "<csv path>", "sample_step": 30,
///    "models": ["M1", {"kind": "linear", "p_idle": 32, "p_max": 180}],
///    "carbon"?: {"path": "<csv>", "location": "NL"},
///    "failures"?: {"rate_per_host_per_hour": .., "downtime_mean_s": ..,
///                  "forced"?: [{"host": 0, "time": 1800, "downtime": 600}]},
///    "seed": 7}
/// Relative paths resolve against `base_dir`. Referenced files are loaded
/// (and so validated) immediately.
SimScenario parse_scenario_config(std::string_view json_text, const std::filesystem::path& base_dir);
SimScenario load_scenario_config(const std::filesystem::path& path);

struct AnalysisConfig {
    Metric metric = Metric::Power;
    WindowSpec window;
    MetaSpec meta;
};

struct MigrationConfig {
    std::filesystem::path carbon_dir;
    std::vector<Seconds> granularities{900, 3600, 14400, 28800, 86400};
};

struct ExperimentConfig {
    SimScenario scenario;
    AnalysisConfig analysis;
    std::optional<std::filesystem::path> ground_truth;
    std::optional<MigrationConfig> migration;
    std::filesystem::path output_dir;
    SeriesFormat export_format = SeriesFormat::Csv;
};

/// Experiment JSON:
///   {"scenario": {..} | "<scenario json path>",
///    "analysis"?: {"metric": "power|energy|co2", "window": 10,
///                  "agg": "mean|median", "quorum": "all" | 3},
///    "ground_truth"?: "<series path>",
///    "migration"?: {"carbon_dir": "<dir>", "granularities": ["15m", "1h"]},
///    "export_format"?: "csv|columnar_binary",
///    "output_dir": "<dir>"}
ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace m3sim
