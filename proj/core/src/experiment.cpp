#include "m3sim/experiment.hpp"

#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "m3sim/accuracy.hpp"
#include "m3sim/error.hpp"
#include "m3sim/meta_model.hpp"
#include "m3sim/migration.hpp"
#include "m3sim/multi_model.hpp"
#include "m3sim/svg_plot.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "cli-report";
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

/// Tracks written files so a failed run leaves nothing behind.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}
    ArtifactWriter(const ArtifactWriter&) = delete;
    ArtifactWriter& operator=(const ArtifactWriter&) = delete;

    ~ArtifactWriter() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) std::filesystem::remove(dir_ / p, ec);
        if (created_dir_) std::filesystem::remove(dir_, ec);
    }

    void prepare() {
        std::error_code ec;
        if (!std::filesystem::exists(dir_, ec)) {
            if (!std::filesystem::create_directories(dir_, ec) || ec) {
                throw RuntimeError(kModule, "cannot create output directory " + dir_.string());
            }
            created_dir_ = true;
        }
    }

    /// Runs `write` for dir/name, attributing failures to the artifact.
    template <typename Fn>
    void write(const std::filesystem::path& name, Fn&& fn) {
        const auto full = dir_ / name;
        written_.push_back(name);
        try {
            fn(full);
        } catch (const Error& e) {
            throw Error(e.kind(), e.module(), std::string(e.what()) + " [artifact " + full.string() + "]");
        }
    }

    void text(const std::filesystem::path& name, const std::string& contents) {
        write(name, [&](const std::filesystem::path& p) { write_file(p, contents, kModule); });
    }

    void commit() { committed_ = true; }
    const std::vector<std::filesystem::path>& written() const { return written_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
    bool created_dir_ = false;
    bool committed_ = false;
};

const TimeSeries& metric_series(const ModelOutput& out, Metric metric) {
    switch (metric) {
        case Metric::Power: return out.power;
        case Metric::EnergyCumulative: return out.energy;
        case Metric::Co2Cumulative: return *out.co2;
    }
    return out.power;
}

TimeSeries ground_truth_on_grid(const TimeSeries& truth, const MultiModel& mm, Seconds raw_step) {
    if (truth.start_time != mm.start_time) {
        throw ValidationError(kModule, "ground truth starts at " + std::to_string(truth.start_time) +
                                           " but the simulation starts at " + std::to_string(mm.start_time));
    }
    if (truth.step == mm.step) return truth;
    if (truth.step == raw_step) return window(truth, mm.window);
    throw ValidationError(kModule, "ground truth step " + std::to_string(truth.step) +
                                       " s matches neither the sample step nor the windowed step");
}

}  // namespace

std::string format_timing(const ExperimentTiming& t) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "simulation: %.3f s\nanalysis:   %.3f s\ntotal:      %.3f s\noverhead:   %.1f %% of simulation\n",
                  t.simulation_s, t.analysis_s, t.total_s(), 100.0 * t.overhead_ratio());
    return buf;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::size_t threads) {
    ExperimentOutcome outcome;
    ArtifactWriter out(config.output_dir);
    out.prepare();
    const Metric metric = config.analysis.metric;
    const std::string metric_name(to_string(metric));

    // Simulate first.
    const auto sim_start = Clock::now();
    const SimResult result = run_scenario(config.scenario, threads);
    for (const auto& m : result.per_model) {
        out.write(m.model_id + "." + metric_name + ".csv", [&](const std::filesystem::path& p) {
            write_series(metric_series(m, metric), p, SeriesFormat::Csv);
        });
    }
    outcome.timing.simulation_s = seconds_since(sim_start);
    outcome.raw_samples = result.per_model.front().power.size();

    // Compute later.
    const auto analysis_start = Clock::now();
    const MultiModel mm = assemble(result, metric, config.analysis.window);
    outcome.windowed_samples = mm.members.front().series.size();
    out.write("multimodel.csv", [&](const std::filesystem::path& p) { write_multimodel(mm, p); });

    const MetaModel meta = build_meta_model(mm, config.analysis.meta);
    const bool binary = config.export_format == SeriesFormat::ColumnarBinary;
    out.write(binary ? "meta.m3ts" : "meta.csv", [&](const std::filesystem::path& p) {
        export_meta_model(meta, p, config.export_format);
    });

    std::optional<TimeSeries> truth;
    if (config.ground_truth) {
        truth = ground_truth_on_grid(read_series(*config.ground_truth), mm, config.scenario.sample_step);
        std::string csv = "model,mape_percent\n";
        for (const auto& m : mm.members) {
            outcome.accuracy.push_back({m.model_id, mape(*truth, m.series)});
        }
        outcome.accuracy.push_back({"M", mape(*truth, meta.series)});
        for (const auto& row : outcome.accuracy) csv += row.model_id + "," + format_double(row.mape) + "\n";
        out.text("accuracy.csv", csv);
    }

    if (config.migration) {
        // Energy meta-model on the raw grid drives per-location assessment and migration.
        const MultiModel energy_mm = assemble(result, Metric::EnergyCumulative, WindowSpec{1});
        const MetaModel energy_meta = build_meta_model(energy_mm, config.analysis.meta);
        std::vector<CarbonTrace> traces;
        for (auto& [loc, trace] : load_carbon_dir(config.migration->carbon_dir)) traces.push_back(std::move(trace));
        const auto locations = assess_locations(energy_meta.series, traces);
        std::vector<MigrationPlan> plans;
        for (Seconds g : config.migration->granularities) {
            plans.push_back(migrate_at_granularity(energy_meta.series, traces, g));
        }
        out.write("migration.csv", [&](const std::filesystem::path& p) {
            write_migration_report(locations, plans, p);
        });
    }

    PlotOptions plot;
    plot.title = "Multi-Model and Meta-Model (" + metric_name + ")";
    out.text("timeseries.svg", plot_timeseries(mm, meta, truth ? &*truth : nullptr, plot));
    if (is_cumulative(metric)) {
        plot.title = "Cumulative totals (" + metric_name + ")";
        out.text("totals.svg", plot_totals(mm, meta, plot));
    }

    nlohmann::ordered_json manifest;
    manifest["metric"] = metric_name;
    manifest["window"] = config.analysis.window.size;
    manifest["meta_agg"] = std::string(to_string(config.analysis.meta.agg));
    manifest["quorum"] = config.analysis.meta.quorum ? nlohmann::ordered_json(*config.analysis.meta.quorum)
                                                     : nlohmann::ordered_json("all");
    manifest["seed"] = config.scenario.seed;
    manifest["models"] = nlohmann::ordered_json::array();
    for (const auto& m : mm.members) manifest["models"].push_back(m.model_id);
    manifest["sample_step_s"] = config.scenario.sample_step;
    manifest["raw_samples"] = outcome.raw_samples;
    manifest["windowed_samples"] = outcome.windowed_samples;
    manifest["meta_samples"] = meta.series.size();
    manifest["makespan_s"] = result.makespan;
    manifest["completed_tasks"] = result.completed_tasks;
    manifest["rerun_count"] = result.rerun_count;
    manifest["failures"] = result.failures.size();
    manifest["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& p : out.written()) {
        std::error_code ec;
        manifest["artifacts"].push_back({{"name", p.generic_string()},
                                         {"bytes", std::filesystem::file_size(out.dir() / p, ec)}});
    }
    out.text("manifest.json", manifest.dump(2) + "\n");
    outcome.timing.analysis_s = seconds_since(analysis_start);

    outcome.artifacts = out.written();
    out.commit();
    return outcome;
}

}  // namespace m3sim
