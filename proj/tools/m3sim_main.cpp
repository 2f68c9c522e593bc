// m3sim: command-line front end for the simulation and analysis pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "m3sim/accuracy.hpp"
#include "m3sim/config.hpp"
#include "m3sim/error.hpp"
#include "m3sim/experiment.hpp"
#include "m3sim/meta_model.hpp"
#include "m3sim/migration.hpp"
#include "m3sim/multi_model.hpp"
#include "m3sim/rng.hpp"
#include "m3sim/synth.hpp"
#include "m3sim/traces.hpp"

namespace fs = std::filesystem;
using namespace m3sim;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "M2" < "M10": digit runs compare numerically.
bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            const auto na = std::stoull(a.substr(i, ie - i));
            const auto nb = std::stoull(b.substr(j, je - j));
            if (na != nb) return na < nb;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

Seconds duration_arg(const std::string& text, const char* what) {
    const auto d = parse_duration(text);
    if (!d) throw ValidationError("cli-report", std::string("bad ") + what + " '" + text + "'");
    return *d;
}

SeriesFormat format_arg(const std::string& name) {
    if (name == "csv") return SeriesFormat::Csv;
    if (name == "columnar_binary") return SeriesFormat::ColumnarBinary;
    throw ValidationError("cli-report", "format must be csv or columnar_binary");
}

const char* extension(SeriesFormat f) { return f == SeriesFormat::Csv ? ".csv" : ".m3ts"; }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeError("cli-report", "cannot create directory " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"m3sim: multi-model datacenter simulation and meta-model analysis"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write per-model series");
    std::string sim_config;
    std::string sim_out;
    std::string sim_format = "csv";
    simulate->add_option("--config", sim_config, "Scenario JSON")->required();
    simulate->add_option("--out", sim_out, "Output directory")->required();
    simulate->add_option("--format", sim_format, "csv | columnar_binary");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Assemble a multi-model from per-model series files");
    std::string an_in;
    std::string an_metric = "power";
    std::size_t an_window = 1;
    std::string an_out = "multimodel.csv";
    analyze->add_option("--in", an_in, "Directory with <model>.<metric>.csv files")->required();
    analyze->add_option("--metric", an_metric, "power | energy | co2");
    analyze->add_option("--window", an_window, "Window size m")->check(CLI::PositiveNumber);
    analyze->add_option("--out", an_out, "Multi-model bundle path");

    // metamodel
    auto* metamodel = app.add_subcommand("metamodel", "Aggregate a multi-model bundle into a meta-model");
    std::string mm_in = "multimodel.csv";
    std::string mm_agg = "median";
    std::string mm_quorum = "all";
    std::string mm_out = "meta.csv";
    metamodel->add_option("--in", mm_in, "Multi-model bundle");
    metamodel->add_option("--agg", mm_agg, "mean | median");
    metamodel->add_option("--quorum", mm_quorum, "'all' or minimum member count");
    metamodel->add_option("--out", mm_out, "Output series (.csv or .m3ts)");

    // score
    auto* score_cmd = app.add_subcommand("score", "Score a simulated series against ground truth");
    std::string sc_metric = "mape";
    std::string sc_real;
    std::string sc_sim;
    score_cmd->add_option("--metric", sc_metric, "mape | rmse | mae");
    score_cmd->add_option("--real", sc_real, "Ground-truth series")->required();
    score_cmd->add_option("--sim", sc_sim, "Simulated series")->required();

    // migrate
    auto* migrate = app.add_subcommand("migrate", "Per-location emissions and greedy CO2-aware migration");
    std::string mg_carbon_dir;
    std::string mg_granularity = "15m,1h,4h,8h,24h";
    std::string mg_energy;
    std::string mg_report = "migration.csv";
    int mg_year = 0;
    std::string mg_counts;
    migrate->add_option("--carbon-dir", mg_carbon_dir, "Directory of <location>.csv carbon traces")->required();
    migrate->add_option("--granularity", mg_granularity, "Comma-separated intervals, e.g. 15m,1h,24h");
    migrate->add_option("--energy", mg_energy, "Cumulative energy series (Wh)");
    migrate->add_option("--report", mg_report, "Report CSV");
    migrate->add_option("--year", mg_year, "Also tabulate monthly migration counts for this year");
    migrate->add_option("--counts", mg_counts, "Monthly counts CSV (with --year)");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run the full pipeline from an experiment config");
    std::string ex_config;
    std::string ex_timing;
    experiment->add_option("--config", ex_config, "Experiment JSON")->required();
    experiment->add_option("--timing", ex_timing, "Write the timing breakdown as JSON here");

    // gen
    auto* gen = app.add_subcommand("gen", "Synthetic workload, carbon, and reference-scenario generators");
    gen->require_subcommand(1);
    auto* gen_workload = gen->add_subcommand("workload", "Synthetic workload CSV");
    WorkloadGenSpec wspec;
    std::string gw_out;
    std::string gw_horizon = "7d";
    std::string gw_pattern = "diurnal";
    std::string gw_fragment = "300";
    std::string gw_min_dur = "600";
    std::string gw_max_dur = "4h";
    gen_workload->add_option("--tasks", wspec.tasks, "Number of tasks");
    gen_workload->add_option("--horizon", gw_horizon, "Submission window, e.g. 7d");
    gen_workload->add_option("--pattern", gw_pattern, "uniform | diurnal");
    gen_workload->add_option("--min-cores", wspec.min_cores);
    gen_workload->add_option("--max-cores", wspec.max_cores);
    gen_workload->add_option("--min-duration", gw_min_dur);
    gen_workload->add_option("--max-duration", gw_max_dur);
    gen_workload->add_option("--fragment", gw_fragment, "Utilization fragment length");
    gen_workload->add_option("--utilization", wspec.mean_utilization, "Mean per-core utilization");
    gen_workload->add_option("--jitter", wspec.utilization_jitter);
    gen_workload->add_option("--seed", wspec.seed);
    gen_workload->add_option("--out", gw_out)->required();

    auto* gen_carbon = gen->add_subcommand("carbon", "Synthetic carbon-intensity traces, one file per location");
    std::string gc_locations = "NL,DE,FR,CH";
    std::string gc_out_dir;
    std::string gc_days = "30d";
    std::int64_t gc_start = 0;
    std::uint64_t gc_seed = 1;
    gen_carbon->add_option("--locations", gc_locations, "Comma-separated location codes");
    gen_carbon->add_option("--span", gc_days, "Trace length, e.g. 30d");
    gen_carbon->add_option("--start", gc_start, "First timestamp (epoch seconds)");
    gen_carbon->add_option("--seed", gc_seed);
    gen_carbon->add_option("--out-dir", gc_out_dir)->required();

    auto* gen_ref = gen->add_subcommand("reference", "Large reference scenario (workload CSV + scenario JSON)");
    std::size_t gr_samples = 201600;
    std::int64_t gr_step = 30;
    std::size_t gr_hosts = 16;
    std::uint64_t gr_seed = 42;
    std::string gr_out_dir;
    gen_ref->add_option("--samples", gr_samples);
    gen_ref->add_option("--step", gr_step);
    gen_ref->add_option("--hosts", gr_hosts);
    gen_ref->add_option("--seed", gr_seed);
    gen_ref->add_option("--out-dir", gr_out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*simulate) {
            const auto scenario = load_scenario_config(sim_config);
            const auto fmt = format_arg(sim_format);
            const fs::path dir(sim_out);
            ensure_dir(dir);
            const auto result = run_scenario(scenario);
            for (const auto& m : result.per_model) {
                write_series(m.power, dir / (m.model_id + ".power" + extension(fmt)), fmt);
                write_series(m.energy, dir / (m.model_id + ".energy" + extension(fmt)), fmt);
                if (m.co2) write_series(*m.co2, dir / (m.model_id + ".co2" + extension(fmt)), fmt);
            }
            std::cout << "models: " << result.per_model.size() << "\n"
                      << "samples: " << result.per_model.front().power.size() << "\n"
                      << "makespan_s: " << result.makespan << "\n"
                      << "completed_tasks: " << result.completed_tasks << "\n"
                      << "reruns: " << result.rerun_count << "\n";
        } else if (*analyze) {
            const auto metric = parse_metric(an_metric);
            if (!metric) throw ValidationError("multi-model", "unknown metric '" + an_metric + "'");
            const std::string suffix = "." + std::string(to_string(*metric));
            std::vector<std::pair<std::string, fs::path>> files;
            std::error_code ec;
            if (!fs::is_directory(an_in, ec)) throw ValidationError("multi-model", "not a directory: " + an_in);
            for (const auto& entry : fs::directory_iterator(an_in)) {
                const auto stem = entry.path().stem().string();  // "<model>.<metric>"
                const auto ext = entry.path().extension().string();
                if ((ext == ".csv" || ext == ".m3ts") && stem.size() > suffix.size() &&
                    stem.ends_with(suffix)) {
                    files.emplace_back(stem.substr(0, stem.size() - suffix.size()), entry.path());
                }
            }
            if (files.empty()) {
                throw ValidationError("multi-model", "no *" + suffix + ".csv files in " + an_in);
            }
            std::sort(files.begin(), files.end(),
                      [](const auto& a, const auto& b) { return natural_less(a.first, b.first); });
            std::vector<MemberSeries> raw;
            for (const auto& [id, path] : files) raw.push_back({id, read_series(path)});
            const auto mm = assemble(std::move(raw), *metric, WindowSpec{an_window});
            write_multimodel(mm, an_out);
            std::cout << "members: " << mm.size() << "\nsamples: " << mm.members.front().series.size() << "\n";
        } else if (*metamodel) {
            const auto agg = parse_meta_agg(mm_agg);
            if (!agg) throw ValidationError("meta-model", "unknown aggregation '" + mm_agg + "'");
            MetaSpec spec{*agg, std::nullopt};
            if (mm_quorum != "all") {
                const bool digits = !mm_quorum.empty() &&
                                    std::all_of(mm_quorum.begin(), mm_quorum.end(),
                                                [](unsigned char c) { return std::isdigit(c) != 0; });
                if (!digits || std::stoull(mm_quorum) == 0) {
                    throw ValidationError("meta-model", "quorum must be 'all' or a positive integer");
                }
                spec.quorum = static_cast<std::size_t>(std::stoull(mm_quorum));
            }
            const auto mm = read_multimodel(mm_in);
            const auto meta = build_meta_model(mm, spec);
            export_meta_model(meta, mm_out, format_for_path(mm_out));
            std::cout << "members: " << meta.member_count << "\nsamples: " << meta.series.size() << "\n";
        } else if (*score_cmd) {
            const auto metric = parse_accuracy_metric(sc_metric);
            if (!metric) throw ValidationError("accuracy", "unknown metric '" + sc_metric + "'");
            const auto report = score(*metric, read_series(sc_real), read_series(sc_sim));
            std::cout << to_string(report.metric) << ": " << format_double(report.value)
                      << (report.metric == AccuracyMetric::Mape ? " %" : "") << "\nn: " << report.n << "\n";
        } else if (*migrate) {
            std::vector<CarbonTrace> traces;
            for (auto& [loc, t] : load_carbon_dir(mg_carbon_dir)) traces.push_back(std::move(t));
            std::vector<Seconds> grans;
            for (const auto& g : split_list(mg_granularity)) grans.push_back(duration_arg(g, "granularity"));
            if (!mg_energy.empty()) {
                const auto energy = read_series(mg_energy);
                const auto locations = assess_locations(energy, traces);
                std::vector<MigrationPlan> plans;
                for (Seconds g : grans) plans.push_back(migrate_at_granularity(energy, traces, g));
                write_migration_report(locations, plans, mg_report);
                for (const auto& p : plans) {
                    std::cout << format_duration(p.granularity) << ": migrations=" << p.migrations
                              << " total_co2_g=" << format_double(p.total_co2) << "\n";
                }
                std::cout << "best static: " << locations.front().location
                          << " total_co2_g=" << format_double(locations.front().total) << "\n";
            }
            if (mg_year != 0) {
                std::vector<unsigned> months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
                const auto table = migration_counts(traces, mg_year, months, grans);
                write_migration_counts(table, grans, mg_counts.empty() ? "migration_counts.csv" : mg_counts);
            }
            if (mg_energy.empty() && mg_year == 0) {
                throw ValidationError("carbon-migration", "need --energy and/or --year");
            }
        } else if (*experiment) {
            const auto config = load_experiment_config(ex_config);
            const auto outcome = run_experiment(config);
            std::cout << "output: " << config.output_dir.string() << "\n";
            for (const auto& a : outcome.artifacts) std::cout << "  " << a.generic_string() << "\n";
            for (const auto& row : outcome.accuracy) {
                std::cout << "mape " << row.model_id << ": " << format_double(row.mape) << " %\n";
            }
            std::cout << format_timing(outcome.timing);
            if (!ex_timing.empty()) {
                nlohmann::ordered_json t;
                t["simulation_s"] = outcome.timing.simulation_s;
                t["analysis_s"] = outcome.timing.analysis_s;
                t["total_s"] = outcome.timing.total_s();
                t["overhead_ratio"] = outcome.timing.overhead_ratio();
                t["raw_samples"] = outcome.raw_samples;
                write_file(ex_timing, t.dump(2) + "\n", "cli-report");
            }
        } else if (*gen_workload) {
            wspec.horizon = duration_arg(gw_horizon, "horizon");
            wspec.fragment = duration_arg(gw_fragment, "fragment");
            wspec.min_duration = duration_arg(gw_min_dur, "min-duration");
            wspec.max_duration = duration_arg(gw_max_dur, "max-duration");
            if (gw_pattern == "uniform") {
                wspec.arrivals = ArrivalPattern::Uniform;
            } else if (gw_pattern != "diurnal") {
                throw ValidationError("synth", "pattern must be uniform or diurnal");
            }
            write_workload(generate_workload(wspec), gw_out);
        } else if (*gen_carbon) {
            const fs::path dir(gc_out_dir);
            ensure_dir(dir);
            const Seconds span = duration_arg(gc_days, "span");
            std::uint64_t stream = 0;
            for (const auto& loc : split_list(gc_locations)) {
                CarbonGenSpec c;
                c.location = loc;
                c.start = gc_start;
                c.samples = static_cast<std::size_t>(span / c.step);
                c.seed = Rng::mix(gc_seed, stream++);
                Rng shape(c.seed);
                c.base = shape.uniform(50.0, 600.0);
                c.amplitude = shape.uniform(0.1, 0.5) * c.base;
                c.phase_hours = shape.uniform(0.0, 24.0);
                c.noise = 0.05 * c.base;
                write_carbon(generate_carbon(c), dir / (loc + ".csv"));
            }
        } else if (*gen_ref) {
            const fs::path dir(gr_out_dir);
            ensure_dir(dir);
            const auto s = reference_scenario(gr_samples, gr_step, gr_hosts, gr_seed);
            write_workload(s.workload, dir / "workload.csv");
            nlohmann::ordered_json j;
            j["hosts"] = {{{"cores", 32}, {"count", gr_hosts}, {"core_speed", 2100}, {"memory", 131072}}};
            j["workload"] = "workload.csv";
            j["sample_step"] = gr_step;
            j["models"] = nlohmann::ordered_json::array();
            for (const auto& m : s.models) j["models"].push_back(m.id);
            j["seed"] = gr_seed;
            write_file(dir / "scenario.json", j.dump(2) + "\n", "cli-report");
        }
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return e.kind() == ErrorKind::Validation ? kExitValidation : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
