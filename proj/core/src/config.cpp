#include "m3sim/config.hpp"

#include <json.hpp>

#include "m3sim/error.hpp"
#include "m3sim/migration.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

namespace {

using nlohmann::json;

constexpr const char* kScenarioModule = "sim-core";
constexpr const char* kExperimentModule = "cli-report";

json parse_json(std::string_view text, const char* module) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(module, std::string("invalid JSON: ") + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const char* module) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(module, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T require(const json& j, const char* key, const char* module) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(module, std::string("missing required field '") + key + "'");
    }
    return get_or<T>(j, key, T{}, module);
}

void require_file(const std::filesystem::path& p, const char* what, const char* module) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
        throw ValidationError(module, std::string(what) + " not found: " + p.string());
    }
}

NamedModel model_from_json(const json& j, std::size_t position) {
    if (j.is_string()) {
        const auto& entry = builtin_archive().at(j.get<std::string>());
        return {entry.id, entry.spec};
    }
    if (!j.is_object()) throw ValidationError("power-models", "model reference must be an id or an object");
    const auto kind_name = require<std::string>(j, "kind", "power-models");
    const auto kind = parse_power_kind(kind_name);
    if (!kind) throw ValidationError("power-models", "unknown model kind '" + kind_name + "'");
    std::optional<double> r;
    std::optional<double> alpha;
    if (j.contains("r") && !j.at("r").is_null()) r = get_or<double>(j, "r", 0.0, "power-models");
    if (j.contains("alpha") && !j.at("alpha").is_null()) alpha = get_or<double>(j, "alpha", 0.0, "power-models");
    auto spec = PowerModelSpec::make(*kind, require<double>(j, "p_idle", "power-models"),
                                     require<double>(j, "p_max", "power-models"), r, alpha);
    auto id = get_or<std::string>(j, "id", "inline" + std::to_string(position), "power-models");
    return {std::move(id), spec};
}

SimScenario scenario_from_json(const json& j, const std::filesystem::path& base) {
    const char* M = kScenarioModule;
    if (!j.is_object()) throw ValidationError(M, "scenario must be a JSON object");

    std::vector<HostSpec> hosts;
    if (!j.contains("hosts") || !j.at("hosts").is_array() || j.at("hosts").empty()) {
        throw ValidationError(M, "scenario needs a non-empty 'hosts' array");
    }
    for (const auto& h : j.at("hosts")) {
        const auto count = get_or<int>(h, "count", 1, M);
        if (count < 1) throw ValidationError(M, "host count must be >= 1");
        for (int c = 0; c < count; ++c) {
            HostSpec spec;
            spec.id = hosts.size();
            if (h.contains("id") && count == 1) spec.id = get_or<std::uint64_t>(h, "id", 0, M);
            spec.core_count = require<int>(h, "cores", M);
            spec.core_speed_mhz = get_or<double>(h, "core_speed", 0.0, M);
            spec.memory_mib = get_or<double>(h, "memory", 0.0, M);
            hosts.push_back(spec);
        }
    }

    const auto workload_path = resolve(base, require<std::string>(j, "workload", M));
    require_file(workload_path, "workload file", M);
    WorkloadTrace workload = load_workload(workload_path);

    std::vector<NamedModel> models;
    if (!j.contains("models") || !j.at("models").is_array()) {
        throw ValidationError(M, "scenario needs a 'models' array");
    }
    for (const auto& m : j.at("models")) models.push_back(model_from_json(m, models.size()));
    for (std::size_t a = 0; a < models.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            if (models[a].id == models[b].id) throw ValidationError(M, "duplicate model id '" + models[a].id + "'");
        }
    }

    SimScenario s{std::move(hosts), std::move(workload), get_or<Seconds>(j, "sample_step", 30, M),
                  std::move(models), std::nullopt, std::nullopt, get_or<std::uint64_t>(j, "seed", 0, M)};

    if (j.contains("carbon") && !j.at("carbon").is_null()) {
        const auto& c = j.at("carbon");
        const auto path = resolve(base, require<std::string>(c, "path", M));
        require_file(path, "carbon file", M);
        s.carbon = load_carbon(path, get_or<std::string>(c, "location", path.stem().string(), M));
    }
    if (j.contains("failures") && !j.at("failures").is_null()) {
        const auto& f = j.at("failures");
        FailureSpec spec;
        spec.rate_per_host_per_hour = get_or<double>(f, "rate_per_host_per_hour", spec.rate_per_host_per_hour, M);
        spec.downtime_mean_s = get_or<double>(f, "downtime_mean_s", spec.downtime_mean_s, M);
        if (f.contains("forced")) {
            for (const auto& ff : f.at("forced")) {
                spec.forced.push_back({require<std::size_t>(ff, "host", M), require<Seconds>(ff, "time", M),
                                       require<Seconds>(ff, "downtime", M)});
            }
        }
        s.failures = std::move(spec);
    }
    validate(s);
    return s;
}

}  // namespace

NamedModel parse_model_ref(std::string_view json_text, std::size_t position) {
    // Bare ids need not be quoted on the command line.
    if (!json_text.empty() && json_text.front() != '{' && json_text.front() != '"') {
        const auto& entry = builtin_archive().at(json_text);
        return {entry.id, entry.spec};
    }
    return model_from_json(parse_json(json_text, "power-models"), position);
}

SimScenario parse_scenario_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    return scenario_from_json(parse_json(json_text, kScenarioModule), base_dir);
}

SimScenario load_scenario_config(const std::filesystem::path& path) {
    require_file(path, "scenario config", kScenarioModule);
    return parse_scenario_config(read_file(path, kScenarioModule), path.parent_path());
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base) {
    const char* M = kExperimentModule;
    const json j = parse_json(json_text, M);
    if (!j.is_object()) throw ValidationError(M, "experiment config must be a JSON object");
    if (!j.contains("scenario")) throw ValidationError(M, "missing required field 'scenario'");

    const auto& sj = j.at("scenario");
    SimScenario scenario = sj.is_string() ? load_scenario_config(resolve(base, sj.get<std::string>()))
                                          : scenario_from_json(sj, base);

    ExperimentConfig cfg{std::move(scenario), {}, std::nullopt, std::nullopt,
                         resolve(base, require<std::string>(j, "output_dir", M)), SeriesFormat::Csv};

    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        const auto metric_name = get_or<std::string>(a, "metric", "power", M);
        const auto metric = parse_metric(metric_name);
        if (!metric) throw ValidationError(M, "unknown metric '" + metric_name + "'");
        cfg.analysis.metric = *metric;
        const auto w = get_or<long long>(a, "window", 1, M);
        if (w < 1) throw ValidationError(M, "window must be >= 1");
        cfg.analysis.window.size = static_cast<std::size_t>(w);
        const auto agg_name = get_or<std::string>(a, "agg", "median", M);
        const auto agg = parse_meta_agg(agg_name);
        if (!agg) throw ValidationError(M, "unknown aggregation '" + agg_name + "'");
        cfg.analysis.meta.agg = *agg;
        if (a.contains("quorum")) {
            const auto& q = a.at("quorum");
            if (q.is_string()) {
                if (q.get<std::string>() != "all") throw ValidationError(M, "quorum must be 'all' or an integer");
            } else if (q.is_number_integer() && q.get<long long>() >= 1) {
                cfg.analysis.meta.quorum = q.get<std::size_t>();
            } else {
                throw ValidationError(M, "quorum must be 'all' or a positive integer");
            }
        }
    }
    if (cfg.analysis.metric == Metric::Co2Cumulative && !cfg.scenario.carbon) {
        throw ValidationError(M, "metric co2 needs a carbon trace in the scenario");
    }
    if (cfg.analysis.meta.quorum && *cfg.analysis.meta.quorum > cfg.scenario.models.size()) {
        throw ValidationError(M, "quorum exceeds the number of models");
    }
    if (j.contains("ground_truth") && !j.at("ground_truth").is_null()) {
        cfg.ground_truth = resolve(base, j.at("ground_truth").get<std::string>());
        require_file(*cfg.ground_truth, "ground truth file", M);
    }
    if (j.contains("migration") && !j.at("migration").is_null()) {
        const auto& mj = j.at("migration");
        MigrationConfig mc;
        mc.carbon_dir = resolve(base, require<std::string>(mj, "carbon_dir", M));
        std::error_code ec;
        if (!std::filesystem::is_directory(mc.carbon_dir, ec)) {
            throw ValidationError(M, "carbon directory not found: " + mc.carbon_dir.string());
        }
        if (mj.contains("granularities")) {
            mc.granularities.clear();
            for (const auto& g : mj.at("granularities")) {
                const auto text = g.is_string() ? g.get<std::string>() : std::to_string(g.get<long long>());
                const auto secs = parse_duration(text);
                if (!secs) throw ValidationError(M, "bad granularity '" + text + "'");
                mc.granularities.push_back(*secs);
            }
        }
        cfg.migration = std::move(mc);
    }
    const auto fmt = get_or<std::string>(j, "export_format", "csv", M);
    if (fmt == "columnar_binary") {
        cfg.export_format = SeriesFormat::ColumnarBinary;
    } else if (fmt != "csv") {
        throw ValidationError(M, "export_format must be csv or columnar_binary");
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    require_file(path, "experiment config", kExperimentModule);
    return parse_experiment_config(read_file(path, kExperimentModule), path.parent_path());
}

}  // namespace m3sim
