#include "m3sim/multi_model.hpp"

#include <algorithm>
#include <array>

#include "csv_util.hpp"
#include "m3sim/error.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "multi-model";

}  // namespace

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::Power: return "power";
        case Metric::EnergyCumulative: return "energy";
        case Metric::Co2Cumulative: return "co2";
    }
    return "power";
}

std::optional<Metric> parse_metric(std::string_view name) {
    if (name == "power") return Metric::Power;
    if (name == "energy" || name == "energy_cumulative") return Metric::EnergyCumulative;
    if (name == "co2" || name == "co2_cumulative") return Metric::Co2Cumulative;
    return std::nullopt;
}

Unit unit_of(Metric metric) {
    switch (metric) {
        case Metric::Power: return Unit::Watt;
        case Metric::EnergyCumulative: return Unit::WattHour;
        case Metric::Co2Cumulative: return Unit::GramCo2;
    }
    return Unit::Watt;
}

bool is_cumulative(Metric metric) { return metric != Metric::Power; }

TimeSeries window(const TimeSeries& series, const WindowSpec& spec) {
    if (series.empty()) throw ValidationError(kModule, "cannot window an empty series");
    if (spec.size == 0) throw ValidationError(kModule, "window size must be >= 1");
    const std::size_t m = spec.size;
    if (m == 1) return series;

    const std::size_t n = series.size();
    TimeSeries out{series.start_time, series.step * static_cast<Seconds>(m), {}, series.unit};
    out.values.reserve((n + m - 1) / m);
    for (std::size_t begin = 0; begin < n; begin += m) {
        const std::size_t end = std::min(begin + m, n);
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += series.values[i];
        out.values.push_back(sum / static_cast<double>(end - begin));
    }
    return out;
}

MultiModel assemble(std::vector<MemberSeries> raw, Metric metric, const WindowSpec& spec) {
    if (raw.empty()) throw ValidationError(kModule, "multi-model needs at least one member");
    if (spec.size == 0) throw ValidationError(kModule, "window size must be >= 1");
    const auto& ref = raw.front().series;
    for (const auto& m : raw) {
        if (m.series.empty()) {
            throw ValidationError(kModule, "model '" + m.model_id + "' has an empty series");
        }
        if (m.series.start_time != ref.start_time || m.series.step != ref.step) {
            throw ValidationError(kModule, "model '" + m.model_id +
                                               "' is on a different grid (start " +
                                               std::to_string(m.series.start_time) + ", step " +
                                               std::to_string(m.series.step) + ") than '" +
                                               raw.front().model_id + "'");
        }
    }
    MultiModel mm;
    mm.metric = metric;
    mm.window = spec;
    mm.start_time = ref.start_time;
    mm.step = ref.step * static_cast<Seconds>(spec.size);
    mm.unit = ref.unit;
    mm.members.reserve(raw.size());
    for (auto& m : raw) mm.members.push_back({std::move(m.model_id), window(m.series, spec)});
    return mm;
}

MultiModel assemble(const SimResult& result, Metric metric, const WindowSpec& spec) {
    std::vector<MemberSeries> raw;
    raw.reserve(result.per_model.size());
    for (const auto& out : result.per_model) {
        switch (metric) {
            case Metric::Power: raw.push_back({out.model_id, out.power}); break;
            case Metric::EnergyCumulative: raw.push_back({out.model_id, out.energy}); break;
            case Metric::Co2Cumulative:
                if (!out.co2) {
                    throw ValidationError(kModule, "co2 metric requested but the scenario has no carbon trace");
                }
                raw.push_back({out.model_id, *out.co2});
                break;
        }
    }
    return assemble(std::move(raw), metric, spec);
}

std::vector<std::pair<std::string, double>> totals(const MultiModel& mm) {
    if (!is_cumulative(mm.metric)) {
        throw ValidationError(kModule, "totals need a cumulative metric, got '" +
                                           std::string(to_string(mm.metric)) + "'");
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(mm.members.size());
    for (const auto& m : mm.members) out.emplace_back(m.model_id, m.series.values.back());
    return out;
}

void write_multimodel(const MultiModel& mm, const std::filesystem::path& path) {
    std::size_t rows = 0;
    for (const auto& m : mm.members) rows = std::max(rows, m.series.size());

    std::string out = "# metric=" + std::string(to_string(mm.metric)) +
                      " unit=" + std::string(to_string(mm.unit)) +
                      " window=" + std::to_string(mm.window.size) +
                      " agg=mean step=" + std::to_string(mm.step) + "\n";
    out += "timestamp";
    for (const auto& m : mm.members) out += ',' + m.model_id;
    out += '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        out += std::to_string(mm.start_time + static_cast<Seconds>(i) * mm.step);
        for (const auto& m : mm.members) {
            out += ',';
            if (i < m.series.size()) out += format_double(m.series.values[i]);
        }
        out += '\n';
    }
    write_file(path, out, kModule);
}

MultiModel read_multimodel(const std::filesystem::path& path) {
    const std::string text = read_file(path, kModule);
    const std::string source = path.string();
    csv::LineReader reader(text);
    std::string_view line;
    MultiModel mm;
    bool saw_meta = false;
    bool saw_header = false;
    bool saw_step = false;
    std::vector<bool> ended;
    auto fail = [&](const std::string& what) {
        throw ValidationError(kModule, source + ":" + std::to_string(reader.line_no()) + ": " + what);
    };

    std::optional<Seconds> first_ts;
    std::size_t row = 0;
    while (reader.next(line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            for (auto field : csv::split(csv::trim(line.substr(1)), ' ')) {
                const auto eq = field.find('=');
                if (eq == std::string_view::npos) continue;
                const auto key = field.substr(0, eq);
                const auto val = field.substr(eq + 1);
                if (key == "metric") {
                    const auto m = parse_metric(val);
                    if (!m) fail("unknown metric '" + std::string(val) + "'");
                    mm.metric = *m;
                    saw_meta = true;
                } else if (key == "unit") {
                    const auto u = parse_unit(val);
                    if (!u) fail("unknown unit '" + std::string(val) + "'");
                    mm.unit = *u;
                } else if (key == "window") {
                    const auto w = csv::parse_int(val);
                    if (!w || *w < 1) fail("bad window size");
                    mm.window.size = static_cast<std::size_t>(*w);
                } else if (key == "step") {
                    const auto s = csv::parse_int(val);
                    if (!s || *s < 1) fail("bad step");
                    mm.step = *s;
                    saw_step = true;
                }
            }
            continue;
        }
        const auto cells = csv::split(line);
        if (!saw_header) {
            if (cells.size() < 2 || cells[0] != "timestamp") fail("expected header timestamp,<model>,...");
            for (std::size_t c = 1; c < cells.size(); ++c) {
                mm.members.push_back({std::string(cells[c]), TimeSeries{}});
            }
            ended.assign(mm.members.size(), false);
            saw_header = true;
            continue;
        }
        if (cells.size() != mm.members.size() + 1) fail("wrong column count");
        const auto ts = csv::parse_int(cells[0]);
        if (!ts) fail("bad timestamp");
        if (!first_ts) first_ts = *ts;
        if (saw_step && *ts != *first_ts + static_cast<Seconds>(row) * mm.step) {
            fail("timestamps do not match step");
        }
        if (!saw_step && row == 1) {
            mm.step = *ts - *first_ts;
            if (mm.step <= 0) fail("timestamps must increase");
            saw_step = true;
        }
        for (std::size_t c = 0; c < mm.members.size(); ++c) {
            const auto cell = cells[c + 1];
            if (cell.empty()) {
                ended[c] = true;
                continue;
            }
            if (ended[c]) fail("member '" + mm.members[c].model_id + "' has a gap");
            const auto v = csv::parse_double(cell);
            if (!v) fail("bad value");
            mm.members[c].series.values.push_back(*v);
        }
        ++row;
    }
    if (!saw_meta || !saw_header) throw ValidationError(kModule, source + ": not a multi-model bundle");
    mm.start_time = first_ts.value_or(0);
    for (auto& m : mm.members) {
        m.series.start_time = mm.start_time;
        m.series.step = mm.step;
        m.series.unit = mm.unit;
        if (m.series.empty()) throw ValidationError(kModule, source + ": member '" + m.model_id + "' is empty");
        validate(m.series);
    }
    return mm;
}

}  // namespace m3sim
