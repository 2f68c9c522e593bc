#include "m3sim/migration.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "csv_util.hpp"
#include "m3sim/error.hpp"
#include "m3sim/parallel.hpp"
#include "m3sim/simulation.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "carbon-migration";

Seconds month_start(int year, unsigned month) {
    using namespace std::chrono;
    const sys_days first = year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{1}};
    return duration_cast<seconds>(first.time_since_epoch()).count();
}

std::vector<const CarbonTrace*> sorted_by_location(std::span<const CarbonTrace> traces) {
    std::vector<const CarbonTrace*> out;
    for (const auto& t : traces) out.push_back(&t);
    std::sort(out.begin(), out.end(),
              [](const CarbonTrace* a, const CarbonTrace* b) { return a->location < b->location; });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i]->location == out[i - 1]->location) {
            throw ValidationError(kModule, "duplicate location '" + out[i]->location + "'");
        }
    }
    return out;
}

}  // namespace

std::optional<Seconds> parse_duration(std::string_view text) {
    text = csv::trim(text);
    if (text.empty()) return std::nullopt;
    Seconds scale = 1;
    switch (text.back()) {
        case 's': scale = 1; text.remove_suffix(1); break;
        case 'm': scale = 60; text.remove_suffix(1); break;
        case 'h': scale = 3600; text.remove_suffix(1); break;
        case 'd': scale = 86400; text.remove_suffix(1); break;
        default: break;
    }
    const auto v = csv::parse_int(text);
    if (!v || *v <= 0) return std::nullopt;
    return *v * scale;
}

std::string format_duration(Seconds s) {
    if (s % 3600 == 0) return std::to_string(s / 3600) + "h";
    if (s % 60 == 0) return std::to_string(s / 60) + "m";
    return std::to_string(s) + "s";
}

std::vector<LocationResult> assess_locations(const TimeSeries& energy,
                                             std::span<const CarbonTrace> traces) {
    if (traces.empty()) throw ValidationError(kModule, "no locations to assess");
    const auto sorted = sorted_by_location(traces);
    std::vector<LocationResult> out(sorted.size());
    parallel_for(sorted.size(), [&](std::size_t i) {
        TimeSeries co2;
        try {
            co2 = integrate_co2(energy, *sorted[i]);
        } catch (const Error& e) {
            throw RuntimeError(kModule, e.what());
        }
        const double total = co2.values.empty() ? 0.0 : co2.values.back();
        out[i] = LocationResult{sorted[i]->location, std::move(co2), total};
    });
    std::stable_sort(out.begin(), out.end(), [](const LocationResult& a, const LocationResult& b) {
        return a.total < b.total;
    });
    return out;
}

IntensityGrid make_intensity_grid(std::span<const CarbonTrace> traces, Seconds start_time,
                                  Seconds step, std::size_t length) {
    if (traces.empty()) throw ValidationError(kModule, "empty location set");
    if (step <= 0) throw ValidationError(kModule, "grid step must be positive");
    IntensityGrid grid{start_time, step, length, {}, {}};
    const Seconds horizon = start_time + static_cast<Seconds>(length) * step;
    for (const CarbonTrace* t : sorted_by_location(traces)) {
        const auto& s = t->series;
        if (s.empty() || s.start_time > start_time || s.end_time() < horizon) {
            throw RuntimeError(kModule, "carbon trace '" + t->location +
                                            "' does not cover [" + std::to_string(start_time) +
                                            ", " + std::to_string(horizon) + ")");
        }
        grid.locations.push_back(t->location);
        grid.intensity.push_back(resample_hold(s, start_time, step, length).values);
    }
    return grid;
}

MigrationPlan migrate_at_granularity(const IntensityGrid& grid, Seconds granularity,
                                     std::span<const double> interval_energy_wh) {
    if (grid.locations.empty()) throw ValidationError(kModule, "empty location set");
    if (granularity <= 0 || granularity % grid.step != 0) {
        throw ValidationError(kModule, "granularity " + std::to_string(granularity) +
                                           " s is not a positive multiple of the series step " +
                                           std::to_string(grid.step) + " s");
    }
    if (!interval_energy_wh.empty() && interval_energy_wh.size() != grid.length) {
        throw ValidationError(kModule, "energy profile length does not match the intensity grid");
    }
    const auto stride = static_cast<std::size_t>(granularity / grid.step);

    MigrationPlan plan;
    plan.granularity = granularity;
    std::size_t current = 0;
    double acc = 0.0;  // Wh x g/kWh
    for (std::size_t i = 0; i < grid.length; ++i) {
        if (i % stride == 0) {
            std::size_t best = 0;
            for (std::size_t loc = 1; loc < grid.locations.size(); ++loc) {
                if (grid.intensity[loc][i] < grid.intensity[best][i]) best = loc;
            }
            if (!plan.steps.empty() && best != current) ++plan.migrations;
            current = best;
            plan.steps.push_back({plan.steps.size(), grid.start_time + static_cast<Seconds>(i) * grid.step,
                                  grid.locations[best]});
        }
        if (!interval_energy_wh.empty()) {
            acc += interval_energy_wh[i] * grid.intensity[current][i];
        }
    }
    plan.total_co2 = acc / 1000.0;
    return plan;
}

MigrationPlan migrate_at_granularity(const TimeSeries& energy, std::span<const CarbonTrace> traces,
                                     Seconds granularity) {
    if (energy.size() < 2) throw ValidationError(kModule, "energy series needs at least two samples");
    const std::size_t n = energy.size() - 1;
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = energy.values[i + 1] - energy.values[i];
    const auto grid = make_intensity_grid(traces, energy.start_time, energy.step, n);
    return migrate_at_granularity(grid, granularity, delta);
}

std::vector<MonthlyMigrationCounts> migration_counts(std::span<const CarbonTrace> traces, int year,
                                                     std::span<const unsigned> months,
                                                     std::span<const Seconds> granularities) {
    if (traces.empty()) throw ValidationError(kModule, "empty location set");
    Seconds step = 0;
    for (const auto& t : traces) step = std::gcd(step, t.series.step);
    for (Seconds g : granularities) step = std::gcd(step, g);

    std::vector<MonthlyMigrationCounts> table;
    for (unsigned month : months) {
        if (month < 1 || month > 12) throw ValidationError(kModule, "month out of range");
        const Seconds begin = month_start(year, month);
        const Seconds end = month == 12 ? month_start(year + 1, 1) : month_start(year, month + 1);
        const auto grid = make_intensity_grid(traces, begin, step,
                                              static_cast<std::size_t>((end - begin) / step));
        MonthlyMigrationCounts row{year, month, {}};
        for (Seconds g : granularities) row.counts.push_back(migrate_at_granularity(grid, g).migrations);
        table.push_back(std::move(row));
    }
    return table;
}

void write_migration_report(const std::vector<LocationResult>& locations,
                            const std::vector<MigrationPlan>& plans,
                            const std::filesystem::path& path) {
    std::string out = "kind,name,granularity_s,migrations,total_co2_g\n";
    for (const auto& l : locations) out += "static," + l.location + ",,," + format_double(l.total) + "\n";
    for (const auto& p : plans) {
        out += "migration," + format_duration(p.granularity) + "," + std::to_string(p.granularity) +
               "," + std::to_string(p.migrations) + "," + format_double(p.total_co2) + "\n";
    }
    write_file(path, out, kModule);
}

void write_migration_counts(const std::vector<MonthlyMigrationCounts>& table,
                            std::span<const Seconds> granularities,
                            const std::filesystem::path& path) {
    std::string out = "year,month";
    for (Seconds g : granularities) out += "," + format_duration(g);
    out += "\n";
    for (const auto& row : table) {
        out += std::to_string(row.year) + "," + std::to_string(row.month);
        for (auto c : row.counts) out += "," + std::to_string(c);
        out += "\n";
    }
    write_file(path, out, kModule);
}

}  // namespace m3sim
