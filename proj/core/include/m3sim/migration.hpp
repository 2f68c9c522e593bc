#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "m3sim/time_series.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

/// 15 min, 1 h, 4 h, 8 h, 24 h.
inline constexpr std::array<Seconds, 5> kStandardGranularities{900, 3600, 14400, 28800, 86400};

/// "15m", "1h", "24h", "900s", "900" -> seconds.
std::optional<Seconds> parse_duration(std::string_view text);
std::string format_duration(Seconds seconds);

struct LocationResult {
    std::string location;
    TimeSeries co2;  // cumulative grams
    double total = 0.0;
};

/// Static placement: the whole energy profile run in each location. Sorted
/// ascending by total, ties by location code. Throws RuntimeError naming the
/// first location whose trace does not cover the energy horizon.
std::vector<LocationResult> assess_locations(const TimeSeries& energy,
                                             std::span<const CarbonTrace> traces);

/// Carbon intensities of several locations held onto one grid, locations in
/// ascending code order.
struct IntensityGrid {
    Seconds start_time = 0;
    Seconds step = 1;
    std::size_t length = 0;
    std::vector<std::string> locations;
    std::vector<std::vector<double>> intensity;  // [location][sample]
};

IntensityGrid make_intensity_grid(std::span<const CarbonTrace> traces, Seconds start_time,
                                  Seconds step, std::size_t length);

struct MigrationStep {
    std::size_t interval = 0;  // decision number
    Seconds time = 0;          // boundary timestamp
    std::string location;
};

struct MigrationPlan {
    Seconds granularity = 0;
    std::vector<MigrationStep> steps;
    std::size_t migrations = 0;
    double total_co2 = 0.0;  // grams
};

/// Greedy carbon-aware placement: at t = 0 and then at every `granularity`
/// boundary move to the location with the lowest held intensity (ties by
/// code); a change of location counts as one migration. Emissions add
/// interval_energy_wh[i] * intensity(active, i) / 1000 per grid sample; with
/// no energy given, total_co2 stays 0. Granularity must be a positive
/// multiple of the grid step.
MigrationPlan migrate_at_granularity(const IntensityGrid& grid, Seconds granularity,
                                     std::span<const double> interval_energy_wh = {});

/// Convenience: grid = the cumulative energy series' grid.
MigrationPlan migrate_at_granularity(const TimeSeries& energy, std::span<const CarbonTrace> traces,
                                     Seconds granularity);

struct MonthlyMigrationCounts {
    int year = 0;
    unsigned month = 0;  // 1..12
    std::vector<std::size_t> counts;  // one per granularity
};

/// For each requested month (UTC calendar month), run the greedy walk at each
/// granularity and report the migration counts.
std::vector<MonthlyMigrationCounts> migration_counts(
    std::span<const CarbonTrace> traces, int year, std::span<const unsigned> months,
    std::span<const Seconds> granularities = kStandardGranularities);

/// `kind,name,granularity_s,migrations,total_co2_g` rows: one per static
/// location, one per plan.
void write_migration_report(const std::vector<LocationResult>& locations,
                            const std::vector<MigrationPlan>& plans,
                            const std::filesystem::path& path);

void write_migration_counts(const std::vector<MonthlyMigrationCounts>& table,
                            std::span<const Seconds> granularities,
                            const std::filesystem::path& path);

}  // namespace m3sim
