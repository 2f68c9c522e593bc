#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "m3sim/simulation.hpp"
#include "m3sim/time_series.hpp"

namespace m3sim {

enum class Metric { Power, EnergyCumulative, Co2Cumulative };

std::string_view to_string(Metric metric);
/// Accepts "power", "energy", "co2" (and the long forms energy_cumulative, co2_cumulative).
std::optional<Metric> parse_metric(std::string_view name);
Unit unit_of(Metric metric);
bool is_cumulative(Metric metric);

enum class WindowAgg { Mean };

struct WindowSpec {
    std::size_t size = 1;
    WindowAgg agg = WindowAgg::Mean;
};

/// Chunks of `spec.size` consecutive samples collapse to one; output length is
/// ceil(n / m), the last chunk may be short, and each output sample keeps the
/// timestamp of its chunk's first input sample.
TimeSeries window(const TimeSeries& series, const WindowSpec& spec);

struct MemberSeries {
    std::string model_id;
    TimeSeries series;
};

/// k prediction series on one grid. Member lengths may differ (the
/// Meta-Model aligns them); start time and step never do.
struct MultiModel {
    Metric metric = Metric::Power;
    WindowSpec window;
    Seconds start_time = 0;
    Seconds step = 1;  // raw step * window size
    Unit unit = Unit::Watt;
    std::vector<MemberSeries> members;

    std::size_t size() const noexcept { return members.size(); }
};

/// Windows every member with the same spec. Throws ValidationError
/// (module "multi-model") naming the first member whose grid differs.
MultiModel assemble(std::vector<MemberSeries> raw, Metric metric, const WindowSpec& spec);

/// Pulls only the selected metric out of a simulation result.
MultiModel assemble(const SimResult& result, Metric metric, const WindowSpec& spec);

/// Last sample of each member, in member order. Cumulative metrics only.
std::vector<std::pair<std::string, double>> totals(const MultiModel& mm);

/// Wide CSV: a `# metric=.. unit=.. window=.. agg=mean step=..` line, then
/// `timestamp,<id>,<id>,..`; cells past a member's end are empty.
void write_multimodel(const MultiModel& mm, const std::filesystem::path& path);
MultiModel read_multimodel(const std::filesystem::path& path);

}  // namespace m3sim
